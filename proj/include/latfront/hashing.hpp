#pragma once

#include <cstdint>
#include <cstddef>
#include <string_view>

namespace latfront {

// Counter-based hashing: every random-looking quantity is a pure function of
// (seed, stream, counter), so evaluation order never matters and time shifts
// stay bit-exact.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t stream,
                                     std::int64_t counter) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ static_cast<std::uint64_t>(counter));
    return h;
}

// Uniform double in [0,1) from the top 53 bits.
constexpr double hash_unit(std::uint64_t seed, std::uint64_t stream,
                           std::int64_t counter) {
    return static_cast<double>(hash_combine(seed, stream, counter) >> 11) *
           0x1.0p-53;
}

// FNV-1a over bytes, used for output-file content hashes in run manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace latfront
