#pragma once

#include <cmath>
#include <memory>

#include "latfront/equilibria.hpp"
#include "latfront/medium.hpp"

namespace latfront::testing {

// The six-coefficient instance (1, 1, 0.5, 0.5, 1, 1) used across the suite:
// u* = 1, v* = 1/2, lambda = 3/4, kappa = -5/4, h = 2/5.
inline MediumSpec canonical_spec() {
    return MediumSpec::constant(CoefficientSet{1.0, 1.0, 0.5, 0.5, 1.0, 1.0}, 7);
}

inline Medium canonical_medium() { return Medium(canonical_spec()); }

// a1 = 1 + 0.25 sin t, everything else canonical.
inline MediumSpec periodic_spec(double amp = 0.25) {
    MediumSpec spec = canonical_spec();
    spec.kind = ChannelKind::Periodic;
    spec.channels[0] = ChannelSpec::periodic(1.0, amp, 1.0);
    return spec;
}

// a1 = 1 + 0.3 sin t + 0.2 sin(sqrt(2) t), everything else canonical.
inline MediumSpec quasi_periodic_spec() {
    MediumSpec spec = canonical_spec();
    spec.kind = ChannelKind::QuasiPeriodic;
    ChannelSpec a1;
    a1.kind = ChannelKind::QuasiPeriodic;
    a1.base = 1.0;
    a1.amplitudes = {0.3, 0.2};
    a1.frequencies = {1.0, std::sqrt(2.0)};
    a1.phases = {0.0, 0.0};
    spec.channels[0] = a1;
    return spec;
}

inline MediumSpec switching_spec(std::uint64_t seed = 42) {
    MediumSpec spec = canonical_spec();
    spec.kind = ChannelKind::SmoothedSwitching;
    spec.seed = seed;
    ChannelSpec a1;
    a1.kind = ChannelKind::SmoothedSwitching;
    a1.low = 0.7;
    a1.high = 1.3;
    a1.switch_period = 4.0;
    a1.smoothing_width = 0.5;
    spec.channels[0] = a1;
    return spec;
}

inline MediumSpec noise_spec(std::uint64_t seed = 9) {
    MediumSpec spec = canonical_spec();
    spec.kind = ChannelKind::BoundedNoise;
    spec.seed = seed;
    ChannelSpec a1;
    a1.kind = ChannelKind::BoundedNoise;
    a1.base = 1.0;
    a1.amplitude = 0.2;
    a1.correlation_time = 2.0;
    spec.channels[0] = a1;
    return spec;
}

inline std::shared_ptr<const EquilibriumBundle> bundle_of(const MediumSpec& spec,
                                                          Horizon horizon) {
    return std::make_shared<EquilibriumBundle>(
        build_equilibria(Medium(spec), horizon));
}

} // namespace latfront::testing
