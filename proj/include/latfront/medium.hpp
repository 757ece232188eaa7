#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latfront/quadrature.hpp"

namespace latfront {

// The six coefficient channels of the competition system, in fixed order.
enum class Channel : int { A1 = 0, B1 = 1, C1 = 2, A2 = 3, B2 = 4, C2 = 5 };

inline constexpr std::array<const char*, 6> kChannelNames = {"a1", "b1", "c1",
                                                             "a2", "b2", "c2"};

struct CoefficientSet {
    double a1 = 0.0, b1 = 0.0, c1 = 0.0;
    double a2 = 0.0, b2 = 0.0, c2 = 0.0;

    double operator[](Channel ch) const {
        switch (ch) {
            case Channel::A1: return a1;
            case Channel::B1: return b1;
            case Channel::C1: return c1;
            case Channel::A2: return a2;
            case Channel::B2: return b2;
            case Channel::C2: return c2;
        }
        return 0.0;
    }
};

enum class ChannelKind {
    Constant,
    Periodic,
    QuasiPeriodic,
    SmoothedSwitching,
    BoundedNoise,
};

const char* to_string(ChannelKind kind);
ChannelKind channel_kind_from_string(const std::string& name);

// One coefficient path. Periodic and quasi-periodic paths are sums of sines;
// smoothed-switching is a two-level telegraph path run through a C^1
// mollifier; bounded-noise is Catmull-Rom noise over hashed cell values.
struct ChannelSpec {
    ChannelKind kind = ChannelKind::Constant;
    double base = 1.0;

    // Periodic / quasi-periodic terms: base + sum_k amp_k sin(freq_k t + phase_k).
    std::vector<double> amplitudes;
    std::vector<double> frequencies;
    std::vector<double> phases;

    // Smoothed switching.
    double low = 0.5;
    double high = 1.5;
    double switch_period = 4.0;    // mean spacing of switch events
    double smoothing_width = 0.25; // mollifier half-width w

    // Bounded noise.
    double amplitude = 0.0;
    double correlation_time = 1.0;

    static ChannelSpec constant(double value);
    static ChannelSpec periodic(double base, double amp, double freq, double phase = 0.0);

    // Conservative lower/upper bounds on the sampled values.
    double lower_bound() const;
    double upper_bound() const;
    // Period when the path is exactly periodic (constant counts, any period).
    std::optional<double> period() const;

    nlohmann::json to_json() const;
    static ChannelSpec from_json(const nlohmann::json& j, ChannelKind default_kind);
};

struct MediumSpec {
    ChannelKind kind = ChannelKind::Constant; // default channel type + label
    std::uint64_t seed = 0;
    std::array<ChannelSpec, 6> channels;

    static MediumSpec constant(const CoefficientSet& c, std::uint64_t seed = 0);

    nlohmann::json to_json() const;
    static MediumSpec from_json(const nlohmann::json& j);

    // Throws ConfigError when a b/c channel can touch zero or a parameter is
    // out of range.
    void validate() const;
};

// One realization of the environment. Immutable; sampling is a pure function
// of (spec, time offset, t), so shifted copies agree with the original
// bit-exactly: coeffs_at(shift(m,s), t) == coeffs_at(m, t+s).
class Medium {
public:
    Medium() = default;
    explicit Medium(MediumSpec spec);

    const MediumSpec& spec() const { return spec_; }
    double time_offset() const { return offset_; }

    double channel(Channel ch, double t) const;
    CoefficientSet coeffs_at(double t) const;

    Medium shifted(double s) const;

    // Quadrature of one channel with absolute tolerance tol.
    double channel_integral(Channel ch, double s, double t,
                            double tol = kDefaultQuadTol) const;

    RealPath channel_path(Channel ch) const;

    // Common period of all six channels, when one exists.
    std::optional<double> common_period() const;
    bool has_rough_channels() const;

private:
    MediumSpec spec_;
    double offset_ = 0.0;
};

Medium make_medium(const MediumSpec& spec);

// Least/greatest mean of a path over [0,T] with window >= r, endpoints on the
// prefix-integral grid (step kDefaultGridStep).
MeanEstimate mean_estimate(const Medium& medium, const RealPath& path, double horizon,
                           double r, MeanMode mode,
                           double grid_step = kDefaultGridStep);
MeanEstimate mean_estimate(const Medium& medium, Channel ch, double horizon, double r,
                           MeanMode mode, double grid_step = kDefaultGridStep);

} // namespace latfront
