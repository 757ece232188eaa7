#include "latfront/medium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latfront/errors.hpp"
#include "latfront/hashing.hpp"

namespace latfront {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// Catmull-Rom over values in [-1,1] stays within +/- (1 + 8/27).
constexpr double kNoiseOvershoot = 1.0 + 8.0 / 27.0;

// CDF of the C^1 bump mollifier rho(x) = (15/16)(1-x^2)^2 on [-1,1].
double mollifier_cdf(double y) {
    if (y <= -1.0) return 0.0;
    if (y >= 1.0) return 1.0;
    const double y3 = y * y * y;
    const double y5 = y3 * y * y;
    return 0.5 + (15.0 / 16.0) * (y - (2.0 / 3.0) * y3 + 0.2 * y5);
}

double catmull_rom(double vm1, double v0, double v1, double v2, double s) {
    const double m0 = 0.5 * (v1 - vm1);
    const double m1 = 0.5 * (v2 - v0);
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * v0 + h10 * m0 + h01 * v1 + h11 * m1;
}

// Switch event k of a smoothed-switching channel sits inside cell k with a
// hashed jitter, so consecutive events are at least switch_period/2 apart.
double switch_time(const ChannelSpec& c, std::uint64_t seed, std::uint64_t stream,
                   std::int64_t k) {
    const double jitter = hash_unit(seed, stream * 16 + 1, k);
    return (static_cast<double>(k) + 0.25 + 0.5 * jitter) * c.switch_period;
}

double switch_level(const ChannelSpec& c, std::uint64_t seed, std::uint64_t stream,
                    std::int64_t k) {
    return hash_unit(seed, stream * 16 + 2, k) < 0.5 ? c.low : c.high;
}

double eval_channel(const ChannelSpec& c, std::uint64_t seed, std::uint64_t stream,
                    double t) {
    switch (c.kind) {
        case ChannelKind::Constant:
            return c.base;
        case ChannelKind::Periodic:
        case ChannelKind::QuasiPeriodic: {
            double v = c.base;
            for (std::size_t k = 0; k < c.amplitudes.size(); ++k) {
                const double ph = k < c.phases.size() ? c.phases[k] : 0.0;
                v += c.amplitudes[k] * std::sin(c.frequencies[k] * t + ph);
            }
            return v;
        }
        case ChannelKind::SmoothedSwitching: {
            auto k = static_cast<std::int64_t>(std::floor(t / c.switch_period));
            if (t < switch_time(c, seed, stream, k)) --k;
            const double sk = switch_time(c, seed, stream, k);
            const double sk1 = switch_time(c, seed, stream, k + 1);
            const double lm1 = switch_level(c, seed, stream, k - 1);
            const double l0 = switch_level(c, seed, stream, k);
            const double l1 = switch_level(c, seed, stream, k + 1);
            const double w = c.smoothing_width;
            return lm1 + (l0 - lm1) * mollifier_cdf((t - sk) / w) +
                   (l1 - l0) * mollifier_cdf((t - sk1) / w);
        }
        case ChannelKind::BoundedNoise: {
            const double x = t / c.correlation_time;
            const auto k = static_cast<std::int64_t>(std::floor(x));
            const double s = x - static_cast<double>(k);
            auto node = [&](std::int64_t j) {
                return 2.0 * hash_unit(seed, stream * 16 + 3, j) - 1.0;
            };
            return c.base + c.amplitude * catmull_rom(node(k - 1), node(k),
                                                      node(k + 1), node(k + 2), s);
        }
    }
    return c.base;
}

// Smallest denominator q <= max_den with ratio ~= p/q; returns q.
std::optional<long> rational_denominator(double ratio, int max_den = 64) {
    for (int q = 1; q <= max_den; ++q) {
        const double p = ratio * q;
        const double pr = std::round(p);
        if (pr >= 1.0 && std::abs(p - pr) <= 1e-9 * std::max(1.0, std::abs(p)))
            return q;
    }
    return std::nullopt;
}

} // namespace

const char* to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::Constant: return "constant";
        case ChannelKind::Periodic: return "periodic";
        case ChannelKind::QuasiPeriodic: return "quasi-periodic";
        case ChannelKind::SmoothedSwitching: return "smoothed-switching";
        case ChannelKind::BoundedNoise: return "bounded-noise";
    }
    return "constant";
}

ChannelKind channel_kind_from_string(const std::string& name) {
    if (name == "constant") return ChannelKind::Constant;
    if (name == "periodic") return ChannelKind::Periodic;
    if (name == "quasi-periodic") return ChannelKind::QuasiPeriodic;
    if (name == "smoothed-switching") return ChannelKind::SmoothedSwitching;
    if (name == "bounded-noise") return ChannelKind::BoundedNoise;
    throw ConfigError("unknown channel kind: " + name);
}

ChannelSpec ChannelSpec::constant(double value) {
    ChannelSpec c;
    c.kind = ChannelKind::Constant;
    c.base = value;
    return c;
}

ChannelSpec ChannelSpec::periodic(double base, double amp, double freq, double phase) {
    ChannelSpec c;
    c.kind = ChannelKind::Periodic;
    c.base = base;
    c.amplitudes = {amp};
    c.frequencies = {freq};
    c.phases = {phase};
    return c;
}

double ChannelSpec::lower_bound() const {
    switch (kind) {
        case ChannelKind::Constant: return base;
        case ChannelKind::Periodic:
        case ChannelKind::QuasiPeriodic: {
            double s = 0.0;
            for (double a : amplitudes) s += std::abs(a);
            return base - s;
        }
        case ChannelKind::SmoothedSwitching: return std::min(low, high);
        case ChannelKind::BoundedNoise:
            return base - kNoiseOvershoot * std::abs(amplitude);
    }
    return base;
}

double ChannelSpec::upper_bound() const {
    switch (kind) {
        case ChannelKind::Constant: return base;
        case ChannelKind::Periodic:
        case ChannelKind::QuasiPeriodic: {
            double s = 0.0;
            for (double a : amplitudes) s += std::abs(a);
            return base + s;
        }
        case ChannelKind::SmoothedSwitching: return std::max(low, high);
        case ChannelKind::BoundedNoise:
            return base + kNoiseOvershoot * std::abs(amplitude);
    }
    return base;
}

std::optional<double> ChannelSpec::period() const {
    switch (kind) {
        case ChannelKind::Constant:
            return 0.0; // any period fits
        case ChannelKind::Periodic: {
            if (frequencies.empty()) return 0.0;
            double fmin = *std::min_element(frequencies.begin(), frequencies.end());
            if (!(fmin > 0.0)) return std::nullopt;
            long lcm_q = 1;
            for (double f : frequencies) {
                auto q = rational_denominator(f / fmin);
                if (!q) return std::nullopt;
                lcm_q = std::lcm(lcm_q, *q);
            }
            return kTwoPi / fmin * static_cast<double>(lcm_q);
        }
        default:
            return std::nullopt;
    }
}

nlohmann::json ChannelSpec::to_json() const {
    nlohmann::json j;
    j["type"] = to_string(kind);
    switch (kind) {
        case ChannelKind::Constant:
            j["value"] = base;
            break;
        case ChannelKind::Periodic:
        case ChannelKind::QuasiPeriodic:
            j["base"] = base;
            j["amplitudes"] = amplitudes;
            j["frequencies"] = frequencies;
            j["phases"] = phases;
            break;
        case ChannelKind::SmoothedSwitching:
            j["low"] = low;
            j["high"] = high;
            j["switch_period"] = switch_period;
            j["smoothing_width"] = smoothing_width;
            break;
        case ChannelKind::BoundedNoise:
            j["base"] = base;
            j["amplitude"] = amplitude;
            j["correlation_time"] = correlation_time;
            break;
    }
    return j;
}

namespace {

void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

} // namespace

ChannelSpec ChannelSpec::from_json(const nlohmann::json& j, ChannelKind default_kind) {
    if (j.is_number()) return ChannelSpec::constant(j.get<double>());
    if (!j.is_object()) throw ConfigError("channel spec must be a number or object");
    ChannelSpec c;
    c.kind = j.contains("type") ? channel_kind_from_string(j.at("type").get<std::string>())
                                : default_kind;
    switch (c.kind) {
        case ChannelKind::Constant:
            reject_unknown_keys(j, {"type", "value"}, "constant channel");
            c.base = j.value("value", 1.0);
            break;
        case ChannelKind::Periodic:
        case ChannelKind::QuasiPeriodic:
            reject_unknown_keys(j, {"type", "base", "amplitudes", "frequencies", "phases"},
                                "periodic channel");
            c.base = j.value("base", 0.0);
            c.amplitudes = j.at("amplitudes").get<std::vector<double>>();
            c.frequencies = j.at("frequencies").get<std::vector<double>>();
            c.phases = j.value("phases", std::vector<double>{});
            break;
        case ChannelKind::SmoothedSwitching:
            reject_unknown_keys(
                j, {"type", "low", "high", "switch_period", "smoothing_width"},
                "smoothed-switching channel");
            c.low = j.value("low", 0.5);
            c.high = j.value("high", 1.5);
            c.switch_period = j.value("switch_period", 4.0);
            c.smoothing_width = j.value("smoothing_width", 0.25);
            break;
        case ChannelKind::BoundedNoise:
            reject_unknown_keys(j, {"type", "base", "amplitude", "correlation_time"},
                                "bounded-noise channel");
            c.base = j.value("base", 1.0);
            c.amplitude = j.value("amplitude", 0.0);
            c.correlation_time = j.value("correlation_time", 1.0);
            break;
    }
    return c;
}

MediumSpec MediumSpec::constant(const CoefficientSet& c, std::uint64_t seed) {
    MediumSpec m;
    m.kind = ChannelKind::Constant;
    m.seed = seed;
    m.channels = {ChannelSpec::constant(c.a1), ChannelSpec::constant(c.b1),
                  ChannelSpec::constant(c.c1), ChannelSpec::constant(c.a2),
                  ChannelSpec::constant(c.b2), ChannelSpec::constant(c.c2)};
    return m;
}

nlohmann::json MediumSpec::to_json() const {
    nlohmann::json ch;
    for (int i = 0; i < 6; ++i) ch[kChannelNames[i]] = channels[i].to_json();
    return nlohmann::json{{"kind", to_string(kind)}, {"seed", seed}, {"channels", ch}};
}

MediumSpec MediumSpec::from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"kind", "seed", "channels"}, "medium spec");
    MediumSpec m;
    m.kind = j.contains("kind")
                 ? channel_kind_from_string(j.at("kind").get<std::string>())
                 : ChannelKind::Constant;
    m.seed = j.value("seed", std::uint64_t{0});
    if (!j.contains("channels")) throw ConfigError("medium spec: missing 'channels'");
    const auto& ch = j.at("channels");
    reject_unknown_keys(ch, {"a1", "b1", "c1", "a2", "b2", "c2"}, "channels");
    for (int i = 0; i < 6; ++i) {
        if (!ch.contains(kChannelNames[i]))
            throw ConfigError(std::string("channels: missing '") + kChannelNames[i] + "'");
        m.channels[i] = ChannelSpec::from_json(ch.at(kChannelNames[i]), m.kind);
    }
    m.validate();
    return m;
}

void MediumSpec::validate() const {
    for (int i = 0; i < 6; ++i) {
        const ChannelSpec& c = channels[i];
        const std::string name = kChannelNames[i];
        if (c.kind == ChannelKind::Periodic || c.kind == ChannelKind::QuasiPeriodic) {
            if (c.amplitudes.size() != c.frequencies.size())
                throw ConfigError("channel " + name + ": amplitudes/frequencies size mismatch");
            if (!c.phases.empty() && c.phases.size() != c.amplitudes.size())
                throw ConfigError("channel " + name + ": phases size mismatch");
            for (double f : c.frequencies)
                if (!(f > 0.0)) throw ConfigError("channel " + name + ": frequency must be > 0");
        }
        if (c.kind == ChannelKind::SmoothedSwitching) {
            if (!(c.switch_period > 0.0))
                throw ConfigError("channel " + name + ": switch_period must be > 0");
            if (!(c.smoothing_width > 0.0))
                throw ConfigError("channel " + name +
                                  ": smoothing_width must be > 0 (Holder continuity)");
            if (c.smoothing_width > 0.25 * c.switch_period)
                throw ConfigError("channel " + name +
                                  ": smoothing_width must be <= switch_period/4");
        }
        if (c.kind == ChannelKind::BoundedNoise && !(c.correlation_time > 0.0))
            throw ConfigError("channel " + name + ": correlation_time must be > 0");
        // b and c channels must stay strictly positive.
        const bool positive_required = (i == 1 || i == 2 || i == 4 || i == 5);
        if (positive_required && !(c.lower_bound() > 0.0))
            throw ConfigError("channel " + name +
                              ": sampled values must stay > 0 (amplitude floor is not positive)");
    }
}

Medium::Medium(MediumSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

double Medium::channel(Channel ch, double t) const {
    const int i = static_cast<int>(ch);
    return eval_channel(spec_.channels[i], spec_.seed,
                        static_cast<std::uint64_t>(i), t + offset_);
}

CoefficientSet Medium::coeffs_at(double t) const {
    return CoefficientSet{channel(Channel::A1, t), channel(Channel::B1, t),
                          channel(Channel::C1, t), channel(Channel::A2, t),
                          channel(Channel::B2, t), channel(Channel::C2, t)};
}

Medium Medium::shifted(double s) const {
    Medium m = *this;
    m.offset_ = offset_ + s;
    return m;
}

double Medium::channel_integral(Channel ch, double s, double t, double tol) const {
    return integrate_adaptive(channel_path(ch), s, t, tol);
}

RealPath Medium::channel_path(Channel ch) const {
    return [m = *this, ch](double t) { return m.channel(ch, t); };
}

std::optional<double> Medium::common_period() const {
    double t_max = 0.0;
    std::vector<double> periods;
    for (const auto& c : spec_.channels) {
        auto p = c.period();
        if (!p) return std::nullopt;
        if (*p > 0.0) {
            periods.push_back(*p);
            t_max = std::max(t_max, *p);
        }
    }
    if (periods.empty()) return 0.0; // all constant
    for (int mult = 1; mult <= 256; ++mult) {
        const double cand = t_max * mult;
        bool ok = true;
        for (double p : periods) {
            const double ratio = cand / p;
            if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
                ok = false;
                break;
            }
        }
        if (ok) return cand;
    }
    return std::nullopt;
}

bool Medium::has_rough_channels() const {
    for (const auto& c : spec_.channels)
        if (c.kind == ChannelKind::SmoothedSwitching ||
            c.kind == ChannelKind::BoundedNoise)
            return true;
    return false;
}

Medium make_medium(const MediumSpec& spec) { return Medium(spec); }

MeanEstimate mean_estimate(const Medium& medium, const RealPath& path, double horizon,
                           double r, MeanMode mode, double grid_step) {
    (void)medium;
    if (!(r > 0.0)) throw ConfigError("mean_estimate: window r must be > 0");
    if (r > horizon) throw ConfigError("mean_estimate: window r exceeds horizon T");
    PathTable table(path, 0.0, horizon, grid_step);
    return window_mean_extremum(table, r, mode);
}

MeanEstimate mean_estimate(const Medium& medium, Channel ch, double horizon, double r,
                           MeanMode mode, double grid_step) {
    return mean_estimate(medium, medium.channel_path(ch), horizon, r, mode, grid_step);
}

} // namespace latfront
