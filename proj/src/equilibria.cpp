#include "latfront/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "latfront/errors.hpp"

namespace latfront {

namespace {

double lagrange4(double fm1, double f0, double f1, double f2, double s) {
    // Cubic through nodes at s = -1, 0, 1, 2.
    const double c0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double c1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double c2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double c3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return c0 * fm1 + c1 * f0 + c2 * f1 + c3 * f2;
}

// Least mean of a path around a horizon, used to size pullback depths.
// Coarse grid: only the order of magnitude matters here.
double decay_rate_estimate(const RealPath& path, double t0, double t1) {
    const double span = std::max(t1 - t0, 1.0);
    const double r = std::min(40.0, 0.5 * span);
    PathTable table(path, t0, t1, 0.1);
    return window_mean_extremum(table, r, MeanMode::Least).value;
}

} // namespace

EquilibriumPath::EquilibriumPath(double t0, double dt, std::vector<double> values,
                                 double pullback_depth)
    : t0_(t0), dt_(dt), depth_(pullback_depth), values_(std::move(values)) {
    if (values_.size() < 4)
        throw ConfigError("EquilibriumPath needs at least 4 grid values");
}

double EquilibriumPath::operator()(double t) const {
    const auto n = values_.size();
    double pos = (t - t0_) / dt_;
    if (pos < -1e-9 || pos > static_cast<double>(n - 1) + 1e-9) {
        std::ostringstream os;
        os << "EquilibriumPath: t=" << t << " outside tabulated horizon ["
           << t0() << ", " << t1() << "]";
        throw ConfigError(os.str());
    }
    auto k = static_cast<std::size_t>(std::max(pos, 0.0));
    // Clamp the stencil so nodes k-1..k+2 exist.
    k = std::clamp<std::size_t>(k, 1, n - 3);
    const double s = pos - static_cast<double>(k);
    return lagrange4(values_[k - 1], values_[k], values_[k + 1], values_[k + 2], s);
}

double EquilibriumPath::derivative(double t) const {
    const auto n = values_.size();
    double pos = (t - t0_) / dt_;
    auto k = static_cast<std::size_t>(std::max(0.0, std::round(pos)));
    k = std::clamp<std::size_t>(k, 2, n - 3);
    return (-values_[k + 2] + 8.0 * values_[k + 1] - 8.0 * values_[k - 1] +
            values_[k - 2]) /
           (12.0 * dt_);
}

double EquilibriumPath::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double EquilibriumPath::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

namespace {

// Shared pullback machinery for the linear ODE w' = -rate(t) w + force(t):
// w(t) = int_{start}^{t} force(s) exp(-int_s^t rate) ds, advanced cell by
// cell on the grid. The recursion is exact for the ODE; only the per-subcell
// Simpson quadrature approximates, refined 4x below the output grid.
std::vector<double> pullback_integral(const RealPath& rate, const RealPath& force,
                                      double t_grid0, double t1, double dt,
                                      double depth) {
    constexpr int kRefine = 4;
    const auto n_keep =
        static_cast<std::size_t>(std::ceil((t1 - t_grid0) / dt - 1e-9)) + 1;
    const auto n_lead = static_cast<std::size_t>(std::ceil(depth / dt));
    const double t_start = t_grid0 - static_cast<double>(n_lead) * dt;
    const double h = dt / kRefine;

    const std::size_t cells = (n_lead + n_keep - 1) * kRefine;
    std::vector<double> out;
    out.reserve(n_keep);
    double w = 0.0;
    double rate_lo = rate(t_start);
    for (std::size_t i = 0; i < cells; ++i) {
        const double ta = t_start + h * static_cast<double>(i);
        const double tm = ta + 0.5 * h;
        const double tb = ta + h;
        const double rate_mid = rate(tm);
        const double rate_hi = rate(tb);
        // int_{ta}^{tb} rate and int_{tm}^{tb} rate by Simpson.
        const double r_cell = (h / 6.0) * (rate_lo + 4.0 * rate_mid + rate_hi);
        const double r_half =
            (h / 12.0) * (rate_mid + 4.0 * rate(ta + 0.75 * h) + rate_hi);
        const double g_a = force(ta) * std::exp(-r_cell);
        const double g_m = force(tm) * std::exp(-r_half);
        const double g_b = force(tb);
        w = w * std::exp(-r_cell) + (h / 6.0) * (g_a + 4.0 * g_m + g_b);
        rate_lo = rate_hi;
        const std::size_t node = i + 1;
        if (node % kRefine == 0 && node / kRefine >= n_lead)
            out.push_back(w);
    }
    return out;
}

// Runs the pullback with a doubling consistency check, deepening until two
// successive depths agree to 2*tol at every kept node.
struct PullbackResult {
    std::vector<double> values;
    double depth;
};

PullbackResult pullback_with_doubling(const RealPath& rate, const RealPath& force,
                                      double t0, double t1,
                                      const EquilibriumOptions& opts,
                                      double depth0, const char* what) {
    double depth = depth0;
    std::vector<double> cur = pullback_integral(rate, force, t0, t1, opts.dt, depth);
    if (!opts.doubling_check) return {std::move(cur), depth};
    for (int attempt = 0; attempt < 5; ++attempt) {
        std::vector<double> deep =
            pullback_integral(rate, force, t0, t1, opts.dt, 2.0 * depth);
        double gap = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i)
            gap = std::max(gap, std::abs(deep[i] - cur[i]));
        if (gap < 2.0 * opts.tol) return {std::move(deep), 2.0 * depth};
        cur = std::move(deep);
        depth *= 2.0;
    }
    throw NumericalError(std::string(what) +
                         ": pullback integral failed the doubling consistency check");
}

} // namespace

EquilibriumPath logistic_equilibrium(const Medium& medium, Channel growth,
                                     Channel self_limit, const Horizon& horizon,
                                     const EquilibriumOptions& opts) {
    const RealPath a = medium.channel_path(growth);
    const RealPath b = medium.channel_path(self_limit);

    const double probe0 = horizon.t0 - 80.0;
    const double a_least = decay_rate_estimate(a, probe0, horizon.t1);
    if (!(a_least > 0.0)) {
        std::ostringstream os;
        os << "logistic_equilibrium: least mean of "
           << kChannelNames[static_cast<int>(growth)] << " is " << a_least
           << " <= 0, (H1) fails";
        throw HypothesisError(os.str());
    }

    double depth = opts.pullback_depth > 0.0
                       ? opts.pullback_depth
                       : std::clamp(25.0 / a_least, 10.0, 2000.0);
    auto res = pullback_with_doubling(a, b, horizon.t0, horizon.t1, opts, depth,
                                      "logistic_equilibrium");
    std::vector<double> u(res.values.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1.0 / res.values[i];
    return EquilibriumPath(horizon.t0, opts.dt, std::move(u), res.depth);
}

EquilibriumPath aux_h(const Medium& medium, const EquilibriumPath& v_star,
                      const Horizon& horizon, const EquilibriumOptions& opts) {
    auto kappa = [&medium, &v_star](double t) {
        const double vs = v_star(t);
        const double lam = medium.channel(Channel::A1, t) -
                           medium.channel(Channel::C1, t) * vs;
        return medium.channel(Channel::A2, t) -
               2.0 * medium.channel(Channel::C2, t) * vs - lam;
    };
    auto force = [&medium, &v_star](double t) {
        return medium.channel(Channel::B2, t) * v_star(t);
    };

    // (H3) guarantees kappa <= -b2 v* < 0; refuse when the margin scan fails.
    double margin = std::numeric_limits<double>::infinity();
    for (double t = horizon.t0; t <= horizon.t1 + 1e-12; t += opts.dt)
        margin = std::min(margin, -kappa(t) - force(t));
    if (margin < -1e-12) {
        std::ostringstream os;
        os << "aux_h: (H3) ordering fails on the horizon (margin " << margin << ")";
        throw HypothesisError(os.str());
    }

    const double decay =
        decay_rate_estimate([kappa](double t) { return -kappa(t); },
                            horizon.t0 - 80.0, horizon.t1);
    if (!(decay > 0.0))
        throw HypothesisError("aux_h: decay rate -kappa has non-positive least mean");

    double depth = opts.pullback_depth > 0.0 ? opts.pullback_depth
                                             : std::clamp(25.0 / decay, 10.0, 2000.0);
    auto rate = [kappa](double t) { return -kappa(t); };
    auto res = pullback_with_doubling(rate, force, horizon.t0, horizon.t1, opts,
                                      depth, "aux_h");
    return EquilibriumPath(horizon.t0, opts.dt, std::move(res.values), res.depth);
}

RealPath lambda_fn(const Medium& medium, const EquilibriumPath& v_star) {
    return [medium, &v_star](double t) {
        return medium.channel(Channel::A1, t) -
               medium.channel(Channel::C1, t) * v_star(t);
    };
}

LambdaPath lambda_path(const Medium& medium, const EquilibriumPath& v_star,
                       const Horizon& scan_horizon, double window_r,
                       double grid_step) {
    LambdaPath lp;
    lp.path = lambda_fn(medium, v_star);
    PathTable table(lp.path, scan_horizon.t0, scan_horizon.t1, grid_step);
    lp.least_mean = window_mean_extremum(table, window_r, MeanMode::Least);
    return lp;
}

namespace {

double scan_min(const RealPath& f, const Horizon& h, double step) {
    double m = std::numeric_limits<double>::infinity();
    for (double t = h.t0; t <= h.t1 + 1e-12; t += step) m = std::min(m, f(t));
    return m;
}

} // namespace

HypothesisReport check_hypotheses(const Medium& medium, const Horizon& horizon,
                                  const HypothesisOptions& opts) {
    HypothesisReport rep;
    const double span = horizon.span();
    const double r = opts.mean_window > 0.0 ? opts.mean_window
                                            : std::min(50.0, 0.5 * span);
    auto least = [&](const RealPath& p) {
        PathTable t(p, horizon.t0, horizon.t1, opts.scan_step);
        return window_mean_extremum(t, r, MeanMode::Least).value;
    };
    auto greatest = [&](const RealPath& p) {
        PathTable t(p, horizon.t0, horizon.t1, opts.scan_step);
        return window_mean_extremum(t, r, MeanMode::Greatest).value;
    };

    rep.lambda1_least = least(medium.channel_path(Channel::A1));
    rep.lambda2_least = least(medium.channel_path(Channel::A2));
    rep.h1_pass = rep.lambda1_least > 0.0 && rep.lambda2_least > 0.0;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.h2_instability = nan;
    rep.h2_stability = nan;
    rep.h3_ordering_margin = nan;

    rep.h3_b2_inf = scan_min(medium.channel_path(Channel::B2), horizon, opts.scan_step);
    rep.h3_b1c1_margin = scan_min(
        [&medium](double t) {
            return medium.channel(Channel::B1, t) - medium.channel(Channel::C1, t);
        },
        horizon, opts.scan_step);
    rep.h3_b2c2_margin = scan_min(
        [&medium](double t) {
            return medium.channel(Channel::B2, t) - medium.channel(Channel::C2, t);
        },
        horizon, opts.scan_step);

    if (!rep.h1_pass) {
        rep.h2_pass = false;
        rep.h3_pass = false;
        return rep;
    }

    EquilibriumPath u_star = logistic_equilibrium(medium, Channel::A1, Channel::B1,
                                                  horizon, opts.equilibrium);
    EquilibriumPath v_star = logistic_equilibrium(medium, Channel::A2, Channel::C2,
                                                  horizon, opts.equilibrium);

    rep.h2_instability = least(lambda_fn(medium, v_star));
    rep.h2_stability = greatest([&medium, &u_star](double t) {
        return medium.channel(Channel::A2, t) -
               medium.channel(Channel::B2, t) * u_star(t);
    });
    rep.h2_pass = rep.h2_instability > 0.0 && rep.h2_stability < 0.0;

    rep.h3_ordering_margin = scan_min(
        [&medium, &v_star](double t) {
            const double vs = v_star(t);
            const double lam = medium.channel(Channel::A1, t) -
                               medium.channel(Channel::C1, t) * vs;
            const double rhs = medium.channel(Channel::A2, t) -
                               2.0 * medium.channel(Channel::C2, t) * vs +
                               medium.channel(Channel::B2, t) * vs;
            return lam - rhs;
        },
        horizon, opts.scan_step);
    rep.h3_pass = rep.h3_b2_inf > 0.0 && rep.h3_b1c1_margin >= -1e-12 &&
                  rep.h3_b2c2_margin >= -1e-12 && rep.h3_ordering_margin >= -1e-12;
    return rep;
}

EquilibriumBundle build_equilibria(const Medium& medium, const Horizon& horizon,
                                   const BundleOptions& opts) {
    EquilibriumBundle b;
    b.medium = medium;
    b.horizon = horizon;

    // v* extends far enough back for the h pullback to start inside it.
    Horizon wide{horizon.t0 - 320.0, horizon.t1};
    b.v_star = logistic_equilibrium(medium, Channel::A2, Channel::C2, wide,
                                    opts.equilibrium);
    b.u_star = logistic_equilibrium(medium, Channel::A1, Channel::B1, horizon,
                                    opts.equilibrium);
    b.h = aux_h(medium, b.v_star, horizon, opts.equilibrium);

    HypothesisOptions hopts;
    hopts.scan_step = opts.scan_step;
    hopts.mean_window = opts.mean_window;
    hopts.equilibrium = opts.equilibrium;
    b.report = check_hypotheses(medium, horizon, hopts);

    const double span = horizon.span();
    const double r = opts.mean_window > 0.0 ? opts.mean_window
                                            : std::min(50.0, 0.5 * span);
    auto period = medium.common_period();
    const RealPath lam = lambda_fn(medium, b.v_star);
    if (opts.refine_periodic_mean && period && *period < 0.5 * span) {
        if (*period == 0.0) {
            b.lambda_least = lam(0.5 * (horizon.t0 + horizon.t1));
        } else {
            const double t_ref = horizon.t0;
            b.lambda_least =
                integrate_adaptive(lam, t_ref, t_ref + *period) / *period;
        }
    } else {
        b.lambda_least = lambda_path(medium, b.v_star, horizon, r).least_mean.value;
    }
    return b;
}

} // namespace latfront
