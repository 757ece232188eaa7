#include "latfront/fronts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "latfront/errors.hpp"

namespace latfront {

namespace {

double lagrange4(double fm1, double f0, double f1, double f2, double s) {
    const double c0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double c1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double c2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double c3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return c0 * fm1 + c1 * f0 + c2 * f1 + c3 * f2;
}

double interp_profile(const std::vector<double>& vals, double x0, double dx,
                      double x) {
    const auto n = vals.size();
    const double pos = (x - x0) / dx;
    if (pos < 0.0 || pos > static_cast<double>(n - 1)) {
        std::ostringstream os;
        os << "profile interpolation: x=" << x << " outside sampled range";
        throw ConfigError(os.str());
    }
    auto k = static_cast<std::size_t>(pos);
    k = std::clamp<std::size_t>(k, 1, n - 3);
    return lagrange4(vals[k - 1], vals[k], vals[k + 1], vals[k + 2],
                     pos - static_cast<double>(k));
}

double bounded_exp(double x) { return std::exp(std::min(x, 700.0)); }

} // namespace

double TimeSlice::phi_at(double x) const { return interp_profile(phi, x0, dx, x); }
double TimeSlice::psi_at(double x) const { return interp_profile(psi, x0, dx, x); }

double WaveAnsatz::lambda_at(double t) const { return lambda_table_.value(t); }

double WaveAnsatz::A(double t) const {
    return k_hat * t - (1.0 - delta) * (lambda_table_.prefix(t) - lambda_prefix0_);
}

double WaveAnsatz::A_prime(double t) const {
    return k_hat - (1.0 - delta) * lambda_at(t);
}

double WaveAnsatz::speed_integral(double t) const {
    return (dispersal_ * t + lambda_table_.prefix(t) - lambda_prefix0_) / mu;
}

double WaveAnsatz::instantaneous_speed(double t) const {
    return (dispersal_ + lambda_at(t)) / mu;
}

double WaveAnsatz::x_omega(double t) const {
    return speed_integral(t) +
           (std::log(d) + std::log(mu_tilde) - std::log(mu)) / (mu_tilde - mu) +
           A(t) / mu;
}

std::pair<double, double> WaveAnsatz::super_at(double x, double t) const {
    const double e = bounded_exp(-mu * (x - speed_integral(t)));
    return {std::min(eqs->u_star(t), e), std::min(eqs->v_star(t), e)};
}

std::pair<double, double> WaveAnsatz::sub_at(double x, double t) const {
    const double xo = x_omega(t);
    const double xi = std::max(x, xo) - speed_integral(t);
    const double bracket =
        std::exp(-mu * xi) -
        d * std::exp((mu_tilde / mu - 1.0) * A(t) - mu_tilde * xi);
    return {bracket, sigma * eqs->h(t) * bracket};
}

double WaveAnsatz::sub_cap_u(double t) const {
    const double xi_star = x_omega(t) - speed_integral(t);
    return std::exp(-mu * xi_star) * (1.0 - mu / mu_tilde);
}

WaveAnsatz build_ansatz(std::shared_ptr<const EquilibriumBundle> eqs, double gamma,
                        const AnsatzOptions& opts) {
    if (!eqs) throw ConfigError("build_ansatz: null equilibrium bundle");
    if (!eqs->report.all_pass())
        throw HypothesisError(
            "build_ansatz: hypotheses (H1)-(H3) do not all pass on this medium");
    if (!(opts.delta > 0.0 && opts.delta < 1.0))
        throw ConfigError("build_ansatz: delta must be in (0,1)");

    WaveAnsatz a;
    a.eqs = eqs;
    a.horizon = eqs->horizon;
    a.gamma = gamma;
    a.delta = opts.delta;
    a.lambda_least = eqs->lambda_least;
    if (!(a.lambda_least > 0.0))
        throw HypothesisError("build_ansatz: lambda_least must be positive");

    const SpeedReport crit = critical_speed(a.lambda_least, opts.opt_tol);
    a.c0 = crit.c0;
    a.mu_star = crit.mu_star;
    const DecayPair pair = decay_rates_for_speed(a.lambda_least, gamma, opts.opt_tol);
    a.mu = pair.mu_minus;
    a.mu_tilde = select_mu_tilde(a.mu, a.mu_star);
    a.dispersal_ = std::exp(a.mu) + std::exp(-a.mu) - 2.0;

    const double disp_tilde = std::exp(a.mu_tilde) + std::exp(-a.mu_tilde) - 2.0;
    a.K = (a.mu * disp_tilde - a.mu_tilde * a.dispersal_) / (a.mu_tilde - a.mu);
    if (!((1.0 - a.delta) * a.lambda_least > a.K)) {
        std::ostringstream os;
        os << "build_ansatz: (1-delta)*lambda_least = "
           << (1.0 - a.delta) * a.lambda_least << " does not exceed K = " << a.K
           << "; decrease delta";
        throw AnsatzError(os.str());
    }
    a.k_hat = (1.0 - a.delta) * a.lambda_least;

    a.lambda_table_ = PathTable(lambda_fn(eqs->medium, eqs->v_star), a.horizon.t0,
                                a.horizon.t1, opts.grid_step);
    a.lambda_prefix0_ = a.lambda_table_.prefix(0.0);

    // ||A||_inf and the pointwise inequality slack on the grid.
    double a_min = 0.0, a_max = 0.0;
    double lambda_min = std::numeric_limits<double>::infinity();
    double slack = std::numeric_limits<double>::infinity();
    double slack_arg = a.horizon.t0;
    for (std::size_t i = 0; i <= a.lambda_table_.cells(); ++i) {
        const double t = a.lambda_table_.node_time(i);
        const double A_t = a.k_hat * t - (1.0 - a.delta) *
                                             (a.lambda_table_.node_prefix(i) -
                                              a.lambda_prefix0_);
        a_min = std::min(a_min, A_t);
        a_max = std::max(a_max, A_t);
        const double lam = a.lambda_table_.node_value(i);
        lambda_min = std::min(lambda_min, lam);
        const double s = (1.0 - a.delta) * lam + a.A_prime(t) - a.K;
        if (s < slack) {
            slack = s;
            slack_arg = t;
        }
    }
    a.a_sup = std::max(std::abs(a_min), std::abs(a_max));
    a.min_slack = slack;
    if (a.a_sup > opts.a_sup_cap) {
        std::ostringstream os;
        os << "build_ansatz: ||A_omega||_inf = " << a.a_sup
           << " exceeds the boundedness cap " << opts.a_sup_cap
           << " on [" << a.horizon.t0 << ", " << a.horizon.t1 << "]";
        throw AnsatzError(os.str());
    }
    if (slack < 0.0) {
        std::ostringstream os;
        os << "build_ansatz: (1-delta)lambda + A' >= K fails at t = " << slack_arg
           << " (slack " << slack << ")";
        throw AnsatzError(os.str());
    }
    if (!(lambda_min > 0.0)) {
        std::ostringstream os;
        os << "build_ansatz: a1 - c1 v* touches " << lambda_min
           << " on the horizon; d_omega is undefined without pointwise positivity";
        throw AnsatzError(os.str());
    }

    double b_over_lambda = 0.0;
    for (std::size_t i = 0; i <= a.lambda_table_.cells(); ++i) {
        const double t = a.lambda_table_.node_time(i);
        const double lam = a.lambda_table_.node_value(i);
        const double b = std::max(eqs->medium.channel(Channel::B1, t),
                                  eqs->medium.channel(Channel::B2, t));
        b_over_lambda = std::max(b_over_lambda, b / lam);
    }

    const double ratio = a.mu_tilde / a.mu - 1.0;
    a.d_omega = std::max(
        b_over_lambda * a.mu * std::exp(-ratio * a.a_sup) /
            (a.delta * (a.mu_tilde - a.mu)),
        std::exp(ratio * a.a_sup));
    a.d = a.d_omega;

    // Keep the sub-solution peak under half of the equilibria so the sandwich
    // 0 < (sub) < (u*, v*) has room; the inequalities hold for any d >= d_omega.
    auto cap_max_for = [&](double d_val) {
        double cap = 0.0;
        for (std::size_t i = 0; i <= a.lambda_table_.cells(); ++i) {
            const double t = a.lambda_table_.node_time(i);
            const double xi_star =
                (std::log(d_val) + std::log(a.mu_tilde) - std::log(a.mu)) /
                    (a.mu_tilde - a.mu) +
                a.A(t) / a.mu;
            cap = std::max(cap, std::exp(-a.mu * xi_star) * (1.0 - a.mu / a.mu_tilde));
        }
        return cap;
    };
    double u_min = std::numeric_limits<double>::infinity();
    double v_min = std::numeric_limits<double>::infinity();
    double h_max = 0.0;
    for (std::size_t i = 0; i <= a.lambda_table_.cells(); ++i) {
        const double t = a.lambda_table_.node_time(i);
        u_min = std::min(u_min, eqs->u_star(t));
        v_min = std::min(v_min, eqs->v_star(t));
        h_max = std::max(h_max, eqs->h(t));
    }
    double cap_max = cap_max_for(a.d);
    if (cap_max > 0.5 * u_min) {
        a.d *= std::pow(cap_max / (0.5 * u_min), (a.mu_tilde - a.mu) / a.mu);
        cap_max = cap_max_for(a.d);
    }

    a.sigma = opts.sigma > 0.0
                  ? opts.sigma
                  : std::min(1.0, v_min / (2.0 * h_max * cap_max));
    // sigma h (peak u-part) <= v*/2 on the grid.
    for (std::size_t i = 0; i <= a.lambda_table_.cells(); ++i) {
        const double t = a.lambda_table_.node_time(i);
        const double peak = a.sigma * eqs->h(t) * a.sub_cap_u(t);
        if (peak > 0.5 * eqs->v_star(t) + 1e-12) {
            std::ostringstream os;
            os << "build_ansatz: sigma h (peak sub-solution) exceeds v*/2 at t = "
               << t << "; sigma too large";
            throw AnsatzError(os.str());
        }
    }
    return a;
}

namespace {

BoundarySpec ansatz_boundary(const WaveAnsatz& ansatz) {
    BoundarySpec b;
    auto sample = [&ansatz](double t, double x) { return ansatz.super_at(x, t); };
    b.left = sample;
    b.right = sample;
    return b;
}

LatticeState sample_super(const WaveAnsatz& ansatz, double t, double phase,
                          long first_index, std::size_t sites) {
    LatticeState s;
    s.frame = Frame::Cooperative;
    s.phase = phase;
    s.first_index = first_index;
    s.time = t;
    s.u.resize(sites);
    s.v.resize(sites);
    for (std::size_t j = 0; j < sites; ++j) {
        auto [u, v] = ansatz.super_at(s.site_pos(j), t);
        s.u[j] = u;
        s.v[j] = v;
    }
    return s;
}

} // namespace

FrontProfile pullback_front(const WaveAnsatz& ansatz, const FrontRunConfig& cfg) {
    if (cfg.tau_schedule.empty())
        throw ConfigError("pullback_front: empty tau schedule");
    if (cfg.phases == 0) throw ConfigError("pullback_front: phases must be >= 1");
    std::vector<double> taus = cfg.tau_schedule;
    std::sort(taus.begin(), taus.end(), std::greater<double>());
    std::vector<double> spawn_times;
    for (double tau : taus) spawn_times.push_back(cfg.tau_anchor - tau);
    if (!(cfg.eval_end >= cfg.eval_start))
        throw ConfigError("pullback_front: eval window is empty");
    if (spawn_times.back() > cfg.eval_start)
        throw ConfigError("pullback_front: eval window must start after the last spawn");
    if (ansatz.horizon.t0 > spawn_times.front() ||
        ansatz.horizon.t1 < cfg.eval_end)
        throw ConfigError("pullback_front: ansatz horizon does not cover the run");

    const std::size_t m = cfg.phases;
    const double mu = ansatz.mu;

    long window_lo = cfg.window_lo;
    std::size_t sites = cfg.window_sites;
    if (sites == 0) {
        const double s_first = ansatz.speed_integral(spawn_times.front());
        const double s_last = ansatz.speed_integral(cfg.eval_end);
        window_lo = static_cast<long>(std::floor(s_first - 45.0 / mu - 15.0));
        const long hi = static_cast<long>(std::ceil(s_last + 50.0 / mu + 15.0));
        sites = static_cast<std::size_t>(hi - window_lo);
    }

    LatticeSystem system;
    system.kind = SystemKind::Cooperative;
    system.medium = ansatz.eqs->medium;
    system.v_star = &ansatz.eqs->v_star;
    system.boundary = ansatz_boundary(ansatz);

    std::vector<double> eval_times;
    for (double t = cfg.eval_start; t <= cfg.eval_end + 1e-9; t += cfg.eval_step)
        eval_times.push_back(t);

    FrontProfile out;
    out.tau_depths = taus;

    std::vector<LatticeState> family;
    StepStats total;
    auto accumulate = [&total](const StepStats& s) {
        total.accepted += s.accepted;
        total.rejected += s.rejected;
        total.rhs_evals += s.rhs_evals;
        total.min_step = std::min(total.min_step, s.min_step);
        total.max_step = std::max(total.max_step, s.max_step);
    };

    for (std::size_t k = 0; k < m; ++k)
        family.push_back(sample_super(ansatz, spawn_times.front(),
                                      static_cast<double>(k) / m, window_lo, sites));

    for (std::size_t j = 1; j < spawn_times.size(); ++j) {
        accumulate(
            integrate_family(system, family, spawn_times[j], {}, cfg.solver));
        // Evolved deeper members must sit below the fresh super-solution data.
        for (std::size_t k = 0; k < m; ++k) {
            LatticeState fresh = sample_super(ansatz, spawn_times[j],
                                              static_cast<double>(k) / m, window_lo,
                                              sites);
            for (const auto& st : family) {
                if (st.phase != fresh.phase) continue;
                for (std::size_t i = 0; i < sites; ++i) {
                    out.pullback_uptick = std::max(out.pullback_uptick,
                                                   st.u[i] - fresh.u[i]);
                    out.pullback_uptick = std::max(out.pullback_uptick,
                                                   st.v[i] - fresh.v[i]);
                }
            }
            family.push_back(std::move(fresh));
        }
        if (out.pullback_uptick > 10.0 * cfg.solver.atol + cfg.mono_tol) {
            std::ostringstream os;
            os << "pullback_front: tau-monotonicity violated at spawn t = "
               << spawn_times[j] << " (uptick " << out.pullback_uptick << ")";
            throw NumericalError(os.str());
        }
    }

    const std::size_t groups = spawn_times.size();
    const std::size_t collar = 2 * m;
    double gap_max = 0.0;

    auto on_snapshot = [&](double t, const std::vector<LatticeState>& states) {
        const double s_t = ansatz.speed_integral(t);
        // Interleave phases: group g, phase k, site j -> index j*m + k.
        auto profile_of = [&](std::size_t g, bool u_part) {
            std::vector<double> prof(sites * m);
            for (std::size_t k = 0; k < m; ++k) {
                const auto& st = states[g * m + k];
                const auto& vals = u_part ? st.u : st.v;
                for (std::size_t j = 0; j < sites; ++j) prof[j * m + k] = vals[j];
            }
            return prof;
        };

        TimeSlice slice;
        slice.t = t;
        slice.x0 = static_cast<double>(window_lo) - s_t;
        slice.dx = 1.0 / static_cast<double>(m);
        slice.phi = profile_of(0, true);
        slice.psi = profile_of(0, false);

        // tau-monotonicity between successive depths.
        for (std::size_t g = 0; g + 1 < groups; ++g) {
            for (std::size_t k = 0; k < m; ++k) {
                const auto& deep = states[g * m + k];
                const auto& shallow = states[(g + 1) * m + k];
                for (std::size_t j = 0; j < sites; ++j) {
                    out.pullback_uptick = std::max(out.pullback_uptick,
                                                   deep.u[j] - shallow.u[j]);
                    out.pullback_uptick = std::max(out.pullback_uptick,
                                                   deep.v[j] - shallow.v[j]);
                }
            }
        }
        if (groups >= 2) {
            for (std::size_t k = 0; k < m; ++k) {
                const auto& a = states[k];
                const auto& b = states[m + k];
                for (std::size_t j = 0; j < sites; ++j) {
                    gap_max = std::max(gap_max, std::abs(a.u[j] - b.u[j]));
                    gap_max = std::max(gap_max, std::abs(a.v[j] - b.v[j]));
                }
            }
        }

        // Sandwich and monotonicity on the deepest member, collar excluded.
        const std::size_t total_pts = sites * m;
        for (std::size_t p = collar; p + collar < total_pts; ++p) {
            const double x_abs = static_cast<double>(window_lo) +
                                 static_cast<double>(p) * slice.dx;
            auto [us, vs] = ansatz.super_at(x_abs, t);
            auto [ub, vb] = ansatz.sub_at(x_abs, t);
            const double U = slice.phi[p];
            const double V = slice.psi[p];
            out.sandwich_violation = std::max({out.sandwich_violation, U - us,
                                               V - vs, ub - U, vb - V});
            if (p > collar) {
                out.profile_uptick = std::max(out.profile_uptick,
                                              slice.phi[p] - slice.phi[p - 1]);
                out.profile_uptick = std::max(out.profile_uptick,
                                              slice.psi[p] - slice.psi[p - 1]);
            }
        }

        out.speed_path.push_back(s_t);
        // Lab-frame level positions: the slice lives in the moving frame.
        out.x_u.push_back(s_t + front_position(slice,
                                               cfg.theta * ansatz.eqs->u_star(t),
                                               Species::U));
        out.x_v.push_back(s_t + front_position(slice,
                                               cfg.theta * ansatz.eqs->v_star(t),
                                               Species::V));
        out.slices.push_back(std::move(slice));
    };

    accumulate(integrate_family(system, family, cfg.eval_end, eval_times,
                                cfg.solver, on_snapshot));
    out.stats = total;
    out.convergence_gap = groups >= 2 ? gap_max : std::numeric_limits<double>::infinity();
    out.converged = out.convergence_gap < cfg.tol_pb;
    return out;
}

LimitDiagnostics profile_limits(const FrontProfile& front, const WaveAnsatz& ansatz) {
    if (front.slices.empty())
        throw ConfigError("profile_limits: empty front profile");
    LimitDiagnostics d;
    d.left_probe_x = -40.0 / ansatz.mu;
    d.right_probe_x = 40.0 / ansatz.mu;
    for (const auto& slice : front.slices) {
        const double t = slice.t;
        d.left_dev_u = std::max(
            d.left_dev_u, std::abs(slice.phi_at(d.left_probe_x) - ansatz.eqs->u_star(t)));
        d.left_dev_v = std::max(
            d.left_dev_v, std::abs(slice.psi_at(d.left_probe_x) - ansatz.eqs->v_star(t)));
        d.right_max_u = std::max(d.right_max_u, slice.phi_at(d.right_probe_x));
        d.right_max_v = std::max(d.right_max_v, slice.psi_at(d.right_probe_x));
        const double super_u =
            ansatz.super_at(d.right_probe_x + ansatz.speed_integral(t), t).first;
        if (super_u > 0.0)
            d.tail_ratio_u = std::max(d.tail_ratio_u,
                                      slice.phi_at(d.right_probe_x) / super_u);
    }
    return d;
}

double front_position(const TimeSlice& slice, double level_value, Species which) {
    const std::vector<double>& vals = which == Species::U ? slice.phi : slice.psi;
    const std::size_t n = vals.size();
    for (std::size_t j = 1; j < n; ++j) {
        if (vals[j - 1] >= level_value && vals[j] < level_value) {
            const double frac = (vals[j - 1] - level_value) / (vals[j - 1] - vals[j]);
            return slice.x_at(j - 1) + frac * slice.dx;
        }
    }
    std::ostringstream os;
    os << "front_position: no crossing of level " << level_value
       << " inside the window at t = " << slice.t;
    throw NumericalError(os.str());
}

SpeedMeasurement least_mean_speed(const std::vector<double>& times,
                                  const std::vector<double>& positions, double r,
                                  double target, double theta) {
    if (times.size() != positions.size() || times.size() < 2)
        throw ConfigError("least_mean_speed: malformed series");
    if (times.back() - times.front() < 2.0 * r)
        throw ConfigError("least_mean_speed: series shorter than 2r");
    SpeedMeasurement m;
    m.theta = theta;
    m.window_r = r;
    m.target = target;
    m.times = times;
    m.positions = positions;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t j = i + 1; j < times.size(); ++j) {
            const double dt = times[j] - times[i];
            if (dt < r) continue;
            best = std::min(best, (positions[j] - positions[i]) / dt);
        }
    }
    m.estimate = best;
    return m;
}

StationarityResult stationarity_check(const Medium& medium, double gamma, double t,
                                      const FrontRunConfig& cfg,
                                      const AnsatzOptions& aopts,
                                      const BundleOptions& bopts) {
    const double tau_max = *std::max_element(cfg.tau_schedule.begin(),
                                             cfg.tau_schedule.end());

    auto run_slice = [&](const Medium& med, double anchor) {
        Horizon horizon{anchor - tau_max - 10.0, anchor + 10.0};
        auto bundle = std::make_shared<EquilibriumBundle>(
            build_equilibria(med, horizon, bopts));
        WaveAnsatz ansatz = build_ansatz(bundle, gamma, aopts);
        FrontRunConfig rc = cfg;
        rc.tau_anchor = anchor;
        rc.eval_start = anchor;
        rc.eval_end = anchor;
        rc.eval_step = 1.0;
        rc.window_sites = 0; // size automatically around the slice
        FrontProfile front = pullback_front(ansatz, rc);
        return front.slices.front();
    };

    const TimeSlice slice_a = run_slice(medium, t);
    const TimeSlice slice_b = run_slice(medium.shifted(t), 0.0);

    // Compare at slice A's native nodes wherever B covers them.
    StationarityResult res;
    const double lo = std::max(slice_a.x0, slice_b.x0) + 2.0 * slice_a.dx;
    const double hi = std::min(slice_a.x_at(slice_a.phi.size() - 1),
                               slice_b.x_at(slice_b.phi.size() - 1)) -
                      2.0 * slice_a.dx;
    bool any = false;
    for (std::size_t j = 0; j < slice_a.phi.size(); ++j) {
        const double x = slice_a.x_at(j);
        if (x < lo || x > hi) continue;
        any = true;
        res.residual_u =
            std::max(res.residual_u, std::abs(slice_a.phi[j] - slice_b.phi_at(x)));
        res.residual_v =
            std::max(res.residual_v, std::abs(slice_a.psi[j] - slice_b.psi_at(x)));
    }
    if (!any)
        throw NumericalError("stationarity_check: profiles do not overlap in x");
    return res;
}

SpreadReport spreading_speed(const EquilibriumBundle& eqs, const SpreadConfig& cfg) {
    SpreadReport rep;
    rep.delta0 = cfg.level_delta0 > 0.0 ? cfg.level_delta0
                                        : 0.01 * eqs.u_star.min_value();
    rep.c0_target = critical_speed(eqs.lambda_least).c0;

    if (!(cfg.box_height > 0.0))
        throw ConfigError("spreading_speed: box height must be positive "
                          "(compact data must not be identically zero)");

    LatticeSystem system;
    system.kind = SystemKind::Cooperative;
    system.medium = eqs.medium;
    system.v_star = &eqs.v_star;
    system.boundary.left = [](double, double) { return std::make_pair(0.0, 0.0); };
    system.boundary.right = [](double, double) { return std::make_pair(0.0, 0.0); };

    LatticeState s0;
    s0.frame = Frame::Cooperative;
    s0.phase = 0.0;
    s0.first_index = cfg.window_lo;
    s0.time = 0.0;
    s0.u.assign(cfg.window_sites, 0.0);
    s0.v.assign(cfg.window_sites, 0.0);
    for (std::size_t j = 0; j < cfg.window_sites; ++j)
        if (std::abs(s0.site_pos(j)) <= cfg.box_half_width)
            s0.u[j] = cfg.box_height;

    std::vector<double> times;
    for (double t = cfg.snapshot_step; t <= cfg.horizon + 1e-9;
         t += cfg.snapshot_step)
        times.push_back(t);

    const double d0 = rep.delta0;
    auto on_snapshot = [&](double t, const std::vector<LatticeState>& states) {
        const auto& st = states.front();
        const std::size_t n = st.size();
        std::size_t lo = n, hi = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (st.u[j] >= d0) {
                if (lo == n) lo = j;
                hi = j;
            }
        }
        if (lo == n) return; // nothing above the level yet
        double right = st.site_pos(hi);
        if (hi + 1 < n && st.u[hi] > st.u[hi + 1])
            right += (st.u[hi] - d0) / (st.u[hi] - st.u[hi + 1]);
        double left = st.site_pos(lo);
        if (lo > 0 && st.u[lo] > st.u[lo - 1])
            left -= (st.u[lo] - d0) / (st.u[lo] - st.u[lo - 1]);
        rep.times.push_back(t);
        rep.right_edge.push_back(right);
        rep.left_edge.push_back(left);
    };

    std::vector<LatticeState> family{s0};
    rep.stats = integrate_family(system, family, cfg.horizon, times, cfg.solver,
                                 on_snapshot);

    const auto& fin = family.front();
    if (fin.u.front() > 0.5 * d0 || fin.u.back() > 0.5 * d0)
        throw NumericalError("spreading_speed: front reached the window edge; "
                             "enlarge the window");

    if (rep.times.size() < 4)
        throw NumericalError("spreading_speed: too few level crossings recorded");

    // OLS slope over the last half of the horizon.
    auto ols = [&](const std::vector<double>& ys, bool flip) {
        const std::size_t n_all = rep.times.size();
        const std::size_t start = n_all / 2;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const auto n = static_cast<double>(n_all - start);
        for (std::size_t i = start; i < n_all; ++i) {
            const double x = rep.times[i];
            const double y = flip ? -ys[i] : ys[i];
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double denom = n * sxx - sx * sx;
        const double slope = (n * sxy - sx * sy) / denom;
        const double intercept = (sy - slope * sx) / n;
        double ss = 0.0;
        for (std::size_t i = start; i < n_all; ++i) {
            const double y = flip ? -ys[i] : ys[i];
            const double e = y - slope * rep.times[i] - intercept;
            ss += e * e;
        }
        const double var = ss / std::max(1.0, n - 2.0) * n / denom;
        return std::make_pair(slope, std::sqrt(std::max(var, 0.0)));
    };
    auto [sr, se] = ols(rep.right_edge, false);
    auto [sl, se_l] = ols(rep.left_edge, true);
    (void)se_l;
    rep.slope_right = sr;
    rep.slope_left = sl;
    rep.slope_se = se;
    rep.estimate = 0.5 * (sr + sl);

    // Interior convergence at the final time.
    const double t_end = fin.time;
    const double radius = cfg.interior_fraction * rep.c0_target * t_end;
    const double us = eqs.u_star(t_end);
    const double vs = eqs.v_star(t_end);
    for (std::size_t j = 0; j < fin.size(); ++j) {
        if (std::abs(fin.site_pos(j)) > radius) continue;
        rep.interior_deviation =
            std::max(rep.interior_deviation,
                     std::abs(fin.u[j] - us) + std::abs(fin.v[j] - vs));
    }
    return rep;
}

} // namespace latfront
