// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Run a subset with e.g. `acceptance 1 2 9`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "latfront/dispersion.hpp"
#include "latfront/errors.hpp"
#include "latfront/fronts.hpp"
#include "latfront/oracle.hpp"

using namespace latfront;
using namespace latfront::testing;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [FAILED: " << what << "]";
        }
    }
    template <typename T>
    void note(const std::string& key, T value) {
        detail << " " << key << "=" << value;
    }
};

// Shared expensive artifacts, built on first use.
struct Shared {
    std::optional<FrontProfile> constant_front;
    std::optional<WaveAnsatz> constant_ansatz;
    double constant_front_speed = 0.0;
    std::optional<FrontProfile> periodic_front;
    double periodic_front_speed = 0.0;
    std::optional<SpreadReport> spread;

    std::shared_ptr<const EquilibriumBundle> canonical =
        bundle_of(canonical_spec(), Horizon{-215.0, 215.0});

    const FrontProfile& constant_front_run() {
        if (!constant_front) {
            constant_ansatz = build_ansatz(canonical, 2.0);
            FrontRunConfig cfg;
            cfg.tau_schedule = {25.0, 50.0, 100.0, 200.0};
            cfg.eval_start = 50.0;
            cfg.eval_end = 200.0;
            cfg.eval_step = 2.5;
            cfg.phases = 4;
            cfg.window_lo = -600;
            cfg.window_sites = 2000;
            // Order relations between pullback members drift at the relative
            // tolerance scale, so rtol sits well below atol here.
            cfg.solver.rtol = 1e-12;
            cfg.solver.atol = 1e-10;
            constant_front = pullback_front(*constant_ansatz, cfg);
            std::vector<double> ts;
            for (const auto& s : constant_front->slices) ts.push_back(s.t);
            constant_front_speed =
                least_mean_speed(ts, constant_front->x_u, 20.0, 2.0).estimate;
        }
        return *constant_front;
    }

    const SpreadReport& spread_run() {
        if (!spread) {
            auto eqs = bundle_of(canonical_spec(), Horizon{-15.0, 315.0});
            SpreadConfig cfg;
            cfg.window_lo = -2000;
            cfg.window_sites = 4000;
            cfg.horizon = 300.0;
            cfg.interior_fraction = 0.5;
            spread = spreading_speed(*eqs, cfg);
        }
        return *spread;
    }
};

Shared shared;

void criterion_1(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    for (double lam : {0.25, 0.75, 1.0, 3.0}) {
        const auto scan = oracle::dispersion_grid_scan(lam, 1e-6);
        const SpeedReport rep = critical_speed(lam);
        c.expect(std::abs(rep.c0 - scan.c0) < 1e-8, "c0 vs grid scan");
        c.expect(std::abs(rep.mu_star - scan.mu_star) < 1e-5, "mu* vs grid scan");
        c.expect(rep.foc_residual < 1e-10, "FOC residual");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    c.note("secs", secs);
    c.expect(secs < 1.0, "runtime < 1 s");
}

void criterion_2(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    auto eqs = bundle_of(canonical_spec(), Horizon{0.0, 100.0});
    c.expect(eqs->report.all_pass(), "hypotheses all pass");
    c.expect(std::abs(eqs->lambda_least - 0.75) < 1e-10, "lambda_least = 0.75");
    c.note("lambda", eqs->lambda_least);
    double h_dev = 0.0;
    for (double t = 0.0; t <= 100.0; t += 0.37)
        h_dev = std::max(h_dev, std::abs(eqs->h(t) - 0.4));
    c.note("h_dev", h_dev);
    c.expect(h_dev < 1e-10, "h = 0.4 within 1e-10");

    // Frozen from the oracle run (mu grid step 1e-6).
    const SpeedReport rep = critical_speed(eqs->lambda_least);
    c.expect(std::abs(rep.c0 - 1.781081826707) < 1e-8, "c0 fixture");
    c.expect(std::abs(rep.mu_star - 0.801819497659) < 1e-5, "mu* fixture");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    c.note("secs", secs);
    c.expect(secs < 1.0, "runtime < 1 s");
}

void criterion_3(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const FrontProfile& front = shared.constant_front_run();
    c.note("gap", front.convergence_gap);
    c.expect(front.convergence_gap < 1e-4, "tau 100 vs 200 gap < 1e-4");
    c.note("uptick", front.profile_uptick);
    c.expect(front.profile_uptick <= 1e-9, "profile monotone");
    c.note("sandwich", front.sandwich_violation);
    c.expect(front.sandwich_violation <= 10.0 * 1e-10, "sandwich within 10*atol");
    c.note("speed", shared.constant_front_speed);
    c.expect(std::abs(shared.constant_front_speed - 2.0) / 2.0 < 0.02,
             "least-mean speed within 2% of 2");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    c.note("secs", secs);
    c.expect(secs < 300.0, "runtime < 5 min");
}

void criterion_4(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const double two_pi = 6.283185307179586476925286766559;
    auto eqs = bundle_of(periodic_spec(), Horizon{-215.0, 215.0});

    double per_dev = 0.0;
    for (double t = -180.0; t <= 180.0; t += 0.61) {
        per_dev = std::max(per_dev, std::abs(eqs->u_star(t + two_pi) - eqs->u_star(t)));
        per_dev = std::max(per_dev, std::abs(eqs->v_star(t + two_pi) - eqs->v_star(t)));
        per_dev = std::max(per_dev, std::abs(eqs->h(t + two_pi) - eqs->h(t)));
    }
    c.note("per_dev", per_dev);
    c.expect(per_dev < 1e-6, "u*, v*, h periodic within 1e-6");

    const WaveAnsatz ansatz = build_ansatz(eqs, 2.0);
    c.expect(ansatz.a_sup < 50.0, "A bounded");
    double a_per = 0.0;
    for (double t = -150.0; t <= 150.0; t += 0.83)
        a_per = std::max(a_per, std::abs(ansatz.A(t + two_pi) - ansatz.A(t)));
    c.note("A_periodicity", a_per);
    c.expect(a_per < 1e-4, "A periodic");

    FrontRunConfig cfg;
    cfg.tau_schedule = {25.0, 50.0, 100.0, 200.0};
    cfg.eval_start = 25.0;
    cfg.eval_end = 156.0;
    cfg.eval_step = 2.0;
    cfg.phases = 4;
    cfg.window_lo = -600;
    cfg.window_sites = 2000;
    cfg.solver.rtol = 1e-12;
    cfg.solver.atol = 1e-10;
    const FrontProfile front = pullback_front(ansatz, cfg);
    shared.periodic_front = front;
    c.expect(front.converged, "pullback converged");
    c.expect(front.sandwich_violation <= 10.0 * 1e-10, "sandwich");

    std::vector<double> ts;
    for (const auto& s : front.slices) ts.push_back(s.t);
    const double r = 10.0 * two_pi;
    const SpeedMeasurement speed = least_mean_speed(ts, front.x_u, r, 2.0);
    shared.periodic_front_speed = speed.estimate;
    c.note("speed", speed.estimate);
    c.expect(std::abs(speed.estimate - 2.0) / 2.0 < 0.03,
             "least-mean speed within 3% of gamma, r = 10 periods");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    c.note("secs", secs);
    c.expect(secs < 600.0, "runtime < 10 min");
}

void criterion_5(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const SpreadReport& rep = shared.spread_run();
    c.note("slope", rep.estimate);
    c.note("c0", rep.c0_target);
    c.expect(std::abs(rep.estimate - rep.c0_target) / rep.c0_target < 0.03,
             "spreading slope within 3% of c0");

    shared.constant_front_run();
    c.note("front_speed_const", shared.constant_front_speed);
    c.expect(shared.constant_front_speed >= 0.97 * rep.c0_target,
             "constant-medium front speed >= 0.97 c0");
    if (shared.periodic_front) {
        c.expect(shared.periodic_front_speed >= 0.97 * rep.c0_target,
                 "periodic-medium front speed >= 0.97 c0");
    }

    bool refused = false;
    try {
        decay_rates_for_speed(0.75, rep.c0_target);
    } catch (const AnsatzError&) {
        refused = true;
    }
    c.expect(refused, "gamma = c0 refused");
    refused = false;
    try {
        build_ansatz(shared.canonical, 0.9 * rep.c0_target);
    } catch (const AnsatzError&) {
        refused = true;
    }
    c.expect(refused, "gamma < c0 refused");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    c.note("secs", secs);
    c.expect(secs < 600.0, "runtime < 10 min");
}

void criterion_6(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const Medium m = canonical_medium();
    const EquilibriumPath v_star =
        logistic_equilibrium(m, Channel::A2, Channel::C2, Horizon{-10.0, 20.0});
    const EquilibriumPath u_star =
        logistic_equilibrium(m, Channel::A1, Channel::B1, Horizon{-10.0, 20.0});
    LatticeSystem system;
    system.kind = SystemKind::Cooperative;
    system.medium = m;
    system.v_star = &v_star;
    system.boundary =
        equilibrium_boundary(SystemKind::Cooperative, &u_star, &v_star);

    const std::size_t n = 200;
    const int pairs = 100;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> freq(0.02, 0.5);
    std::uniform_real_distribution<double> phase(0.0, 6.28);
    std::uniform_real_distribution<double> shrink(0.3, 0.97);

    std::vector<LatticeState> family;
    family.reserve(2 * pairs);
    for (int p = 0; p < pairs; ++p) {
        LatticeState hi;
        hi.frame = Frame::Cooperative;
        hi.first_index = -100;
        hi.time = 0.0;
        hi.u.resize(n);
        hi.v.resize(n);
        const double fu = freq(rng), fv = freq(rng);
        const double pu = phase(rng), pv = phase(rng);
        const double au = amp(rng), av = amp(rng);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = hi.site_pos(j);
            hi.u[j] = 0.9 * (0.5 + 0.5 * au * std::sin(fu * x + pu));
            hi.v[j] = 0.45 * (0.5 + 0.5 * av * std::sin(fv * x + pv));
        }
        LatticeState lo = hi;
        const double su = shrink(rng), sv = shrink(rng);
        for (std::size_t j = 0; j < n; ++j) {
            lo.u[j] *= su;
            lo.v[j] *= sv;
        }
        family.push_back(std::move(lo));
        family.push_back(std::move(hi));
    }

    IntegratorOptions opts;
    double worst = 0.0;
    double strict_min = 1e300;
    std::vector<double> outputs;
    for (double t = 0.5; t <= 10.0; t += 0.5) outputs.push_back(t);
    integrate_family(system, family, 10.0, outputs, opts,
                     [&](double, const std::vector<LatticeState>& st) {
                         for (int p = 0; p < pairs; ++p) {
                             const auto& lo = st[2 * p];
                             const auto& hi = st[2 * p + 1];
                             for (std::size_t j = 2; j + 2 < n; ++j) {
                                 worst = std::max({worst, lo.u[j] - hi.u[j],
                                                   lo.v[j] - hi.v[j]});
                                 strict_min = std::min(
                                     {strict_min, hi.u[j] - lo.u[j],
                                      hi.v[j] - lo.v[j]});
                             }
                         }
                     });
    c.note("worst_violation", worst);
    c.expect(worst <= 10.0 * opts.atol, "order preserved within 10*atol");
    c.note("strict_min", strict_min);
    c.expect(strict_min > 0.0, "strict pairs stay strict at interior sites");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    c.note("secs", secs);
    c.expect(secs < 120.0, "runtime < 2 min");
}

void criterion_7(Check& c) {
    // Dedicated run with all four depths live, compared right after the
    // shallowest spawn. Later in the run the true tau gaps contract below the
    // amplified-roundoff floor of the front position, where the sign of a
    // ~1e-10 difference is no longer meaningful.
    const WaveAnsatz ansatz = build_ansatz(shared.canonical, 2.0);
    FrontRunConfig cfg;
    cfg.tau_schedule = {25.0, 50.0, 100.0, 200.0};
    cfg.eval_start = -24.0;
    cfg.eval_end = -14.0;
    cfg.eval_step = 2.5;
    cfg.phases = 4;
    cfg.solver.rtol = 1e-12;
    cfg.solver.atol = 1e-12;
    const FrontProfile front = pullback_front(ansatz, cfg);
    c.note("uptick", front.pullback_uptick);
    c.expect(front.pullback_uptick <= 10.0 * cfg.solver.atol,
             "profiles non-increasing in tau within 10*atol");
    c.note("depths", front.tau_depths.size());
    c.expect(front.tau_depths.size() == 4, "full tau schedule exercised");
}

void criterion_8(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const Medium m(quasi_periodic_spec());

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-300.0, 300.0);
    bool exact = true;
    for (int i = 0; i < 1000; ++i) {
        const double s = dist(rng);
        const double t = dist(rng);
        const Medium shifted = m.shifted(s);
        for (int ch = 0; ch < 6; ++ch)
            exact = exact && shifted.channel(static_cast<Channel>(ch), t) ==
                                 m.channel(static_cast<Channel>(ch), t + s);
    }
    c.expect(exact, "bit-exact shift covariance on 1000 probes");

    FrontRunConfig cfg;
    cfg.tau_schedule = {200.0};
    cfg.phases = 4;
    for (double t : {3.7, 12.1}) {
        const StationarityResult r = stationarity_check(m, 2.0, t, cfg);
        std::ostringstream key;
        key << "residual_t" << t;
        c.note(key.str(), r.residual());
        c.expect(r.residual() < 5e-4, "stationarity residual < 5e-4");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    c.note("secs", secs);
}

void criterion_9(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const Medium m = canonical_medium();
    const EquilibriumPath v_star =
        logistic_equilibrium(m, Channel::A2, Channel::C2, Horizon{-10.0, 10.0});

    LatticeSystem system;
    system.kind = SystemKind::Cooperative;
    system.medium = m;
    system.v_star = &v_star;
    system.boundary.left = [](double, double) { return std::make_pair(0.0, 0.0); };
    system.boundary.right = system.boundary.left;

    LatticeState s0;
    s0.frame = Frame::Cooperative;
    s0.first_index = 0;
    s0.time = 0.0;
    s0.u.resize(50);
    s0.v.resize(50);
    for (std::size_t j = 0; j < 50; ++j) {
        const double x = static_cast<double>(j) - 25.0;
        s0.u[j] = 0.8 * std::exp(-x * x / 50.0);
        s0.v[j] = 0.4 * v_star(0.0) * std::exp(-x * x / 80.0);
    }
    const Trajectory ref =
        oracle::fixed_step_trajectory(system, s0, 2.0, 1e-5, {1.0, 2.0});
    const Trajectory adaptive = integrate(system, s0, 2.0, {1.0, 2.0}, {});
    double dev = 0.0;
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t j = 0; j < 50; ++j) {
            dev = std::max(dev, std::abs(adaptive.snapshots[s].u[j] -
                                         ref.snapshots[s].u[j]));
            dev = std::max(dev, std::abs(adaptive.snapshots[s].v[j] -
                                         ref.snapshots[s].v[j]));
        }
    c.note("max_dev", dev);
    c.expect(dev < 1e-7, "adaptive vs fixed-step RK4 within 1e-7");

    // Scalar logistic closed form.
    auto closed = [](double t) {
        const double e = std::exp(t);
        return 0.1 * e / (1.0 + 0.1 * (e - 1.0));
    };
    MediumSpec dec = canonical_spec();
    dec.channels[2] = ChannelSpec::constant(1e-12);
    const Medium md(dec);
    const EquilibriumPath v2 =
        logistic_equilibrium(md, Channel::A2, Channel::C2, Horizon{-10.0, 10.0});
    LatticeSystem logistic;
    logistic.kind = SystemKind::Cooperative;
    logistic.medium = md;
    logistic.v_star = &v2;
    logistic.boundary.left = [&](double t, double) {
        return std::make_pair(closed(t), 0.0);
    };
    logistic.boundary.right = logistic.boundary.left;
    LatticeState h0;
    h0.frame = Frame::Cooperative;
    h0.first_index = 0;
    h0.time = 0.0;
    h0.u.assign(20, 0.1);
    h0.v.assign(20, 0.0);
    IntegratorOptions tight;
    tight.rtol = 1e-10;
    tight.atol = 1e-12;
    const Trajectory lt = integrate(logistic, h0, 5.0, {5.0}, tight);
    double ldev = 0.0;
    for (double u : lt.snapshots[0].u) ldev = std::max(ldev, std::abs(u - closed(5.0)));
    c.note("logistic_dev", ldev);
    c.expect(ldev < 1e-9, "scalar logistic closed form to 1e-9");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    c.note("secs", secs);
}

void criterion_10(Check& c) {
    const SpreadReport& rep = shared.spread_run();
    c.note("interior_dev", rep.interior_deviation);
    c.expect(rep.interior_deviation < 1e-2,
             "sup over |i| <= 0.5 c0 t of |u-u*|+|v-v*| < 1e-2 at t=300");
}

struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&)> fn;
};

const Criterion kCriteria[] = {
    {1, "dispersion exactness vs 1e-6 grid scan", criterion_1},
    {2, "canonical constants instance", criterion_2},
    {3, "front existence at gamma = 2, constant medium", criterion_3},
    {4, "periodic medium front", criterion_4},
    {5, "spreading threshold c0", criterion_5},
    {6, "comparison principle suite", criterion_6},
    {7, "pullback monotonicity in tau", criterion_7},
    {8, "shift covariance and front stationarity", criterion_8},
    {9, "integrator fidelity vs fixed-step RK4", criterion_9},
    {10, "interior convergence behind the front", criterion_10},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& crit : kCriteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), crit.id) == selected.end())
            continue;
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            crit.fn(check);
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail << " [EXCEPTION: " << e.what() << "]";
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        std::printf("[%s] criterion %2d: %s —%s (%.1f s)\n",
                    check.ok ? "PASS" : "FAIL", crit.id, crit.name,
                    check.detail.str().c_str(), secs);
        std::fflush(stdout);
        if (!check.ok) ++failures;
    }
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    return failures;
}
