#include "latfront/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "latfront/errors.hpp"

namespace latfront::oracle {

ScanResult dispersion_grid_scan(double lambda_least, double step) {
    if (!(lambda_least > 0.0))
        throw HypothesisError("dispersion_grid_scan: lambda_least must be > 0");
    double mu_max = 2.0;
    for (;;) {
        const auto count = static_cast<std::int64_t>(mu_max / step);
        double best = std::numeric_limits<double>::infinity();
        std::int64_t best_k = 1;
#pragma omp parallel
        {
            double local_best = std::numeric_limits<double>::infinity();
            std::int64_t local_k = 1;
#pragma omp for schedule(static)
            for (std::int64_t k = 1; k <= count; ++k) {
                const double mu = static_cast<double>(k) * step;
                const double em = std::exp(mu);
                const double val = (em + 1.0 / em - 2.0 + lambda_least) / mu;
                if (val < local_best) {
                    local_best = val;
                    local_k = k;
                }
            }
#pragma omp critical
            {
                if (local_best < best ||
                    (local_best == best && local_k < best_k)) {
                    best = local_best;
                    best_k = local_k;
                }
            }
        }
        if (best_k < count - 1)
            return {best, static_cast<double>(best_k) * step};
        mu_max *= 2.0; // minimum touched the end of the grid
    }
}

ClosedForms constant_reference(const CoefficientSet& c, double scan_step) {
    if (!(c.b1 > 0.0 && c.c1 > 0.0 && c.b2 > 0.0 && c.c2 > 0.0))
        throw ConfigError("constant_reference: b/c coefficients must be > 0");
    ClosedForms f;
    f.u_star = c.a1 / c.b1;
    f.v_star = c.a2 / c.c2;
    f.lambda = c.a1 - c.c1 * f.v_star;
    f.kappa = (c.a2 - 2.0 * c.c2 * f.v_star) - f.lambda;
    if (!(f.lambda > 0.0))
        throw HypothesisError("constant_reference: lambda = a1 - c1 v* must be > 0");
    f.h = c.b2 * f.v_star / (-f.kappa);
    f.scan_step = scan_step;
    const ScanResult scan = dispersion_grid_scan(f.lambda, scan_step);
    f.c0_scan = scan.c0;
    f.mu_star_scan = scan.mu_star;
    return f;
}

namespace {

// Independent transcriptions of the lattice right-hand sides.
void reference_rhs(const LatticeSystem& sys, double t,
                   const std::vector<double>& u, const std::vector<double>& v,
                   double phase, long first_index, std::vector<double>& du,
                   std::vector<double>& dv) {
    const std::size_t n = u.size();
    const CoefficientSet cf = sys.medium.coeffs_at(t);
    const double vstar = sys.v_star ? (*sys.v_star)(t) : 0.0;

    double ul = 0.0, vl = 0.0, ur = 0.0, vr = 0.0;
    if (sys.boundary.left) {
        auto [a, b] = sys.boundary.left(t, static_cast<double>(first_index - 1) + phase);
        ul = a;
        vl = b;
    }
    if (sys.boundary.right) {
        auto [a, b] = sys.boundary.right(
            t, static_cast<double>(first_index + static_cast<long>(n)) + phase);
        ur = a;
        vr = b;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double um = i == 0 ? ul : u[i - 1];
        const double up = i + 1 == n ? ur : u[i + 1];
        const double vm = i == 0 ? vl : v[i - 1];
        const double vp = i + 1 == n ? vr : v[i + 1];
        const double Hu = up - 2.0 * u[i] + um;
        const double Hv = vp - 2.0 * v[i] + vm;
        switch (sys.kind) {
            case SystemKind::Competition:
                du[i] = Hu + u[i] * (cf.a1 - cf.b1 * u[i] - cf.c1 * v[i]);
                dv[i] = Hv + v[i] * (cf.a2 - cf.b2 * u[i] - cf.c2 * v[i]);
                break;
            case SystemKind::Cooperative:
                du[i] = Hu + u[i] * (cf.a1 - cf.b1 * u[i] - cf.c1 * (vstar - v[i]));
                dv[i] = Hv + cf.b2 * (vstar - v[i]) * u[i] +
                        v[i] * (cf.a2 - 2.0 * cf.c2 * vstar + cf.c2 * v[i]);
                break;
            case SystemKind::LinearizedU:
                du[i] = Hu + (cf.a1 - cf.c1 * vstar) * u[i];
                dv[i] = 0.0;
                break;
        }
    }
}

} // namespace

Trajectory fixed_step_trajectory(const LatticeSystem& system,
                                 const LatticeState& state0, double t1, double dt,
                                 const std::vector<double>& output_times) {
    if (!(dt > 0.0 && dt <= 1e-4))
        throw ConfigError("fixed_step_trajectory: dt must be in (0, 1e-4]");
    const double t0 = state0.time;
    const auto steps = static_cast<std::int64_t>(std::llround((t1 - t0) / dt));

    std::vector<std::int64_t> out_steps;
    out_steps.reserve(output_times.size());
    for (double tau : output_times)
        out_steps.push_back(static_cast<std::int64_t>(std::llround((tau - t0) / dt)));

    const std::size_t n = state0.size();
    std::vector<double> u = state0.u, v = state0.v;
    std::vector<double> ku1(n), kv1(n), ku2(n), kv2(n), ku3(n), kv3(n), ku4(n),
        kv4(n), ut(n), vt(n);

    Trajectory traj;
    std::size_t out_idx = 0;
    auto maybe_snapshot = [&](std::int64_t step, double t) {
        while (out_idx < out_steps.size() && out_steps[out_idx] == step) {
            LatticeState s = state0;
            s.time = t;
            s.u = u;
            s.v = v;
            traj.snapshots.push_back(std::move(s));
            ++out_idx;
        }
    };

    maybe_snapshot(0, t0);
    for (std::int64_t k = 0; k < steps; ++k) {
        const double t = t0 + dt * static_cast<double>(k);
        reference_rhs(system, t, u, v, state0.phase, state0.first_index, ku1, kv1);
        for (std::size_t i = 0; i < n; ++i) {
            ut[i] = u[i] + 0.5 * dt * ku1[i];
            vt[i] = v[i] + 0.5 * dt * kv1[i];
        }
        reference_rhs(system, t + 0.5 * dt, ut, vt, state0.phase, state0.first_index,
                      ku2, kv2);
        for (std::size_t i = 0; i < n; ++i) {
            ut[i] = u[i] + 0.5 * dt * ku2[i];
            vt[i] = v[i] + 0.5 * dt * kv2[i];
        }
        reference_rhs(system, t + 0.5 * dt, ut, vt, state0.phase, state0.first_index,
                      ku3, kv3);
        for (std::size_t i = 0; i < n; ++i) {
            ut[i] = u[i] + dt * ku3[i];
            vt[i] = v[i] + dt * kv3[i];
        }
        reference_rhs(system, t + dt, ut, vt, state0.phase, state0.first_index, ku4,
                      kv4);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += (dt / 6.0) * (ku1[i] + 2.0 * ku2[i] + 2.0 * ku3[i] + ku4[i]);
            v[i] += (dt / 6.0) * (kv1[i] + 2.0 * kv2[i] + 2.0 * kv3[i] + kv4[i]);
        }
        traj.stats.rhs_evals += 4;
        maybe_snapshot(k + 1, t0 + dt * static_cast<double>(k + 1));
    }
    traj.stats.accepted = static_cast<std::size_t>(steps);
    traj.stats.min_step = dt;
    traj.stats.max_step = dt;
    return traj;
}

MeanCurves window_mean_scan(const RealPath& path, double horizon,
                            const std::vector<double>& r_grid, double step) {
    if (r_grid.empty()) throw ConfigError("window_mean_scan: empty r grid");
    const double r_max = *std::max_element(r_grid.begin(), r_grid.end());
    if (r_max > horizon)
        throw ConfigError("window_mean_scan: horizon shorter than max r");
    const auto n = static_cast<std::size_t>(std::ceil(horizon / step));
    std::vector<double> prefix(n + 1, 0.0);
    double prev = path(0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double cur = path(step * static_cast<double>(i));
        prefix[i] = prefix[i - 1] + 0.5 * step * (prev + cur);
        prev = cur;
    }

    // Extremal window average per exact length, then suffix extrema turn
    // "length == L" into "length >= r".
    std::vector<double> min_by_len(n + 1, std::numeric_limits<double>::infinity());
    std::vector<double> max_by_len(n + 1, -std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
    for (std::size_t len = 1; len <= n; ++len) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        const double inv = 1.0 / (step * static_cast<double>(len));
        for (std::size_t s = 0; s + len <= n; ++s) {
            const double avg = (prefix[s + len] - prefix[s]) * inv;
            lo = std::min(lo, avg);
            hi = std::max(hi, avg);
        }
        min_by_len[len] = lo;
        max_by_len[len] = hi;
    }
    for (std::size_t len = n - 1; len >= 1; --len) {
        min_by_len[len] = std::min(min_by_len[len], min_by_len[len + 1]);
        max_by_len[len] = std::max(max_by_len[len], max_by_len[len + 1]);
    }

    MeanCurves curves;
    curves.r = r_grid;
    for (double r : r_grid) {
        auto len = static_cast<std::size_t>(std::ceil(r / step - 1e-12));
        len = std::clamp<std::size_t>(len, 1, n);
        curves.least.push_back(min_by_len[len]);
        curves.greatest.push_back(max_by_len[len]);
    }
    return curves;
}

} // namespace latfront::oracle
