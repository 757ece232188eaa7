#include "latfront/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "latfront/errors.hpp"

namespace latfront {

namespace {

// Dormand-Prince 5(4).
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0,
                 kC5 = 8.0 / 9.0;
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// b - bhat.
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
// Dense-output weights.
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

struct MemberGeom {
    double phase = 0.0;
    long first_index = 0;
    std::size_t sites = 0;
    std::size_t offset = 0; // u block offset; v block at offset + sites
};

struct Workspace {
    std::vector<MemberGeom> geom;
    std::size_t total = 0;
    std::vector<double> y, ytmp, ynew;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7;
    std::vector<double> rc1, rc2, rc3, rc4, rc5;
};

void pack(const std::vector<LatticeState>& states, Workspace& w) {
    w.geom.clear();
    w.total = 0;
    for (const auto& s : states) {
        MemberGeom g{s.phase, s.first_index, s.size(), w.total};
        w.geom.push_back(g);
        w.total += 2 * s.size();
    }
    w.y.resize(w.total);
    for (std::size_t m = 0; m < states.size(); ++m) {
        const auto& g = w.geom[m];
        std::copy(states[m].u.begin(), states[m].u.end(), w.y.begin() + g.offset);
        std::copy(states[m].v.begin(), states[m].v.end(),
                  w.y.begin() + g.offset + g.sites);
    }
}

void unpack(const Workspace& w, const std::vector<double>& y, double t,
            std::vector<LatticeState>& states) {
    for (std::size_t m = 0; m < states.size(); ++m) {
        const auto& g = w.geom[m];
        states[m].time = t;
        std::copy(y.begin() + g.offset, y.begin() + g.offset + g.sites,
                  states[m].u.begin());
        std::copy(y.begin() + g.offset + g.sites,
                  y.begin() + g.offset + 2 * g.sites, states[m].v.begin());
    }
}

void eval_rhs(const LatticeSystem& sys, const Workspace& w, double t,
              const std::vector<double>& y, std::vector<double>& dy, Exec exec) {
    const CoefficientSet c = sys.medium.coeffs_at(t);
    const double vs = sys.v_star ? (*sys.v_star)(t) : 0.0;
    for (const auto& g : w.geom) {
        std::span<const double> u(y.data() + g.offset, g.sites);
        std::span<const double> v(y.data() + g.offset + g.sites, g.sites);
        std::span<double> du(dy.data() + g.offset, g.sites);
        std::span<double> dv(dy.data() + g.offset + g.sites, g.sites);
        GhostPair ghosts;
        const double x_left = static_cast<double>(g.first_index - 1) + g.phase;
        const double x_right =
            static_cast<double>(g.first_index + static_cast<long>(g.sites)) + g.phase;
        if (sys.boundary.left) {
            auto [gu, gv] = sys.boundary.left(t, x_left);
            ghosts.u_left = gu;
            ghosts.v_left = gv;
        }
        if (sys.boundary.right) {
            auto [gu, gv] = sys.boundary.right(t, x_right);
            ghosts.u_right = gu;
            ghosts.v_right = gv;
        }
        switch (sys.kind) {
            case SystemKind::Competition:
                competition_rhs(c, u, v, ghosts, du, dv, exec);
                break;
            case SystemKind::Cooperative:
                cooperative_rhs(c, vs, u, v, ghosts, du, dv, exec);
                break;
            case SystemKind::LinearizedU:
                linearized_u_rhs(c, vs, u, ghosts, du, exec);
                std::fill(dv.begin(), dv.end(), 0.0);
                break;
        }
    }
}

// Clip invariant-violating values in place; violations beyond tol abort.
void clip_invariants(const LatticeSystem& sys, const Workspace& w, double t,
                     std::vector<double>& y, double tol) {
    const bool bound_v = sys.kind == SystemKind::Cooperative && sys.v_star;
    const double vs_bound = bound_v ? (*sys.v_star)(t) : 0.0;
    for (const auto& g : w.geom) {
        for (std::size_t j = 0; j < 2 * g.sites; ++j) {
            double& x = y[g.offset + j];
            if (x < 0.0) {
                if (x < -tol) {
                    std::ostringstream os;
                    os << "state invariant violated at t=" << t << ": value " << x
                       << " < -state_tol";
                    throw NumericalError(os.str());
                }
                x = 0.0;
            }
        }
        if (!bound_v) continue;
        for (std::size_t j = 0; j < g.sites; ++j) {
            double& x = y[g.offset + g.sites + j];
            if (x > vs_bound) {
                if (x > vs_bound + tol) {
                    std::ostringstream os;
                    os << "state invariant violated at t=" << t << ": v=" << x
                       << " exceeds v*(t)=" << vs_bound << " + state_tol";
                    throw NumericalError(os.str());
                }
                x = vs_bound;
            }
        }
    }
}

double local_variation_rate(const Medium& medium, double t) {
    constexpr double dt = 1e-3;
    const CoefficientSet a = medium.coeffs_at(t);
    const CoefficientSet b = medium.coeffs_at(t + dt);
    double rate = std::abs(b.a1 - a.a1) + std::abs(b.b1 - a.b1) +
                  std::abs(b.c1 - a.c1) + std::abs(b.a2 - a.a2) +
                  std::abs(b.b2 - a.b2) + std::abs(b.c2 - a.c2);
    return rate / dt;
}

} // namespace

BoundarySpec equilibrium_boundary(SystemKind kind, const EquilibriumPath* u_star,
                                  const EquilibriumPath* v_star) {
    BoundarySpec b;
    switch (kind) {
        case SystemKind::Competition:
            // Left: invading species alone; right: resident alone.
            b.left = [u_star](double t, double) {
                return std::make_pair(u_star ? (*u_star)(t) : 0.0, 0.0);
            };
            b.right = [v_star](double t, double) {
                return std::make_pair(0.0, v_star ? (*v_star)(t) : 0.0);
            };
            break;
        case SystemKind::Cooperative:
            b.left = [u_star, v_star](double t, double) {
                return std::make_pair(u_star ? (*u_star)(t) : 0.0,
                                      v_star ? (*v_star)(t) : 0.0);
            };
            b.right = [](double, double) { return std::make_pair(0.0, 0.0); };
            break;
        case SystemKind::LinearizedU:
            b.left = [](double, double) { return std::make_pair(0.0, 0.0); };
            b.right = [](double, double) { return std::make_pair(0.0, 0.0); };
            break;
    }
    return b;
}

StepStats integrate_family(const LatticeSystem& system,
                           std::vector<LatticeState>& states, double t1,
                           const std::vector<double>& output_times,
                           const IntegratorOptions& opts,
                           const FamilySnapshotFn& on_snapshot) {
    if (states.empty()) throw ConfigError("integrate_family: no states");
    const double t0 = states.front().time;
    for (const auto& s : states) {
        if (s.time != t0)
            throw ConfigError("integrate_family: members disagree on start time");
        if (s.frame != system.frame())
            throw ConfigError("integrate_family: state frame does not match system");
        if (s.u.size() != s.v.size())
            throw ConfigError("integrate_family: u/v length mismatch");
    }
    if (t1 < t0) throw ConfigError("integrate_family: t1 < t0");
    if (system.kind != SystemKind::Competition && !system.v_star)
        throw ConfigError("integrate_family: this system kind needs v*");
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        const double tau = output_times[i];
        if (tau < t0 - 1e-9 || tau > t1 + 1e-9)
            throw ConfigError("integrate_family: output time outside [t0, t1]");
        if (i > 0 && tau <= output_times[i - 1])
            throw ConfigError("integrate_family: output times must be strictly increasing");
    }

    Workspace w;
    pack(states, w);
    const std::size_t n = w.total;
    for (auto* vec : {&w.ytmp, &w.ynew, &w.k1, &w.k2, &w.k3, &w.k4, &w.k5, &w.k6,
                      &w.k7, &w.rc1, &w.rc2, &w.rc3, &w.rc4, &w.rc5})
        vec->resize(n);

    StepStats stats;
    auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
        eval_rhs(system, w, t, y, dy, opts.exec);
        ++stats.rhs_evals;
    };

    std::size_t out_idx = 0;
    while (out_idx < output_times.size() && output_times[out_idx] <= t0 + 1e-14) {
        if (on_snapshot) on_snapshot(output_times[out_idx], states);
        ++out_idx;
    }
    if (t1 == t0) {
        unpack(w, w.y, t0, states);
        return stats;
    }

    const bool rough = system.medium.has_rough_channels();
    double t = t0;
    rhs(t, w.y, w.k1); // k1 always holds f(t, y)
    double h = std::min(opts.max_step, 1e-2);
    double err_prev = 1e-2;

    while (t < t1) {
        if (stats.accepted + stats.rejected > opts.max_steps)
            throw NumericalError("integrate_family: step budget exhausted");
        double h_cap = opts.max_step;
        if (rough)
            h_cap = std::min(h_cap,
                             0.01 / (1.0 + local_variation_rate(system.medium, t)));
        h = std::min(h, h_cap);
        if (!opts.dense_output && out_idx < output_times.size())
            h = std::min(h, std::max(output_times[out_idx] - t, 1e-13));
        if (t + h >= t1) h = t1 - t;
        if (h <= std::abs(t) * 1e-15 + 1e-300)
            throw NumericalError("integrate_family: step size underflow");

        const auto& y = w.y;
        for (std::size_t i = 0; i < n; ++i)
            w.ytmp[i] = y[i] + h * (kA21 * w.k1[i]);
        rhs(t + kC2 * h, w.ytmp, w.k2);
        for (std::size_t i = 0; i < n; ++i)
            w.ytmp[i] = y[i] + h * (kA31 * w.k1[i] + kA32 * w.k2[i]);
        rhs(t + kC3 * h, w.ytmp, w.k3);
        for (std::size_t i = 0; i < n; ++i)
            w.ytmp[i] = y[i] + h * (kA41 * w.k1[i] + kA42 * w.k2[i] + kA43 * w.k3[i]);
        rhs(t + kC4 * h, w.ytmp, w.k4);
        for (std::size_t i = 0; i < n; ++i)
            w.ytmp[i] = y[i] + h * (kA51 * w.k1[i] + kA52 * w.k2[i] +
                                    kA53 * w.k3[i] + kA54 * w.k4[i]);
        rhs(t + kC5 * h, w.ytmp, w.k5);
        for (std::size_t i = 0; i < n; ++i)
            w.ytmp[i] = y[i] + h * (kA61 * w.k1[i] + kA62 * w.k2[i] +
                                    kA63 * w.k3[i] + kA64 * w.k4[i] +
                                    kA65 * w.k5[i]);
        rhs(t + h, w.ytmp, w.k6);
        for (std::size_t i = 0; i < n; ++i)
            w.ynew[i] = y[i] + h * (kB1 * w.k1[i] + kB3 * w.k3[i] + kB4 * w.k4[i] +
                                    kB5 * w.k5[i] + kB6 * w.k6[i]);
        rhs(t + h, w.ynew, w.k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (kE1 * w.k1[i] + kE3 * w.k3[i] + kE4 * w.k4[i] +
                                  kE5 * w.k5[i] + kE6 * w.k6[i] + kE7 * w.k7[i]);
            const double scale =
                opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(w.ynew[i]));
            err = std::max(err, std::abs(e) / scale);
        }

        if (err > 1.0) {
            ++stats.rejected;
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            continue; // k1 still matches (t, y)
        }

        const double t_new = t + h;
        const bool want_out = on_snapshot && out_idx < output_times.size() &&
                              output_times[out_idx] <= t_new + 1e-12;
        if (want_out) {
            for (std::size_t i = 0; i < n; ++i) {
                const double dy = w.ynew[i] - y[i];
                const double bspl = h * w.k1[i] - dy;
                w.rc1[i] = y[i];
                w.rc2[i] = dy;
                w.rc3[i] = bspl;
                w.rc4[i] = dy - h * w.k7[i] - bspl;
                w.rc5[i] = h * (kD1 * w.k1[i] + kD3 * w.k3[i] + kD4 * w.k4[i] +
                                kD5 * w.k5[i] + kD6 * w.k6[i] + kD7 * w.k7[i]);
            }
            while (out_idx < output_times.size() &&
                   output_times[out_idx] <= t_new + 1e-12) {
                const double tau = output_times[out_idx];
                const double theta = std::clamp((tau - t) / h, 0.0, 1.0);
                for (std::size_t i = 0; i < n; ++i) {
                    w.ytmp[i] =
                        w.rc1[i] +
                        theta * (w.rc2[i] +
                                 (1.0 - theta) *
                                     (w.rc3[i] +
                                      theta * (w.rc4[i] + (1.0 - theta) * w.rc5[i])));
                }
                if (opts.enforce_invariants)
                    clip_invariants(system, w, tau, w.ytmp, opts.state_tol);
                unpack(w, w.ytmp, tau, states);
                on_snapshot(tau, states);
                ++out_idx;
            }
        } else {
            while (out_idx < output_times.size() &&
                   output_times[out_idx] <= t_new + 1e-12)
                ++out_idx;
        }

        std::swap(w.y, w.ynew);
        std::swap(w.k1, w.k7); // FSAL
        t = t_new;
        if (opts.enforce_invariants)
            clip_invariants(system, w, t, w.y, opts.state_tol);
        ++stats.accepted;
        stats.min_step = std::min(stats.min_step, h);
        stats.max_step = std::max(stats.max_step, h);
        const double e_clamped = std::max(err, 1e-10);
        const double fac =
            std::clamp(0.9 * std::pow(e_clamped, -0.14) * std::pow(err_prev, 0.08),
                       0.2, 5.0);
        err_prev = e_clamped;
        h *= fac;
    }

    unpack(w, w.y, t, states);
    return stats;
}

Trajectory integrate(const LatticeSystem& system, const LatticeState& state0,
                     double t1, const std::vector<double>& output_times,
                     const IntegratorOptions& opts) {
    std::vector<LatticeState> family{state0};
    Trajectory traj;
    auto collect = [&traj](double, const std::vector<LatticeState>& st) {
        traj.snapshots.push_back(st.front());
    };
    traj.stats = integrate_family(system, family, t1, output_times, opts, collect);
    return traj;
}

std::vector<Trajectory> integrate_offset_family(
    const LatticeSystem& system, const std::function<double(double)>& u0,
    const std::function<double(double)>& v0, long first_index, std::size_t sites,
    std::size_t m, double t0, double t1, const std::vector<double>& output_times,
    const IntegratorOptions& opts) {
    if (m == 0) throw ConfigError("integrate_offset_family: m must be >= 1");
    std::vector<LatticeState> family;
    family.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        LatticeState s;
        s.frame = system.frame();
        s.phase = static_cast<double>(k) / static_cast<double>(m);
        s.first_index = first_index;
        s.time = t0;
        s.u.resize(sites);
        s.v.resize(sites);
        for (std::size_t j = 0; j < sites; ++j) {
            const double x = s.site_pos(j);
            s.u[j] = u0(x);
            s.v[j] = v0(x);
        }
        family.push_back(std::move(s));
    }
    std::vector<Trajectory> out(m);
    auto collect = [&out](double, const std::vector<LatticeState>& st) {
        for (std::size_t k = 0; k < st.size(); ++k) out[k].snapshots.push_back(st[k]);
    };
    StepStats stats = integrate_family(system, family, t1, output_times, opts, collect);
    for (auto& tr : out) tr.stats = stats;
    return out;
}

} // namespace latfront
