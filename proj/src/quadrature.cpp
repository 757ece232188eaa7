#include "latfront/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "latfront/errors.hpp"

namespace latfront {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return (h / 6.0) * (fa + 4.0 * fm + fb);
}

double adaptive_step(const RealPath& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
        return left + right + err / 15.0;
    }
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_adaptive(const RealPath& f, double a, double b, double abs_tol) {
    if (a == b) return 0.0;
    if (b < a) return -integrate_adaptive(f, b, a, abs_tol);
    // Split long intervals so the recursion depth stays moderate even for
    // oscillatory paths.
    const double span = b - a;
    const int pieces = std::max(1, static_cast<int>(span / 8.0));
    double total = 0.0;
    const double piece_tol = abs_tol / static_cast<double>(pieces);
    for (int p = 0; p < pieces; ++p) {
        const double pa = a + span * static_cast<double>(p) / pieces;
        const double pb = a + span * static_cast<double>(p + 1) / pieces;
        const double pm = 0.5 * (pa + pb);
        const double fa = f(pa), fm = f(pm), fb = f(pb);
        const double whole = simpson(fa, fm, fb, pb - pa);
        total += adaptive_step(f, pa, pb, fa, fm, fb, whole, piece_tol, 48);
    }
    return total;
}

PathTable::PathTable(RealPath f, double t0, double t1, double step)
    : f_(std::move(f)), t0_(t0), step_(step) {
    if (!(t1 > t0)) throw ConfigError("PathTable: horizon must satisfy t1 > t0");
    if (!(step > 0.0)) throw ConfigError("PathTable: step must be positive");
    n_cells_ = static_cast<std::size_t>(std::ceil((t1 - t0) / step - 1e-12));
    values_.resize(n_cells_ + 1);
    half_values_.resize(n_cells_);
    prefix_.resize(n_cells_ + 1);
    for (std::size_t i = 0; i <= n_cells_; ++i) values_[i] = f_(node_time(i));
    for (std::size_t i = 0; i < n_cells_; ++i)
        half_values_[i] = f_(t0_ + step_ * (static_cast<double>(i) + 0.5));
    prefix_[0] = 0.0;
    for (std::size_t i = 0; i < n_cells_; ++i) {
        prefix_[i + 1] = prefix_[i] +
                         simpson(values_[i], half_values_[i], values_[i + 1], step_);
    }
}

double PathTable::value(double t) const { return f_(t); }

double PathTable::prefix(double t) const {
    if (n_cells_ == 0) return 0.0;
    const double pos = (t - t0_) / step_;
    if (pos <= 0.0) {
        // Outside the table: fall back to direct quadrature from the edge.
        return integrate_adaptive(f_, t0_, t, kDefaultQuadTol);
    }
    const auto last = static_cast<double>(n_cells_);
    if (pos >= last) {
        return prefix_[n_cells_] +
               integrate_adaptive(f_, t1(), t, kDefaultQuadTol);
    }
    auto i = static_cast<std::size_t>(pos);
    if (i >= n_cells_) i = n_cells_ - 1;
    const double ta = node_time(i);
    if (t == ta) return prefix_[i];
    const double m = 0.5 * (ta + t);
    return prefix_[i] + simpson(values_[i], f_(m), f_(t), t - ta);
}

double PathTable::min_node_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double PathTable::max_node_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

MeanEstimate window_mean_extremum(const PathTable& table, double r, MeanMode mode) {
    const std::size_t n = table.cells();
    const double h = table.step();
    const double horizon = static_cast<double>(n) * h;
    if (!(r > 0.0)) throw ConfigError("mean window r must be positive");
    if (r > horizon + 1e-12)
        throw ConfigError("mean window r exceeds the scan horizon");

    auto len_lo = static_cast<std::size_t>(std::ceil(r / h - 1e-12));
    len_lo = std::max<std::size_t>(len_lo, 1);
    const std::size_t len_hi = std::min(n, 2 * len_lo - 1);

    MeanEstimate est;
    est.window_r = r;
    est.horizon_t0 = table.t0();
    est.horizon_t1 = table.t1();
    est.mode = mode;
    est.trace.reserve(len_hi - len_lo + 1);

    const bool least = (mode == MeanMode::Least);
    est.trace.resize(len_hi - len_lo + 1);
    // Lengths are independent scans; the final reduction over the per-length
    // trace stays serial, so the result does not depend on thread count.
#pragma omp parallel for schedule(static)
    for (std::size_t len = len_lo; len <= len_hi; ++len) {
        const double inv = 1.0 / (static_cast<double>(len) * h);
        double len_best = least ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
        std::size_t len_arg = 0;
        for (std::size_t s = 0; s + len <= n; ++s) {
            const double avg = (table.node_prefix(s + len) - table.node_prefix(s)) * inv;
            if (least ? (avg < len_best) : (avg > len_best)) {
                len_best = avg;
                len_arg = s;
            }
        }
        est.trace[len - len_lo] = MeanWindow{table.node_time(len_arg),
                                             static_cast<double>(len) * h, len_best};
    }
    double best = least ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
    MeanWindow best_win;
    for (const MeanWindow& win : est.trace) {
        if (least ? (win.average < best) : (win.average > best)) {
            best = win.average;
            best_win = win;
        }
    }
    est.value = best;
    est.arg = best_win;
    return est;
}

} // namespace latfront
