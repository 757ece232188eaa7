#pragma once

#include <vector>

#include "latfront/medium.hpp"
#include "latfront/quadrature.hpp"

namespace latfront {

inline constexpr double kDefaultEqTol = 1e-8;
inline constexpr double kDefaultEqStep = 1e-2;

struct Horizon {
    double t0 = 0.0;
    double t1 = 0.0;
    double span() const { return t1 - t0; }
};

// Strictly positive scalar path on a uniform grid with cubic (4-point
// Lagrange) interpolation between nodes.
class EquilibriumPath {
public:
    EquilibriumPath() = default;
    EquilibriumPath(double t0, double dt, std::vector<double> values,
                    double pullback_depth);

    double t0() const { return t0_; }
    double t1() const { return t0_ + dt_ * static_cast<double>(values_.size() - 1); }
    double dt() const { return dt_; }
    double pullback_depth() const { return depth_; }
    const std::vector<double>& values() const { return values_; }
    double node_time(std::size_t i) const { return t0_ + dt_ * static_cast<double>(i); }

    double operator()(double t) const;
    // Fourth-order central finite difference on the grid.
    double derivative(double t) const;
    double min_value() const;
    double max_value() const;

private:
    double t0_ = 0.0;
    double dt_ = kDefaultEqStep;
    double depth_ = 0.0;
    std::vector<double> values_;
};

struct EquilibriumOptions {
    double dt = kDefaultEqStep;
    double tol = kDefaultEqTol;
    double pullback_depth = 0.0;   // 0 = choose from the decay rate
    bool doubling_check = true;
    std::size_t doubling_stride = 64; // grid decimation for the doubling check
};

// Bounded entire positive solution of u' = u(a(t) - b(t) u), realized as the
// reciprocal of w(t) = int_{t-T}^t b(s) exp(-int_s^t a) ds. Refuses when the
// least mean of the growth channel is not positive.
EquilibriumPath logistic_equilibrium(const Medium& medium, Channel growth,
                                     Channel self_limit, const Horizon& horizon,
                                     const EquilibriumOptions& opts = {});

// Strictly positive bounded solution of h' = kappa(t) h + b2(t) v*(t) with
// kappa = (a2 - 2 c2 v*) - (a1 - c1 v*); refuses when (H3) fails on the grid.
EquilibriumPath aux_h(const Medium& medium, const EquilibriumPath& v_star,
                      const Horizon& horizon, const EquilibriumOptions& opts = {});

struct LambdaPath {
    RealPath path;           // t -> a1(t) - c1(t) v*(t)
    MeanEstimate least_mean; // over the scan horizon
};

LambdaPath lambda_path(const Medium& medium, const EquilibriumPath& v_star,
                       const Horizon& scan_horizon, double window_r,
                       double grid_step = kDefaultGridStep);

RealPath lambda_fn(const Medium& medium, const EquilibriumPath& v_star);

struct HypothesisReport {
    double lambda1_least = 0.0;     // least mean of a1
    double lambda2_least = 0.0;     // least mean of a2
    double h2_instability = 0.0;    // least mean of a1 - c1 v*
    double h2_stability = 0.0;      // greatest mean of a2 - b2 u*
    double h3_b2_inf = 0.0;         // inf_t b2
    double h3_b1c1_margin = 0.0;    // min_t (b1 - c1)
    double h3_b2c2_margin = 0.0;    // min_t (b2 - c2)
    double h3_ordering_margin = 0.0; // min_t [(a1-c1 v*) - (a2-2c2 v* + b2 v*)]
    bool h1_pass = false;
    bool h2_pass = false;
    bool h3_pass = false;
    bool all_pass() const { return h1_pass && h2_pass && h3_pass; }
};

struct HypothesisOptions {
    double scan_step = kDefaultGridStep;
    double mean_window = 0.0; // 0 = half the horizon
    EquilibriumOptions equilibrium;
};

HypothesisReport check_hypotheses(const Medium& medium, const Horizon& horizon,
                                  const HypothesisOptions& opts = {});

// Everything downstream modules need about one medium on one horizon.
struct EquilibriumBundle {
    Medium medium;
    Horizon horizon;
    EquilibriumPath u_star;
    EquilibriumPath v_star;
    EquilibriumPath h;
    double lambda_least = 0.0;
    HypothesisReport report;
};

struct BundleOptions {
    EquilibriumOptions equilibrium;
    double mean_window = 0.0;   // 0 = half the horizon
    double scan_step = kDefaultGridStep;
    // Use the exact period average for the least mean when the medium is
    // periodic; keeps the ansatz drift-free.
    bool refine_periodic_mean = true;
};

EquilibriumBundle build_equilibria(const Medium& medium, const Horizon& horizon,
                                   const BundleOptions& opts = {});

} // namespace latfront
