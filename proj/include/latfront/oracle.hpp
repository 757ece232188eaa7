#pragma once

#include <vector>

#include "latfront/integrate.hpp"
#include "latfront/lattice.hpp"
#include "latfront/medium.hpp"

// Brute-force and closed-form references. Everything here is transcribed
// independently of the main solver paths (fixed-step RK4 with its own
// right-hand sides, trapezoid quadrature, exhaustive scans) so that agreement
// between the two is evidence, not tautology.

namespace latfront::oracle {

struct ClosedForms {
    double u_star = 0.0;       // a1/b1
    double v_star = 0.0;       // a2/c2
    double lambda = 0.0;       // a1 - c1 v*
    double kappa = 0.0;        // (a2 - 2 c2 v*) - lambda
    double h = 0.0;            // b2 v* / (-kappa)
    double c0_scan = 0.0;      // min over the mu grid
    double mu_star_scan = 0.0; // argmin over the mu grid
    double scan_step = 1e-6;
};

ClosedForms constant_reference(const CoefficientSet& coeffs,
                               double scan_step = 1e-6);

// Grid minimum of (e^mu + e^-mu - 2 + lambda)/mu over mu in (0, mu_max],
// extending mu_max until the minimum is interior.
struct ScanResult {
    double c0 = 0.0;
    double mu_star = 0.0;
};
ScanResult dispersion_grid_scan(double lambda_least, double step = 1e-6);

// Classical RK4 at a fixed step with independently transcribed right-hand
// sides. Snapshots are taken at the output times rounded to the step grid.
Trajectory fixed_step_trajectory(const LatticeSystem& system,
                                 const LatticeState& state0, double t1, double dt,
                                 const std::vector<double>& output_times);

struct MeanCurves {
    std::vector<double> r;        // requested window grid
    std::vector<double> least;    // min over windows of length >= r
    std::vector<double> greatest; // max over windows of length >= r
};

// Exhaustive window scan over all grid window pairs (trapezoid prefix at a
// fine step). O(n^2); reference for env mean estimates.
MeanCurves window_mean_scan(const RealPath& path, double horizon,
                            const std::vector<double>& r_grid,
                            double step = 1e-3);

} // namespace latfront::oracle
