#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "latfront/dispersion.hpp"
#include "latfront/equilibria.hpp"
#include "latfront/integrate.hpp"

namespace latfront {

inline constexpr double kDefaultPullbackTol = 1e-4;
inline constexpr double kDefaultMonoTol = 1e-9;

struct AnsatzOptions {
    double delta = 0.05;
    double sigma = 0.0;     // 0 = pick from the v-cap rule
    double a_sup_cap = 50.0;
    double grid_step = kDefaultGridStep;
    double opt_tol = kDefaultOptTol;
};

// Everything needed to evaluate the exponential super-solution and the
// capped sub-solution pair for one wave speed gamma.
class WaveAnsatz {
public:
    double gamma = 0.0;
    double mu = 0.0;
    double mu_tilde = 0.0;
    double mu_star = 0.0;
    double c0 = 0.0;
    double delta = 0.0;
    double sigma = 0.0;
    double d = 0.0;
    double d_omega = 0.0;
    double K = 0.0;          // slope constant the A-inequality must beat
    double k_hat = 0.0;      // (1-delta) * lambda_least
    double lambda_least = 0.0;
    double a_sup = 0.0;      // ||A_omega||_inf over the horizon
    double min_slack = 0.0;  // min over grid of (1-delta)lambda + A' - K
    Horizon horizon;

    std::shared_ptr<const EquilibriumBundle> eqs;

    double lambda_at(double t) const;
    double A(double t) const;
    double A_prime(double t) const;
    // S(t) = int_0^t c(s; mu) ds.
    double speed_integral(double t) const;
    double instantaneous_speed(double t) const;
    double x_omega(double t) const;

    std::pair<double, double> super_at(double x, double t) const;
    std::pair<double, double> sub_at(double x, double t) const;
    // sup_x of the sub-solution u component at time t (the cap value).
    double sub_cap_u(double t) const;

    const PathTable& lambda_table() const { return lambda_table_; }

private:
    friend WaveAnsatz build_ansatz(std::shared_ptr<const EquilibriumBundle> eqs,
                                   double gamma, const AnsatzOptions& opts);
    PathTable lambda_table_;
    double lambda_prefix0_ = 0.0; // prefix value at t = 0
    double dispersal_ = 0.0;      // e^mu + e^-mu - 2
};

WaveAnsatz build_ansatz(std::shared_ptr<const EquilibriumBundle> eqs, double gamma,
                        const AnsatzOptions& opts = {});

struct FrontRunConfig {
    std::vector<double> tau_schedule = {25.0, 50.0, 100.0, 200.0};
    double tau_anchor = 0.0; // member j starts at tau_anchor - tau_j
    double eval_start = 25.0;
    double eval_end = 200.0;
    double eval_step = 2.5;
    std::size_t phases = 4;
    long window_lo = 0;          // used when window_sites > 0
    std::size_t window_sites = 0; // 0 = size the window automatically
    double theta = 0.5;          // level for front positions
    double tol_pb = kDefaultPullbackTol;
    double mono_tol = kDefaultMonoTol;
    IntegratorOptions solver;
};

// One moving-frame profile sample: values at x = x0 + j dx, phases interleaved.
struct TimeSlice {
    double t = 0.0;
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> phi; // u profile
    std::vector<double> psi; // v profile

    double x_at(std::size_t j) const { return x0 + dx * static_cast<double>(j); }
    // Cubic interpolation in x (profile must cover the query).
    double phi_at(double x) const;
    double psi_at(double x) const;
};

struct FrontProfile {
    std::vector<TimeSlice> slices;       // deepest pullback member
    std::vector<double> speed_path;      // S(t) at slice times
    std::vector<double> x_u;             // theta-level positions of phi
    std::vector<double> x_v;             // theta-level positions of psi
    std::vector<double> tau_depths;
    double convergence_gap = 0.0;        // sup gap between the two deepest
    bool converged = false;
    double pullback_uptick = 0.0;        // max violation of tau-monotonicity
    double sandwich_violation = 0.0;
    double profile_uptick = 0.0;         // max uptick in x over slices
    StepStats stats;
};

FrontProfile pullback_front(const WaveAnsatz& ansatz, const FrontRunConfig& cfg);

struct LimitDiagnostics {
    double left_probe_x = 0.0;
    double right_probe_x = 0.0;
    double left_dev_u = 0.0;  // sup_t |phi(x_L,t) - u*(t)|
    double left_dev_v = 0.0;
    double right_max_u = 0.0; // sup_t phi(x_R, t)
    double right_max_v = 0.0;
    double tail_ratio_u = 0.0; // phi / super at the right probe (-> 1)
};

LimitDiagnostics profile_limits(const FrontProfile& front, const WaveAnsatz& ansatz);

// Level crossing positions.
enum class Species { U, V };
double front_position(const TimeSlice& slice, double level_value, Species which);

struct SpeedMeasurement {
    double theta = 0.0;
    double window_r = 0.0;
    double estimate = 0.0; // min over windows >= r of the slope
    double target = 0.0;
    std::vector<double> times;
    std::vector<double> positions;
};

SpeedMeasurement least_mean_speed(const std::vector<double>& times,
                                  const std::vector<double>& positions, double r,
                                  double target, double theta = 0.5);

// Residual between the profile of omega at time t and the profile of the
// t-shifted medium at time 0, both built with the same pullback depth.
struct StationarityResult {
    double residual_u = 0.0;
    double residual_v = 0.0;
    double residual() const { return std::max(residual_u, residual_v); }
};

StationarityResult stationarity_check(const Medium& medium, double gamma, double t,
                                      const FrontRunConfig& cfg,
                                      const AnsatzOptions& aopts = {},
                                      const BundleOptions& bopts = {});

struct SpreadConfig {
    double box_height = 0.5;
    double box_half_width = 5.0;
    long window_lo = -2000;
    std::size_t window_sites = 4000;
    double horizon = 300.0;
    double snapshot_step = 2.0;
    double level_delta0 = 0.0; // 0 = 0.01 * min u*
    double interior_fraction = 0.5;
    IntegratorOptions solver;
};

struct SpreadReport {
    double delta0 = 0.0;
    double c0_target = 0.0;
    std::vector<double> times;
    std::vector<double> right_edge;
    std::vector<double> left_edge;
    double slope_right = 0.0;
    double slope_left = 0.0;
    double slope_se = 0.0;     // OLS standard error of slope_right
    double estimate = 0.0;     // mean of the two edge slopes
    double interior_deviation = 0.0; // sup_{|x|<=f c0 T}(|u-u*|+|v-v*|) at T
    StepStats stats;
};

SpreadReport spreading_speed(const EquilibriumBundle& eqs, const SpreadConfig& cfg);

} // namespace latfront
