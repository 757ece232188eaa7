#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latfront/fronts.hpp"
#include "latfront/medium.hpp"

namespace latfront {

enum class ExperimentKind {
    Check,
    Speed,
    Simulate,
    Front,
    Spread,
    Oracle,
    MediumDump,
};

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

struct InitialCondition {
    // homogeneous | box | gaussian | exponential
    std::string type = "box";
    double u_value = 0.5;
    double v_value = 0.0;
    double half_width = 5.0;
    double center = 0.0;
    double width = 10.0; // gaussian std
    double mu = 0.5;     // exponential decay rate
};

struct SimulateParams {
    std::string frame = "cooperative"; // or "competition" / "linearized-u"
    InitialCondition initial;
    long window_lo = -100;
    std::size_t window_sites = 200;
    double t0 = 0.0;
    double t1 = 10.0;
    double snapshot_step = 1.0;
    std::size_t phases = 1;
};

struct FrontParams {
    double gamma = 2.0;
    double delta = 0.05;
    std::vector<double> tau_schedule = {25.0, 50.0, 100.0, 200.0};
    double eval_start = 25.0;
    double eval_end = 200.0;
    double eval_step = 2.5;
    std::size_t phases = 4;
    double theta = 0.5;
    double tol_pb = kDefaultPullbackTol;
    long window_lo = 0;
    std::size_t window_sites = 0;
    double speed_window_r = 20.0;
    std::vector<double> stationarity_times; // optional extra checks
};

struct SpreadParams {
    double box_height = 0.5;
    double box_half_width = 5.0;
    long window_lo = -2000;
    std::size_t window_sites = 4000;
    double horizon = 300.0;
    double snapshot_step = 2.0;
    double delta0 = 0.0;
    double interior_fraction = 0.5;
};

struct SpeedParams {
    std::optional<double> lambda_least; // else derived from the medium
    std::optional<double> gamma;        // also report the decay pair
    bool curve_csv = false;
    double mu_min = 0.05;
    double mu_max = 3.0;
    double mu_step = 0.01;
};

struct OracleParams {
    std::vector<double> lambdas = {0.25, 0.75, 1.0, 3.0};
    double scan_step = 1e-6;
};

struct DumpParams {
    double t0 = 0.0;
    double t1 = 10.0;
    double step = 0.01;
};

struct SolverParams {
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step = 0.5;
    bool dense_output = true;
    bool parallel_kernels = false;
};

struct RunConfig {
    int schema_version = 1;
    ExperimentKind experiment = ExperimentKind::Check;
    std::optional<MediumSpec> medium;
    Horizon horizon{-250.0, 250.0};
    bool horizon_set = false;
    SolverParams solver;

    SimulateParams simulate;
    FrontParams front;
    SpreadParams spread;
    SpeedParams speed;
    OracleParams oracle;
    DumpParams dump;

    nlohmann::json raw; // config snapshot for the manifest

    IntegratorOptions integrator_options() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

} // namespace latfront
