#include "latfront/runconfig.hpp"

#include <fstream>

#include "latfront/errors.hpp"

namespace latfront {

namespace {

void reject_unknown(const nlohmann::json& j,
                    std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
T positive(const T& v, const char* what) {
    if (!(v > 0)) throw ConfigError(std::string(what) + " must be positive");
    return v;
}

InitialCondition parse_initial(const nlohmann::json& j) {
    reject_unknown(j,
                   {"type", "u", "v", "half_width", "center", "width", "mu"},
                   "params.initial");
    InitialCondition ic;
    ic.type = j.value("type", std::string("box"));
    if (ic.type != "homogeneous" && ic.type != "box" && ic.type != "gaussian" &&
        ic.type != "exponential")
        throw ConfigError("params.initial.type must be homogeneous|box|gaussian|exponential");
    ic.u_value = j.value("u", 0.5);
    ic.v_value = j.value("v", 0.0);
    ic.half_width = j.value("half_width", 5.0);
    ic.center = j.value("center", 0.0);
    ic.width = j.value("width", 10.0);
    ic.mu = j.value("mu", 0.5);
    if (ic.u_value < 0.0 || ic.v_value < 0.0)
        throw ConfigError("params.initial: densities must be nonnegative");
    return ic;
}

} // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Check: return "check";
        case ExperimentKind::Speed: return "speed";
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Front: return "front";
        case ExperimentKind::Spread: return "spread";
        case ExperimentKind::Oracle: return "oracle";
        case ExperimentKind::MediumDump: return "medium-dump";
    }
    return "check";
}

ExperimentKind experiment_from_string(const std::string& name) {
    if (name == "check" || name == "equilibria") return ExperimentKind::Check;
    if (name == "speed") return ExperimentKind::Speed;
    if (name == "simulate") return ExperimentKind::Simulate;
    if (name == "front") return ExperimentKind::Front;
    if (name == "spread") return ExperimentKind::Spread;
    if (name == "oracle") return ExperimentKind::Oracle;
    if (name == "medium-dump") return ExperimentKind::MediumDump;
    throw ConfigError("unknown experiment kind: " + name);
}

IntegratorOptions RunConfig::integrator_options() const {
    IntegratorOptions o;
    o.rtol = solver.rtol;
    o.atol = solver.atol;
    o.max_step = solver.max_step;
    o.dense_output = solver.dense_output;
    o.exec = solver.parallel_kernels ? Exec::OpenMP : Exec::Serial;
    return o;
}

RunConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown(j,
                   {"schema_version", "experiment", "medium", "horizon", "seed",
                    "solver", "params"},
                   "config");
    RunConfig cfg;
    cfg.raw = j;
    cfg.schema_version = j.value("schema_version", 1);
    if (cfg.schema_version != 1)
        throw ConfigError("unsupported schema_version (expected 1)");
    if (!j.contains("experiment"))
        throw ConfigError("config: missing 'experiment'");
    cfg.experiment = experiment_from_string(j.at("experiment").get<std::string>());

    if (j.contains("medium")) {
        MediumSpec spec = MediumSpec::from_json(j.at("medium"));
        if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
        cfg.medium = spec;
    } else if (j.contains("seed")) {
        throw ConfigError("config: 'seed' given without a medium");
    }

    if (j.contains("horizon")) {
        const auto& h = j.at("horizon");
        reject_unknown(h, {"t0", "t1"}, "horizon");
        cfg.horizon.t0 = h.at("t0").get<double>();
        cfg.horizon.t1 = h.at("t1").get<double>();
        if (!(cfg.horizon.t1 > cfg.horizon.t0))
            throw ConfigError("horizon: t1 must exceed t0");
        cfg.horizon_set = true;
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        reject_unknown(s, {"rtol", "atol", "max_step", "dense_output", "parallel"},
                       "solver");
        cfg.solver.rtol = positive(s.value("rtol", cfg.solver.rtol), "solver.rtol");
        cfg.solver.atol = positive(s.value("atol", cfg.solver.atol), "solver.atol");
        cfg.solver.max_step =
            positive(s.value("max_step", cfg.solver.max_step), "solver.max_step");
        cfg.solver.dense_output = s.value("dense_output", true);
        cfg.solver.parallel_kernels = s.value("parallel", false);
    }

    const nlohmann::json params =
        j.contains("params") ? j.at("params") : nlohmann::json::object();

    const bool needs_medium = cfg.experiment != ExperimentKind::Oracle &&
                              !(cfg.experiment == ExperimentKind::Speed &&
                                params.contains("lambda_least"));
    if (needs_medium && !cfg.medium)
        throw ConfigError("config: this experiment requires a medium");

    switch (cfg.experiment) {
        case ExperimentKind::Check: {
            reject_unknown(params, {}, "params (check)");
            break;
        }
        case ExperimentKind::Speed: {
            reject_unknown(params,
                           {"lambda_least", "gamma", "curve_csv", "mu_min",
                            "mu_max", "mu_step"},
                           "params (speed)");
            if (params.contains("lambda_least"))
                cfg.speed.lambda_least = params.at("lambda_least").get<double>();
            if (params.contains("gamma")) {
                cfg.speed.gamma = params.at("gamma").get<double>();
                if (!(*cfg.speed.gamma > 0.0))
                    throw ConfigError("params.gamma must be positive");
            }
            cfg.speed.curve_csv = params.value("curve_csv", false);
            cfg.speed.mu_min = positive(params.value("mu_min", 0.05), "mu_min");
            cfg.speed.mu_max = positive(params.value("mu_max", 3.0), "mu_max");
            cfg.speed.mu_step = positive(params.value("mu_step", 0.01), "mu_step");
            break;
        }
        case ExperimentKind::Simulate: {
            reject_unknown(params,
                           {"frame", "initial", "window_lo", "window_sites", "t0",
                            "t1", "snapshot_step", "phases"},
                           "params (simulate)");
            auto& sp = cfg.simulate;
            sp.frame = params.value("frame", std::string("cooperative"));
            if (sp.frame != "cooperative" && sp.frame != "competition" &&
                sp.frame != "linearized-u")
                throw ConfigError("params.frame must be cooperative|competition|linearized-u");
            if (params.contains("initial"))
                sp.initial = parse_initial(params.at("initial"));
            sp.window_lo = params.value("window_lo", sp.window_lo);
            sp.window_sites = params.value("window_sites", sp.window_sites);
            positive(sp.window_sites, "window_sites");
            sp.t0 = params.value("t0", sp.t0);
            sp.t1 = params.value("t1", sp.t1);
            if (!(sp.t1 > sp.t0)) throw ConfigError("simulate: t1 must exceed t0");
            sp.snapshot_step =
                positive(params.value("snapshot_step", sp.snapshot_step),
                         "snapshot_step");
            sp.phases = params.value("phases", sp.phases);
            positive(sp.phases, "phases");
            break;
        }
        case ExperimentKind::Front: {
            reject_unknown(params,
                           {"gamma", "delta", "tau_schedule", "eval_start",
                            "eval_end", "eval_step", "phases", "theta", "tol_pb",
                            "window_lo", "window_sites", "speed_window_r",
                            "stationarity_times"},
                           "params (front)");
            auto& fp = cfg.front;
            fp.gamma = params.value("gamma", fp.gamma);
            positive(fp.gamma, "gamma");
            fp.delta = params.value("delta", fp.delta);
            if (!(fp.delta > 0.0 && fp.delta < 1.0))
                throw ConfigError("params.delta must be in (0,1)");
            if (params.contains("tau_schedule")) {
                fp.tau_schedule =
                    params.at("tau_schedule").get<std::vector<double>>();
                if (fp.tau_schedule.empty())
                    throw ConfigError("params.tau_schedule must not be empty");
            }
            fp.eval_start = params.value("eval_start", fp.eval_start);
            fp.eval_end = params.value("eval_end", fp.eval_end);
            fp.eval_step = positive(params.value("eval_step", fp.eval_step),
                                    "eval_step");
            fp.phases = params.value("phases", fp.phases);
            positive(fp.phases, "phases");
            fp.theta = params.value("theta", fp.theta);
            if (!(fp.theta > 0.0 && fp.theta < 1.0))
                throw ConfigError("params.theta must be in (0,1)");
            fp.tol_pb = positive(params.value("tol_pb", fp.tol_pb), "tol_pb");
            fp.window_lo = params.value("window_lo", fp.window_lo);
            fp.window_sites = params.value("window_sites", fp.window_sites);
            fp.speed_window_r =
                positive(params.value("speed_window_r", fp.speed_window_r),
                         "speed_window_r");
            if (params.contains("stationarity_times"))
                fp.stationarity_times =
                    params.at("stationarity_times").get<std::vector<double>>();
            break;
        }
        case ExperimentKind::Spread: {
            reject_unknown(params,
                           {"box_height", "box_half_width", "window_lo",
                            "window_sites", "horizon", "snapshot_step", "delta0",
                            "interior_fraction"},
                           "params (spread)");
            auto& sp = cfg.spread;
            sp.box_height =
                positive(params.value("box_height", sp.box_height), "box_height");
            sp.box_half_width = positive(
                params.value("box_half_width", sp.box_half_width), "box_half_width");
            sp.window_lo = params.value("window_lo", sp.window_lo);
            sp.window_sites = params.value("window_sites", sp.window_sites);
            positive(sp.window_sites, "window_sites");
            sp.horizon = positive(params.value("horizon", sp.horizon), "horizon");
            sp.snapshot_step = positive(
                params.value("snapshot_step", sp.snapshot_step), "snapshot_step");
            sp.delta0 = params.value("delta0", 0.0);
            sp.interior_fraction =
                params.value("interior_fraction", sp.interior_fraction);
            if (!(sp.interior_fraction > 0.0 && sp.interior_fraction < 1.0))
                throw ConfigError("params.interior_fraction must be in (0,1)");
            break;
        }
        case ExperimentKind::Oracle: {
            reject_unknown(params, {"lambdas", "scan_step"}, "params (oracle)");
            if (params.contains("lambdas"))
                cfg.oracle.lambdas = params.at("lambdas").get<std::vector<double>>();
            cfg.oracle.scan_step =
                positive(params.value("scan_step", 1e-6), "scan_step");
            break;
        }
        case ExperimentKind::MediumDump: {
            reject_unknown(params, {"t0", "t1", "step"}, "params (medium-dump)");
            cfg.dump.t0 = params.value("t0", cfg.dump.t0);
            cfg.dump.t1 = params.value("t1", cfg.dump.t1);
            if (!(cfg.dump.t1 > cfg.dump.t0))
                throw ConfigError("medium-dump: t1 must exceed t0");
            cfg.dump.step = positive(params.value("step", cfg.dump.step), "step");
            break;
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    try {
        return parse_config(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config schema error in " + path + ": " + e.what());
    }
}

} // namespace latfront
