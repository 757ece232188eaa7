#include "latfront/runner.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "latfront/csvio.hpp"
#include "latfront/dispersion.hpp"
#include "latfront/errors.hpp"
#include "latfront/hashing.hpp"
#include "latfront/oracle.hpp"

namespace latfront {

namespace fs = std::filesystem;

namespace {

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t hash_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot hash missing file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << j.dump(2) << '\n';
}

nlohmann::json stats_json(const StepStats& s) {
    return {{"accepted", s.accepted},
            {"rejected", s.rejected},
            {"rhs_evals", s.rhs_evals},
            {"min_step", s.min_step},
            {"max_step", s.max_step}};
}

nlohmann::json report_json(const HypothesisReport& r) {
    return {{"lambda1_least", r.lambda1_least},
            {"lambda2_least", r.lambda2_least},
            {"h2_instability", r.h2_instability},
            {"h2_stability", r.h2_stability},
            {"h3_b2_inf", r.h3_b2_inf},
            {"h3_b1c1_margin", r.h3_b1c1_margin},
            {"h3_b2c2_margin", r.h3_b2c2_margin},
            {"h3_ordering_margin", r.h3_ordering_margin},
            {"h1_pass", r.h1_pass},
            {"h2_pass", r.h2_pass},
            {"h3_pass", r.h3_pass},
            {"all_pass", r.all_pass()}};
}

struct RunContext {
    fs::path dir;
    std::vector<std::string> outputs;
    nlohmann::json verdicts = nlohmann::json::object();

    fs::path file(const std::string& name) {
        outputs.push_back(name);
        return dir / name;
    }
};

Horizon default_horizon(const RunConfig& cfg) {
    if (cfg.horizon_set) return cfg.horizon;
    switch (cfg.experiment) {
        case ExperimentKind::Front: {
            double tau_max = 0.0;
            for (double tau : cfg.front.tau_schedule) tau_max = std::max(tau_max, tau);
            return {-tau_max - 10.0, cfg.front.eval_end + 10.0};
        }
        case ExperimentKind::Spread:
            return {-10.0, cfg.spread.horizon + 10.0};
        case ExperimentKind::Simulate:
            return {cfg.simulate.t0 - 10.0, cfg.simulate.t1 + 10.0};
        default:
            return {0.0, 200.0};
    }
}

void run_check(const RunConfig& cfg, RunContext& ctx) {
    const Medium medium(*cfg.medium);
    const Horizon horizon = default_horizon(cfg);
    EquilibriumBundle bundle = build_equilibria(medium, horizon);

    CsvWriter csv(ctx.file("equilibria.csv"),
                  {"t", "u_star", "v_star", "h", "lambda"});
    const double step = std::max(0.1, horizon.span() / 5000.0);
    for (double t = horizon.t0; t <= horizon.t1 + 1e-9; t += step) {
        const double vs = bundle.v_star(t);
        const double lam = medium.channel(Channel::A1, t) -
                           medium.channel(Channel::C1, t) * vs;
        csv.row({t, bundle.u_star(t), vs, bundle.h(t), lam});
    }
    csv.close();

    nlohmann::json rep = report_json(bundle.report);
    rep["lambda_least"] = bundle.lambda_least;
    write_json(ctx.file("hypotheses.json"), rep);
    ctx.verdicts["hypotheses_all_pass"] = bundle.report.all_pass();
    if (!bundle.report.all_pass())
        throw HypothesisError("check: hypotheses fail on this medium");
}

void run_speed(const RunConfig& cfg, RunContext& ctx) {
    double lambda_least;
    if (cfg.speed.lambda_least) {
        lambda_least = *cfg.speed.lambda_least;
    } else {
        const Medium medium(*cfg.medium);
        const Horizon horizon = default_horizon(cfg);
        lambda_least = build_equilibria(medium, horizon).lambda_least;
    }
    const SpeedReport rep = critical_speed(lambda_least);
    nlohmann::json out{{"lambda_least", rep.lambda_least},
                       {"c0", rep.c0},
                       {"mu_star", rep.mu_star},
                       {"foc_residual", rep.foc_residual},
                       {"tol", rep.tol}};
    if (cfg.speed.gamma) {
        const DecayPair pair = decay_rates_for_speed(lambda_least, *cfg.speed.gamma);
        out["gamma"] = pair.gamma;
        out["mu_minus"] = pair.mu_minus;
        out["mu_plus"] = pair.mu_plus;
        out["mu_tilde"] = select_mu_tilde(pair.mu_minus, rep.mu_star);
    }
    write_json(ctx.file("speed.json"), out);
    if (cfg.speed.curve_csv) {
        CsvWriter csv(ctx.file("curve.csv"), {"mu", "c"});
        for (double mu = cfg.speed.mu_min; mu <= cfg.speed.mu_max + 1e-12;
             mu += cfg.speed.mu_step)
            csv.row({mu, wave_speed_curve(lambda_least, mu)});
        csv.close();
    }
    ctx.verdicts["c0"] = rep.c0;
}

void run_simulate(const RunConfig& cfg, RunContext& ctx) {
    const Medium medium(*cfg.medium);
    const auto& sp = cfg.simulate;
    const Horizon horizon = default_horizon(cfg);
    EquilibriumBundle bundle = build_equilibria(medium, horizon);

    LatticeSystem system;
    system.medium = medium;
    if (sp.frame == "competition") {
        system.kind = SystemKind::Competition;
    } else if (sp.frame == "linearized-u") {
        system.kind = SystemKind::LinearizedU;
    } else {
        system.kind = SystemKind::Cooperative;
    }
    system.v_star = &bundle.v_star;

    const bool compact = sp.initial.type == "box" || sp.initial.type == "gaussian";
    if (compact || system.kind == SystemKind::LinearizedU) {
        system.boundary.left = [](double, double) { return std::make_pair(0.0, 0.0); };
        system.boundary.right = [](double, double) { return std::make_pair(0.0, 0.0); };
    } else {
        system.boundary =
            equilibrium_boundary(system.kind, &bundle.u_star, &bundle.v_star);
    }

    const auto& ic = sp.initial;
    auto u0 = [&ic](double x) -> double {
        if (ic.type == "homogeneous") return ic.u_value;
        if (ic.type == "box")
            return std::abs(x - ic.center) <= ic.half_width ? ic.u_value : 0.0;
        if (ic.type == "gaussian")
            return ic.u_value *
                   std::exp(-0.5 * (x - ic.center) * (x - ic.center) /
                            (ic.width * ic.width));
        return ic.u_value * std::min(1.0, std::exp(-ic.mu * (x - ic.center)));
    };
    auto v0 = [&ic, &u0](double x) -> double {
        return ic.u_value > 0.0 ? ic.v_value * u0(x) / ic.u_value
                                : ic.v_value;
    };

    std::vector<double> times;
    for (double t = sp.t0; t <= sp.t1 + 1e-9; t += sp.snapshot_step)
        times.push_back(t);

    auto trajs = integrate_offset_family(system, u0, v0, sp.window_lo,
                                         sp.window_sites, sp.phases, sp.t0, sp.t1,
                                         times, cfg.integrator_options());

    const std::size_t n_snap = trajs.front().snapshots.size();
    for (std::size_t s = 0; s < n_snap; ++s) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%03zu.csv", s);
        CsvWriter csv(ctx.file(name), {"i", "x", "u", "v"});
        for (std::size_t k = 0; k < trajs.size(); ++k) {
            const LatticeState& st = trajs[k].snapshots[s];
            for (std::size_t j = 0; j < st.size(); ++j)
                csv.row({static_cast<double>(st.first_index + (long)j),
                         st.site_pos(j), st.u[j], st.v[j]});
        }
        csv.close();
    }

    nlohmann::json run_info{{"seed", cfg.medium->seed},
                            {"frame", sp.frame},
                            {"rtol", cfg.solver.rtol},
                            {"atol", cfg.solver.atol},
                            {"snapshots", n_snap},
                            {"stats", stats_json(trajs.front().stats)}};
    write_json(ctx.file("run.json"), run_info);
    ctx.verdicts["snapshots"] = n_snap;
}

void run_front(const RunConfig& cfg, RunContext& ctx) {
    const Medium medium(*cfg.medium);
    const auto& fp = cfg.front;
    const Horizon horizon = default_horizon(cfg);
    auto bundle = std::make_shared<EquilibriumBundle>(build_equilibria(medium, horizon));

    AnsatzOptions aopts;
    aopts.delta = fp.delta;
    const WaveAnsatz ansatz = build_ansatz(bundle, fp.gamma, aopts);

    FrontRunConfig rc;
    rc.tau_schedule = fp.tau_schedule;
    rc.eval_start = fp.eval_start;
    rc.eval_end = fp.eval_end;
    rc.eval_step = fp.eval_step;
    rc.phases = fp.phases;
    rc.theta = fp.theta;
    rc.tol_pb = fp.tol_pb;
    rc.window_lo = fp.window_lo;
    rc.window_sites = fp.window_sites;
    rc.solver = cfg.integrator_options();
    const FrontProfile front = pullback_front(ansatz, rc);

    // Final profile with the sandwich functions alongside.
    {
        const TimeSlice& slice = front.slices.back();
        CsvWriter csv(ctx.file("profile.csv"),
                      {"x", "phi", "psi", "u_super", "v_super", "u_sub", "v_sub"});
        const double s_t = ansatz.speed_integral(slice.t);
        for (std::size_t j = 0; j < slice.phi.size(); ++j) {
            const double x = slice.x_at(j);
            auto [us, vs] = ansatz.super_at(x + s_t, slice.t);
            auto [ub, vb] = ansatz.sub_at(x + s_t, slice.t);
            csv.row({x, slice.phi[j], slice.psi[j], us, vs, ub, vb});
        }
        csv.close();
    }
    {
        CsvWriter csv(ctx.file("speed.csv"),
                      {"t", "X_u", "X_v", "inst_speed", "integrated_speed"});
        for (std::size_t s = 0; s < front.slices.size(); ++s) {
            const double t = front.slices[s].t;
            csv.row({t, front.x_u[s], front.x_v[s], ansatz.instantaneous_speed(t),
                     front.speed_path[s]});
        }
        csv.close();
    }

    std::vector<double> slice_times;
    for (const auto& s : front.slices) slice_times.push_back(s.t);
    const SpeedMeasurement speed = least_mean_speed(
        slice_times, front.x_u, fp.speed_window_r, fp.gamma, fp.theta);
    const LimitDiagnostics limits = profile_limits(front, ansatz);

    nlohmann::json verdict{
        {"converged", front.converged},
        {"convergence_gap", front.convergence_gap},
        {"pullback_uptick", front.pullback_uptick},
        {"profile_uptick", front.profile_uptick},
        {"sandwich_violation", front.sandwich_violation},
        {"least_mean_speed",
         {{"estimate", speed.estimate},
          {"target", speed.target},
          {"window_r", speed.window_r}}},
        {"limits",
         {{"left_dev_u", limits.left_dev_u},
          {"left_dev_v", limits.left_dev_v},
          {"right_max_u", limits.right_max_u},
          {"right_max_v", limits.right_max_v},
          {"tail_ratio_u", limits.tail_ratio_u}}},
        {"ansatz",
         {{"gamma", ansatz.gamma},
          {"mu", ansatz.mu},
          {"mu_tilde", ansatz.mu_tilde},
          {"mu_star", ansatz.mu_star},
          {"c0", ansatz.c0},
          {"lambda_least", ansatz.lambda_least},
          {"K", ansatz.K},
          {"k_hat", ansatz.k_hat},
          {"d", ansatz.d},
          {"d_omega", ansatz.d_omega},
          {"sigma", ansatz.sigma},
          {"a_sup", ansatz.a_sup},
          {"min_slack", ansatz.min_slack}}},
        {"stats", stats_json(front.stats)}};

    if (!fp.stationarity_times.empty()) {
        nlohmann::json st = nlohmann::json::array();
        for (double t : fp.stationarity_times) {
            const StationarityResult r = stationarity_check(medium, fp.gamma, t, rc);
            st.push_back({{"t", t},
                          {"residual_u", r.residual_u},
                          {"residual_v", r.residual_v}});
        }
        verdict["stationarity"] = st;
    }

    write_json(ctx.file("verdict.json"), verdict);
    ctx.verdicts["front_converged"] = front.converged;
    ctx.verdicts["least_mean_speed"] = speed.estimate;
}

void run_spread(const RunConfig& cfg, RunContext& ctx) {
    const Medium medium(*cfg.medium);
    const Horizon horizon = default_horizon(cfg);
    EquilibriumBundle bundle = build_equilibria(medium, horizon);

    SpreadConfig sc;
    sc.box_height = cfg.spread.box_height;
    sc.box_half_width = cfg.spread.box_half_width;
    sc.window_lo = cfg.spread.window_lo;
    sc.window_sites = cfg.spread.window_sites;
    sc.horizon = cfg.spread.horizon;
    sc.snapshot_step = cfg.spread.snapshot_step;
    sc.level_delta0 = cfg.spread.delta0;
    sc.interior_fraction = cfg.spread.interior_fraction;
    sc.solver = cfg.integrator_options();
    const SpreadReport rep = spreading_speed(bundle, sc);

    CsvWriter csv(ctx.file("spread.csv"),
                  {"t", "left_edge", "right_edge", "slope_fit"});
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        // Running right-edge slope over the trailing half of the data so far.
        double slope = std::numeric_limits<double>::quiet_NaN();
        if (i >= 3) {
            const std::size_t start = (i + 1) / 2;
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const auto n = static_cast<double>(i + 1 - start);
            for (std::size_t k = start; k <= i; ++k) {
                sx += rep.times[k];
                sy += rep.right_edge[k];
                sxx += rep.times[k] * rep.times[k];
                sxy += rep.times[k] * rep.right_edge[k];
            }
            slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        }
        csv.row({rep.times[i], rep.left_edge[i], rep.right_edge[i], slope});
    }
    csv.close();

    nlohmann::json out{{"delta0", rep.delta0},
                       {"c0_target", rep.c0_target},
                       {"slope_right", rep.slope_right},
                       {"slope_left", rep.slope_left},
                       {"slope_se", rep.slope_se},
                       {"estimate", rep.estimate},
                       {"interior_deviation", rep.interior_deviation},
                       {"stats", stats_json(rep.stats)}};
    write_json(ctx.file("spread.json"), out);
    ctx.verdicts["spread_estimate"] = rep.estimate;
    ctx.verdicts["c0_target"] = rep.c0_target;
}

void run_oracle(const RunConfig& cfg, RunContext& ctx) {
    fs::create_directories(ctx.dir / "fixtures");
    nlohmann::json disp = nlohmann::json::array();
    for (double lam : cfg.oracle.lambdas) {
        const auto scan = oracle::dispersion_grid_scan(lam, cfg.oracle.scan_step);
        disp.push_back({{"lambda_least", lam},
                        {"c0", scan.c0},
                        {"mu_star", scan.mu_star},
                        {"scan_step", cfg.oracle.scan_step}});
    }
    write_json(ctx.file("fixtures/dispersion.json"), disp);

    CoefficientSet coeffs{1.0, 1.0, 0.5, 0.5, 1.0, 1.0};
    if (cfg.medium) {
        const Medium m(*cfg.medium);
        coeffs = m.coeffs_at(0.0);
    }
    const auto forms = oracle::constant_reference(coeffs, cfg.oracle.scan_step);
    write_json(ctx.file("fixtures/closed_forms.json"),
               {{"u_star", forms.u_star},
                {"v_star", forms.v_star},
                {"lambda", forms.lambda},
                {"kappa", forms.kappa},
                {"h", forms.h},
                {"c0_scan", forms.c0_scan},
                {"mu_star_scan", forms.mu_star_scan}});

    const auto curves = oracle::window_mean_scan(
        [](double t) { return 1.0 + 0.5 * std::sin(t); }, 60.0,
        {5.0, 10.0, 20.0, 40.0});
    nlohmann::json means = nlohmann::json::array();
    for (std::size_t i = 0; i < curves.r.size(); ++i)
        means.push_back({{"r", curves.r[i]},
                         {"least", curves.least[i]},
                         {"greatest", curves.greatest[i]}});
    write_json(ctx.file("fixtures/mean_curves.json"), means);

    nlohmann::json inputs{{"lambdas", cfg.oracle.lambdas},
                          {"scan_step", cfg.oracle.scan_step},
                          {"coeffs", {coeffs.a1, coeffs.b1, coeffs.c1, coeffs.a2,
                                      coeffs.b2, coeffs.c2}}};
    write_json(ctx.file("fixtures/inputs.json"),
               {{"inputs", inputs}, {"input_hash", hex64(fnv1a64(inputs.dump()))}});
    ctx.verdicts["fixtures"] = 4;
}

void run_medium_dump(const RunConfig& cfg, RunContext& ctx) {
    const Medium medium(*cfg.medium);
    CsvWriter csv(ctx.file("medium.csv"),
                  {"t", "a1", "b1", "c1", "a2", "b2", "c2"});
    for (double t = cfg.dump.t0; t <= cfg.dump.t1 + 1e-12; t += cfg.dump.step) {
        const CoefficientSet c = medium.coeffs_at(t);
        csv.row({t, c.a1, c.b1, c.c1, c.a2, c.b2, c.c2});
    }
    csv.close();
    ctx.verdicts["dumped"] = true;
}

} // namespace

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j{{"config", config},
                     {"tool_version", tool_version},
                     {"started_at", started_at},
                     {"wall_seconds", wall_seconds},
                     {"tolerances", tolerances},
                     {"verdicts", verdicts}};
    j["outputs"] = nlohmann::json::array();
    for (const auto& f : outputs)
        j["outputs"].push_back(
            {{"path", f.path}, {"bytes", f.bytes}, {"fnv64", f.fnv64}});
    return j;
}

std::filesystem::path run(const RunConfig& cfg, const fs::path& out_root) {
    fs::create_directories(out_root);
    static int counter = 0;
    const auto pid = static_cast<long>(::getpid());
    fs::path tmp;
    do {
        tmp = out_root / (".tmp-" + std::to_string(pid) + "-" +
                          std::to_string(counter++));
    } while (fs::exists(tmp));
    fs::create_directory(tmp);

    RunContext ctx;
    ctx.dir = tmp;
    const auto t_start = std::chrono::steady_clock::now();
    const std::string started = iso_now();

    std::exception_ptr failure;
    try {
        switch (cfg.experiment) {
            case ExperimentKind::Check: run_check(cfg, ctx); break;
            case ExperimentKind::Speed: run_speed(cfg, ctx); break;
            case ExperimentKind::Simulate: run_simulate(cfg, ctx); break;
            case ExperimentKind::Front: run_front(cfg, ctx); break;
            case ExperimentKind::Spread: run_spread(cfg, ctx); break;
            case ExperimentKind::Oracle: run_oracle(cfg, ctx); break;
            case ExperimentKind::MediumDump: run_medium_dump(cfg, ctx); break;
        }
    } catch (const HypothesisError&) {
        // Failing verdicts still produce a complete, inspectable run.
        failure = std::current_exception();
    } catch (...) {
        // Anything else aborts the run; never publish a partial directory.
        std::error_code ec;
        fs::remove_all(tmp, ec);
        throw;
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();

    RunManifest manifest;
    manifest.config = cfg.raw;
    manifest.tool_version = kToolVersion;
    manifest.started_at = started;
    manifest.wall_seconds = wall;
    manifest.tolerances = {{"rtol", cfg.solver.rtol},
                           {"atol", cfg.solver.atol},
                           {"tol_quad", kDefaultQuadTol},
                           {"tol_eq", kDefaultEqTol},
                           {"tol_opt", kDefaultOptTol},
                           {"tol_pb", cfg.front.tol_pb},
                           {"state_tol", kDefaultStateTol}};
    manifest.verdicts = ctx.verdicts;
    for (const auto& name : ctx.outputs) {
        const fs::path p = ctx.dir / name;
        manifest.outputs.push_back(
            OutputRecord{name, fs::file_size(p), hex64(hash_file(p))});
    }
    write_json(tmp / "manifest.json", manifest.to_json());

    // Stage complete; publish under a deterministic name.
    const std::string config_tag = hex64(fnv1a64(cfg.raw.dump())).substr(0, 12);
    fs::path final_dir;
    for (int k = 1;; ++k) {
        std::string name = std::string(to_string(cfg.experiment)) + "-" + config_tag;
        if (k > 1) name += "-" + std::to_string(k);
        final_dir = out_root / name;
        if (!fs::exists(final_dir)) break;
    }
    fs::rename(tmp, final_dir);
    if (failure) std::rethrow_exception(failure);
    return final_dir;
}

std::vector<RunEntry> list_runs(const fs::path& out_root) {
    std::vector<RunEntry> entries;
    if (!fs::exists(out_root)) return entries;
    for (const auto& e : fs::directory_iterator(out_root)) {
        if (!e.is_directory()) continue;
        const fs::path mf = e.path() / "manifest.json";
        if (!fs::exists(mf)) continue;
        RunEntry entry;
        entry.dir = e.path();
        try {
            std::ifstream in(mf);
            nlohmann::json j = nlohmann::json::parse(in);
            entry.experiment = j.at("config").at("experiment").get<std::string>();
            entry.manifest_ok = true;
            entry.hashes_ok = true;
            for (const auto& out : j.at("outputs")) {
                const fs::path p = e.path() / out.at("path").get<std::string>();
                if (!fs::exists(p)) {
                    entry.hashes_ok = false;
                    entry.issues.push_back("missing: " + p.filename().string());
                    continue;
                }
                if (hex64(hash_file(p)) != out.at("fnv64").get<std::string>()) {
                    entry.hashes_ok = false;
                    entry.issues.push_back("hash mismatch: " + p.filename().string());
                }
            }
        } catch (const std::exception& ex) {
            entry.manifest_ok = false;
            entry.issues.push_back(std::string("corrupt manifest: ") + ex.what());
        }
        entries.push_back(std::move(entry));
    }
    std::sort(entries.begin(), entries.end(),
              [](const RunEntry& a, const RunEntry& b) { return a.dir < b.dir; });
    return entries;
}

} // namespace latfront
