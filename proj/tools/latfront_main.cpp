#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "latfront/errors.hpp"
#include "latfront/runconfig.hpp"
#include "latfront/runner.hpp"

namespace {

int dispatch(const std::string& subcommand, const std::string& config_path,
             const std::string& out_dir, long seed_override, int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
    using namespace latfront;

    if (subcommand == "list") {
        auto entries = list_runs(out_dir);
        std::printf("%-40s %-12s %-8s %s\n", "run", "experiment", "intact", "issues");
        for (const auto& e : entries) {
            std::string issues;
            for (const auto& s : e.issues) {
                if (!issues.empty()) issues += "; ";
                issues += s;
            }
            std::printf("%-40s %-12s %-8s %s\n",
                        e.dir.filename().string().c_str(), e.experiment.c_str(),
                        e.manifest_ok && e.hashes_ok ? "yes" : "NO",
                        issues.c_str());
        }
        return 0;
    }

    RunConfig cfg = load_config(config_path);
    if (experiment_from_string(subcommand) != cfg.experiment)
        throw ConfigError("config experiment '" +
                          std::string(to_string(cfg.experiment)) +
                          "' does not match subcommand '" + subcommand + "'");
    if (seed_override >= 0) {
        if (!cfg.medium) throw ConfigError("--seed given but config has no medium");
        cfg.medium->seed = static_cast<std::uint64_t>(seed_override);
        cfg.raw["seed"] = cfg.medium->seed;
    }
    const auto dir = run(cfg, out_dir);
    std::printf("run complete: %s\n", dir.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"latfront: transition fronts of two-species competition "
                 "lattice systems in random media"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "runs";
    long seed_override = -1;
    int threads = 0;

    const std::vector<std::string> names = {"check",  "equilibria", "speed",
                                            "simulate", "front",    "spread",
                                            "oracle", "medium-dump", "list"};
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        if (name != "list")
            sub->add_option("--config", config_path, "JSON run configuration")
                ->required();
        sub->add_option("--out", out_dir, "output root directory");
        sub->add_option("--seed", seed_override, "override the medium seed");
        sub->add_option("--threads", threads, "OpenMP thread count (0 = default)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        return dispatch(sub == "equilibria" ? "check" : sub, config_path, out_dir,
                        seed_override, threads);
    } catch (const latfront::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const latfront::HypothesisError& e) {
        std::cerr << "hypothesis failure: " << e.what() << "\n";
        return 3;
    } catch (const latfront::AnsatzError& e) {
        std::cerr << "ansatz refused: " << e.what() << "\n";
        return 4;
    } catch (const latfront::NumericalError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
