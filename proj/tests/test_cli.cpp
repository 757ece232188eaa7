#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "latfront/errors.hpp"
#include "latfront/runner.hpp"

using namespace latfront;
using namespace latfront::testing;
namespace fs = std::filesystem;

namespace {

nlohmann::json minimal_config(const std::string& experiment) {
    return nlohmann::json{{"schema_version", 1},
                          {"experiment", experiment},
                          {"medium", canonical_spec().to_json()}};
}

struct TempRoot {
    fs::path dir;
    TempRoot() {
        dir = fs::temp_directory_path() /
              ("latfront-test-" + std::to_string(::getpid()) + "-" +
               std::to_string(counter()++));
        fs::create_directories(dir);
    }
    ~TempRoot() { fs::remove_all(dir); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("minimal constant-medium config parses") {
    const RunConfig cfg = parse_config(minimal_config("check"));
    CHECK(cfg.experiment == ExperimentKind::Check);
    CHECK(cfg.medium.has_value());
}

TEST_CASE("unknown keys and bad parameters are rejected") {
    nlohmann::json j = minimal_config("check");
    j["unexpected"] = 1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    nlohmann::json front = minimal_config("front");
    front["params"] = {{"gamma", -1.0}};
    CHECK_THROWS_AS(parse_config(front), ConfigError);

    nlohmann::json front2 = minimal_config("front");
    front2["params"] = {{"delta", 1.5}};
    CHECK_THROWS_AS(parse_config(front2), ConfigError);

    nlohmann::json sim = minimal_config("simulate");
    sim["params"] = {{"frame", "sideways"}};
    CHECK_THROWS_AS(parse_config(sim), ConfigError);

    nlohmann::json missing{{"schema_version", 1}, {"experiment", "check"}};
    CHECK_THROWS_AS(parse_config(missing), ConfigError);
}

TEST_CASE("medium-dump runs are deterministic and inventoried") {
    TempRoot root;
    nlohmann::json j{{"schema_version", 1},
                     {"experiment", "medium-dump"},
                     {"medium", quasi_periodic_spec().to_json()},
                     {"params", {{"t0", 0.0}, {"t1", 5.0}, {"step", 0.1}}}};
    const RunConfig cfg = parse_config(j);
    const fs::path run1 = run(cfg, root.dir);
    const fs::path run2 = run(cfg, root.dir);
    CHECK(run1 != run2);
    CHECK(slurp(run1 / "medium.csv") == slurp(run2 / "medium.csv"));

    const auto entries = list_runs(root.dir);
    REQUIRE(entries.size() == 2);
    for (const auto& e : entries) {
        CHECK(e.manifest_ok);
        CHECK(e.hashes_ok);
        CHECK(e.experiment == "medium-dump");
    }

    // CSV format: header + deterministic LF rows.
    const std::string csv = slurp(run1 / "medium.csv");
    CHECK(csv.rfind("t,a1,b1,c1,a2,b2,c2\n", 0) == 0);
    CHECK(csv.find("\r") == std::string::npos);
}

TEST_CASE("tampering with outputs is detected by list_runs") {
    TempRoot root;
    nlohmann::json j{{"schema_version", 1},
                     {"experiment", "medium-dump"},
                     {"medium", canonical_spec().to_json()},
                     {"params", {{"t0", 0.0}, {"t1", 1.0}, {"step", 0.5}}}};
    const fs::path dir = run(parse_config(j), root.dir);
    std::ofstream(dir / "medium.csv", std::ios::app) << "tampered\n";
    const auto entries = list_runs(root.dir);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].manifest_ok);
    CHECK(!entries[0].hashes_ok);
    REQUIRE(!entries[0].issues.empty());
    CHECK(entries[0].issues[0].find("hash mismatch") != std::string::npos);
}

TEST_CASE("empty output root lists nothing") {
    TempRoot root;
    CHECK(list_runs(root.dir).empty());
    CHECK(list_runs(root.dir / "missing").empty());
}

TEST_CASE("check run on the canonical medium passes and verifies") {
    TempRoot root;
    nlohmann::json j = minimal_config("check");
    j["horizon"] = {{"t0", 0.0}, {"t1", 80.0}};
    const fs::path dir = run(parse_config(j), root.dir);
    CHECK(fs::exists(dir / "equilibria.csv"));
    CHECK(fs::exists(dir / "hypotheses.json"));
    nlohmann::json rep = nlohmann::json::parse(slurp(dir / "hypotheses.json"));
    CHECK(rep.at("all_pass").get<bool>());
    CHECK(rep.at("lambda_least").get<double>() == doctest::Approx(0.75));
}

TEST_CASE("check on a failing medium throws after writing the report") {
    TempRoot root;
    MediumSpec weak = canonical_spec();
    weak.channels[4] = ChannelSpec::constant(0.3); // (H2) stability fails
    nlohmann::json j{{"schema_version", 1},
                     {"experiment", "check"},
                     {"medium", weak.to_json()},
                     {"horizon", {{"t0", 0.0}, {"t1", 60.0}}}};
    CHECK_THROWS_AS(run(parse_config(j), root.dir), HypothesisError);
    const auto entries = list_runs(root.dir);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].manifest_ok); // verdict recorded, run complete
}

TEST_CASE("subcritical front request aborts without publishing a run") {
    TempRoot root;
    nlohmann::json j = minimal_config("front");
    j["params"] = {{"gamma", 1.0}, // below c0 = 1.781...
                   {"tau_schedule", {5.0}},
                   {"eval_start", 1.0},
                   {"eval_end", 2.0}};
    j["horizon"] = {{"t0", -30.0}, {"t1", 10.0}};
    CHECK_THROWS_WITH_AS(run(parse_config(j), root.dir),
                         doctest::Contains("no supercritical root"), AnsatzError);
    CHECK(list_runs(root.dir).empty());
    // No stray temp directories either.
    for (const auto& e : fs::directory_iterator(root.dir))
        CHECK(e.path().filename().string().rfind(".tmp", 0) != 0);
}

TEST_CASE("speed runs emit the report and optional curve") {
    TempRoot root;
    nlohmann::json j{{"schema_version", 1},
                     {"experiment", "speed"},
                     {"params",
                      {{"lambda_least", 0.75},
                       {"gamma", 2.0},
                       {"curve_csv", true},
                       {"mu_min", 0.1},
                       {"mu_max", 1.5},
                       {"mu_step", 0.1}}}};
    const fs::path dir = run(parse_config(j), root.dir);
    nlohmann::json rep = nlohmann::json::parse(slurp(dir / "speed.json"));
    CHECK(rep.at("c0").get<double>() == doctest::Approx(1.781081826707));
    CHECK(rep.at("mu_minus").get<double>() == doctest::Approx(0.505519165493));
    CHECK(fs::exists(dir / "curve.csv"));

    const auto entries = list_runs(root.dir);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].hashes_ok);
}

TEST_CASE("simulate emits one CSV per snapshot plus a run summary") {
    TempRoot root;
    nlohmann::json j = minimal_config("simulate");
    j["params"] = {{"frame", "cooperative"},
                   {"initial",
                    {{"type", "box"}, {"u", 0.5}, {"v", 0.0}, {"half_width", 3.0}}},
                   {"window_lo", -40},
                   {"window_sites", 80},
                   {"t0", 0.0},
                   {"t1", 2.0},
                   {"snapshot_step", 1.0}};
    const fs::path dir = run(parse_config(j), root.dir);
    CHECK(fs::exists(dir / "snapshot_000.csv"));
    CHECK(fs::exists(dir / "snapshot_001.csv"));
    CHECK(fs::exists(dir / "snapshot_002.csv"));
    nlohmann::json info = nlohmann::json::parse(slurp(dir / "run.json"));
    CHECK(info.at("stats").at("accepted").get<std::size_t>() > 0);
    const std::string csv = slurp(dir / "snapshot_000.csv");
    CHECK(csv.rfind("i,x,u,v\n", 0) == 0);
}

TEST_CASE("front run emits profile, speed series, and verdict") {
    TempRoot root;
    nlohmann::json j = minimal_config("front");
    j["horizon"] = {{"t0", -40.0}, {"t1", 25.0}};
    j["params"] = {{"gamma", 2.0},
                   {"tau_schedule", {10.0, 20.0}},
                   {"eval_start", 4.0},
                   {"eval_end", 20.0},
                   {"eval_step", 2.0},
                   {"phases", 2},
                   {"speed_window_r", 6.0}};
    const fs::path dir = run(parse_config(j), root.dir);
    CHECK(fs::exists(dir / "profile.csv"));
    CHECK(fs::exists(dir / "speed.csv"));
    nlohmann::json v = nlohmann::json::parse(slurp(dir / "verdict.json"));
    CHECK(v.at("least_mean_speed").at("estimate").get<double>() ==
          doctest::Approx(2.0).epsilon(0.02));
    CHECK(v.at("sandwich_violation").get<double>() < 1e-9);
    CHECK(v.at("profile_uptick").get<double>() <= 1e-9);
    CHECK(v.at("ansatz").at("gamma").get<double>() == 2.0);
    const std::string csv = slurp(dir / "speed.csv");
    CHECK(csv.rfind("t,X_u,X_v,inst_speed,integrated_speed\n", 0) == 0);
}

TEST_CASE("spread run emits the edge series and report") {
    TempRoot root;
    nlohmann::json j = minimal_config("spread");
    j["params"] = {{"window_lo", -200},
                   {"window_sites", 400},
                   {"horizon", 50.0},
                   {"snapshot_step", 2.0}};
    j["solver"] = {{"rtol", 1e-7}, {"atol", 1e-9}};
    const fs::path dir = run(parse_config(j), root.dir);
    nlohmann::json rep = nlohmann::json::parse(slurp(dir / "spread.json"));
    CHECK(rep.at("c0_target").get<double>() == doctest::Approx(1.781081826707));
    // Short horizon, loose sanity only.
    CHECK(rep.at("estimate").get<double>() ==
          doctest::Approx(1.78).epsilon(0.08));
    const std::string csv = slurp(dir / "spread.csv");
    CHECK(csv.rfind("t,left_edge,right_edge,slope_fit\n", 0) == 0);
}

TEST_CASE("oracle run regenerates fixtures with an input hash") {
    TempRoot root;
    nlohmann::json j{{"schema_version", 1},
                     {"experiment", "oracle"},
                     {"params", {{"lambdas", {0.75}}, {"scan_step", 1e-4}}}};
    const fs::path dir = run(parse_config(j), root.dir);
    nlohmann::json disp =
        nlohmann::json::parse(slurp(dir / "fixtures" / "dispersion.json"));
    CHECK(disp[0].at("c0").get<double>() == doctest::Approx(1.7810818).epsilon(1e-6));
    nlohmann::json inputs =
        nlohmann::json::parse(slurp(dir / "fixtures" / "inputs.json"));
    CHECK(inputs.contains("input_hash"));
}
