#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "latfront/runconfig.hpp"

namespace latfront {

inline constexpr const char* kToolVersion = "0.1.0";

struct OutputRecord {
    std::string path; // relative to the run directory
    std::uintmax_t bytes = 0;
    std::string fnv64;
};

struct RunManifest {
    nlohmann::json config;
    std::string tool_version;
    std::string started_at;
    double wall_seconds = 0.0;
    nlohmann::json tolerances;
    nlohmann::json verdicts;
    std::vector<OutputRecord> outputs;
    nlohmann::json to_json() const;
};

// Executes the experiment, writing outputs and manifest.json into a fresh
// directory under out_root (staged in a temp dir, renamed when complete).
// Returns the final run directory.
std::filesystem::path run(const RunConfig& cfg, const std::filesystem::path& out_root);

struct RunEntry {
    std::filesystem::path dir;
    std::string experiment;
    bool manifest_ok = false;
    bool hashes_ok = false;
    std::vector<std::string> issues;
};

std::vector<RunEntry> list_runs(const std::filesystem::path& out_root);

} // namespace latfront
