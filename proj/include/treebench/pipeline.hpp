#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "treebench/config.hpp"
#include "treebench/metrics.hpp"
#include "treebench/report.hpp"

namespace treebench {

// Pipeline stages in execution order. Stage-wise CLI subcommands stop the
// run after the named stage; caching makes resuming cheap.
enum class Stage { generate, train, explain, evaluate, report };

Stage stage_from_string(const std::string& s);

struct StageRecord {
    std::string name;
    std::vector<std::string> artifacts;
    double wall_seconds = 0.0;
    bool cached = false;
    std::string error;  // empty on success
};

struct RunManifest {
    std::string config_digest;
    std::string framework_version;
    std::vector<StageRecord> stages;
    bool ok = true;

    std::string to_json() const;
    void save(const std::filesystem::path& path) const;
};

// Runs generate -> train -> explain -> evaluate -> report, persisting every
// stage artifact under cfg.output_dir. Artifact filenames embed the digest
// of the producing configuration, so a rerun with an unchanged config skips
// the stage and a changed config regenerates without clobbering old output.
// Fully deterministic under cfg.seed, for any jobs value.
RunManifest run_pipeline(const ExperimentConfig& cfg, Stage stop_after = Stage::report);

// Oracle-equivalence sweep used by `validate-oracle`: randomized trees
// (depth <= 4, M <= 4, backgrounds <= 32 rows) checked elementwise against
// brute-force Shapley values. Returns human-readable per-check lines;
// `ok` aggregates them.
struct OracleSweepResult {
    bool ok = true;
    std::size_t models_checked = 0;
    double max_tree_shap_error = 0.0;
    double max_kernel_shap_error = 0.0;
    std::vector<std::string> failures;
};

OracleSweepResult validate_oracle(std::size_t n_models, std::uint64_t seed,
                                  std::size_t jobs);

}  // namespace treebench
