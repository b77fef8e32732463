#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "treebench/attribution.hpp"
#include "treebench/grid_search.hpp"
#include "treebench/synth.hpp"

namespace treebench {

// A real dataset registered for the run: CSV plus its sidecar config.
struct RealDatasetRef {
    std::string name;
    std::filesystem::path csv;
    std::filesystem::path config;
};

struct DatasetSelection {
    bool synthetic_grid = true;
    std::vector<std::string> subset;  // spec digests; empty = whole grid
    std::size_t n = 1000;
    std::vector<RealDatasetRef> real;
};

struct ModelSection {
    ModelSpec spec;                      // used when grid is empty
    std::vector<ModelSpec> grid;         // grid-search lattice, declared order
    std::size_t cv_folds = 10;
};

struct MetricsSection {
    std::vector<std::string> list{"consistency", "stability", "compactness",
                                  "feature_agreement", "rank_agreement"};
    std::size_t top_k = 10;              // clamped to M per dataset
    std::size_t stability_neighbors = 10;
    double compactness_threshold = 0.9;
};

struct ExperimentConfig {
    int version = 1;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
    DatasetSelection datasets;
    ModelSection model;
    std::vector<Method> explainers{Method::kshap, Method::sshap, Method::tshap,
                                   Method::ti,    Method::lime,  Method::lsurro};
    ExplainerConfig explainer;
    std::size_t background_size = 100;
    std::size_t max_explain = 200;  // cap on explained test instances
    MetricsSection metrics;
    GroundTruthMode ground_truth_mode = GroundTruthMode::paper_literal;
    double test_fraction = 0.2;
    bool stratified_split = false;
    std::size_t jobs = 1;

    void validate() const;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const std::string& text);

}  // namespace treebench
