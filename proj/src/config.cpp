#include "treebench/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace treebench {

namespace {

using nlohmann::json;

json model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["kind"] = spec.kind;
    if (spec.kind == "tree") {
        j["max_depth"] = spec.tree_params.max_depth;
        j["min_samples_split"] = spec.tree_params.min_samples_split;
    } else {
        j["n_trees"] = spec.forest_params.n_trees;
        j["max_depth"] = spec.forest_params.max_depth;
        j["min_samples_split"] = spec.forest_params.min_samples_split;
        j["feature_subsample"] = spec.forest_params.feature_subsample;
        j["bootstrap"] = spec.forest_params.bootstrap;
    }
    return j;
}

ModelSpec model_spec_from_json(const json& j) {
    ModelSpec spec;
    spec.kind = j.value("kind", "tree");
    if (spec.kind != "tree" && spec.kind != "forest") {
        throw std::runtime_error("config: unknown model kind '" + spec.kind + "'");
    }
    if (spec.kind == "tree") {
        spec.tree_params.max_depth = j.value("max_depth", std::size_t{2});
        spec.tree_params.min_samples_split = j.value("min_samples_split", std::size_t{2});
    } else {
        spec.forest_params.n_trees = j.value("n_trees", std::size_t{100});
        spec.forest_params.max_depth = j.value("max_depth", std::size_t{2});
        spec.forest_params.min_samples_split = j.value("min_samples_split", std::size_t{2});
        spec.forest_params.feature_subsample = j.value("feature_subsample", std::size_t{0});
        spec.forest_params.bootstrap = j.value("bootstrap", true);
    }
    return spec;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (output_dir.empty()) {
        throw std::runtime_error("config: output_dir is required");
    }
    if (!datasets.synthetic_grid && datasets.real.empty()) {
        throw std::runtime_error("config: no datasets selected");
    }
    if (explainers.empty()) {
        throw std::runtime_error("config: at least one explainer is required");
    }
    if (metrics.list.empty()) {
        throw std::runtime_error("config: at least one metric is required");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::runtime_error("config: test_fraction must be in (0,1)");
    }
    if (background_size == 0 || max_explain == 0) {
        throw std::runtime_error("config: background_size and max_explain must be >= 1");
    }
    if (jobs == 0) {
        throw std::runtime_error("config: jobs must be >= 1");
    }
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["version"] = cfg.version;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir.string();

    json ds;
    ds["synthetic_grid"] = cfg.datasets.synthetic_grid;
    ds["n"] = cfg.datasets.n;
    if (!cfg.datasets.subset.empty()) ds["subset"] = cfg.datasets.subset;
    if (!cfg.datasets.real.empty()) {
        json real = json::array();
        for (const auto& r : cfg.datasets.real) {
            real.push_back({{"name", r.name},
                            {"csv", r.csv.string()},
                            {"config", r.config.string()}});
        }
        ds["real"] = real;
    }
    j["datasets"] = ds;

    json model;
    model["spec"] = model_spec_to_json(cfg.model.spec);
    model["cv_folds"] = cfg.model.cv_folds;
    if (!cfg.model.grid.empty()) {
        json grid = json::array();
        for (const auto& cell : cfg.model.grid) grid.push_back(model_spec_to_json(cell));
        model["grid"] = grid;
    }
    j["model"] = model;

    json expl = json::array();
    for (Method m : cfg.explainers) expl.push_back(to_string(m));
    j["explainers"] = expl;

    j["explainer_config"] = {{"coalition_samples", cfg.explainer.coalition_samples},
                             {"enumerate_coalitions", cfg.explainer.enumerate_coalitions},
                             {"permutation_samples", cfg.explainer.permutation_samples},
                             {"enumerate_permutations", cfg.explainer.enumerate_permutations},
                             {"neighborhood_size", cfg.explainer.neighborhood_size},
                             {"kernel_width", cfg.explainer.kernel_width},
                             {"neighbor_count", cfg.explainer.neighbor_count},
                             {"ridge_lambda", cfg.explainer.ridge_lambda},
                             {"logodds_output", cfg.explainer.logodds_output}};
    j["background_size"] = cfg.background_size;
    j["max_explain"] = cfg.max_explain;

    j["metrics"] = {{"list", cfg.metrics.list},
                    {"top_k", cfg.metrics.top_k},
                    {"stability_neighbors", cfg.metrics.stability_neighbors},
                    {"compactness_threshold", cfg.metrics.compactness_threshold}};

    j["ground_truth_mode"] = to_string(cfg.ground_truth_mode);
    j["test_fraction"] = cfg.test_fraction;
    j["stratified_split"] = cfg.stratified_split;
    j["jobs"] = cfg.jobs;
    return j.dump(2);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.version = j.value("version", 1);
    if (cfg.version != 1) {
        throw std::runtime_error("config: unsupported version " + std::to_string(cfg.version));
    }
    if (!j.contains("seed")) {
        throw std::runtime_error("config: explicit seed is required");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.output_dir = j.value("output_dir", "");

    if (j.contains("datasets")) {
        const json& ds = j.at("datasets");
        cfg.datasets.synthetic_grid = ds.value("synthetic_grid", true);
        cfg.datasets.n = ds.value("n", std::size_t{1000});
        if (ds.contains("subset")) {
            cfg.datasets.subset = ds.at("subset").get<std::vector<std::string>>();
        }
        if (ds.contains("real")) {
            for (const auto& r : ds.at("real")) {
                RealDatasetRef ref;
                ref.name = r.at("name").get<std::string>();
                ref.csv = r.at("csv").get<std::string>();
                ref.config = r.at("config").get<std::string>();
                cfg.datasets.real.push_back(std::move(ref));
            }
        }
    }

    if (j.contains("model")) {
        const json& model = j.at("model");
        if (model.contains("spec")) cfg.model.spec = model_spec_from_json(model.at("spec"));
        cfg.model.cv_folds = model.value("cv_folds", std::size_t{10});
        if (model.contains("grid")) {
            for (const auto& cell : model.at("grid")) {
                cfg.model.grid.push_back(model_spec_from_json(cell));
            }
        }
    }

    if (j.contains("explainers")) {
        cfg.explainers.clear();
        for (const auto& name : j.at("explainers")) {
            cfg.explainers.push_back(method_from_string(name.get<std::string>()));
        }
    }

    if (j.contains("explainer_config")) {
        const json& e = j.at("explainer_config");
        auto& ec = cfg.explainer;
        ec.coalition_samples = e.value("coalition_samples", ec.coalition_samples);
        ec.enumerate_coalitions = e.value("enumerate_coalitions", ec.enumerate_coalitions);
        ec.permutation_samples = e.value("permutation_samples", ec.permutation_samples);
        ec.enumerate_permutations =
            e.value("enumerate_permutations", ec.enumerate_permutations);
        ec.neighborhood_size = e.value("neighborhood_size", ec.neighborhood_size);
        ec.kernel_width = e.value("kernel_width", ec.kernel_width);
        ec.neighbor_count = e.value("neighbor_count", ec.neighbor_count);
        ec.ridge_lambda = e.value("ridge_lambda", ec.ridge_lambda);
        ec.logodds_output = e.value("logodds_output", ec.logodds_output);
    }
    cfg.background_size = j.value("background_size", cfg.background_size);
    cfg.max_explain = j.value("max_explain", cfg.max_explain);

    if (j.contains("metrics")) {
        const json& m = j.at("metrics");
        if (m.contains("list")) cfg.metrics.list = m.at("list").get<std::vector<std::string>>();
        cfg.metrics.top_k = m.value("top_k", cfg.metrics.top_k);
        cfg.metrics.stability_neighbors =
            m.value("stability_neighbors", cfg.metrics.stability_neighbors);
        cfg.metrics.compactness_threshold =
            m.value("compactness_threshold", cfg.metrics.compactness_threshold);
    }

    cfg.ground_truth_mode =
        ground_truth_mode_from_string(j.value("ground_truth_mode", "paper-literal"));
    cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
    cfg.stratified_split = j.value("stratified_split", cfg.stratified_split);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config not found: " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return experiment_config_from_json(text);
}

}  // namespace treebench
