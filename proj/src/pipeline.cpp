#include "treebench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "treebench/csv.hpp"
#include "treebench/digest.hpp"
#include "treebench/encode.hpp"
#include "treebench/explainers.hpp"
#include "treebench/resample.hpp"
#include "treebench/rng.hpp"
#include "treebench/synth.hpp"
#include "treebench/version.hpp"

namespace treebench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Index-based worker pool. Tasks must be independent; the first exception
// wins and is rethrown on the caller thread after joining.
void parallel_for(std::size_t n_tasks, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
    if (n_tasks == 0) return;
    if (jobs <= 1 || n_tasks == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const std::size_t workers = std::min(jobs, n_tasks);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_tasks) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Digest of the configuration with the execution-only knobs (output_dir,
// jobs) removed, so identical experiments share artifacts no matter where
// or how parallel they run.
std::string run_digest(const ExperimentConfig& cfg) {
    ExperimentConfig canonical = cfg;
    canonical.output_dir = "_";
    canonical.jobs = 1;
    return digest_hex(experiment_config_to_json(canonical));
}

std::string file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string model_label(const ModelSpec& spec) {
    if (spec.kind == "tree") {
        return "tree_d" + std::to_string(spec.tree_params.max_depth);
    }
    return "forest_d" + std::to_string(spec.forest_params.max_depth) + "_t" +
           std::to_string(spec.forest_params.n_trees);
}

// Everything later stages need about one dataset.
struct DatasetCell {
    std::string name;
    bool synthetic = false;
    std::optional<SyntheticSpec> spec;
    std::size_t real_index = 0;  // into cfg.datasets.real when !synthetic
    Dataset data;                // encoded, finite
    SplitIndices split_indices;
    Dataset train;
    Dataset explained;  // materialized explained test rows
    Model model;
    std::string label;
    Background background;
    std::optional<GroundTruthAttribution> gt;
    std::uint64_t seed = 0;  // dataset-local seed root
    std::string dataset_digest;
    std::string model_digest;
};

struct ExplainCellResult {
    std::vector<Attribution> batch;
    std::size_t failures = 0;
};

}  // namespace

Stage stage_from_string(const std::string& s) {
    if (s == "generate") return Stage::generate;
    if (s == "train") return Stage::train;
    if (s == "explain") return Stage::explain;
    if (s == "evaluate") return Stage::evaluate;
    if (s == "report") return Stage::report;
    throw std::invalid_argument("unknown stage '" + s + "'");
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["config_digest"] = config_digest;
    j["framework_version"] = framework_version;
    j["ok"] = ok;
    nlohmann::json stages_json = nlohmann::json::array();
    for (const auto& s : stages) {
        stages_json.push_back({{"name", s.name},
                               {"artifacts", s.artifacts},
                               {"wall_seconds", s.wall_seconds},
                               {"cached", s.cached},
                               {"error", s.error}});
    }
    j["stages"] = stages_json;
    return j.dump(2);
}

void RunManifest::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write manifest " + path.string());
    }
    out << to_json() << '\n';
}

RunManifest run_pipeline(const ExperimentConfig& cfg, Stage stop_after) {
    cfg.validate();
    const auto out_dir = cfg.output_dir;
    std::filesystem::create_directories(out_dir / "datasets");
    std::filesystem::create_directories(out_dir / "models");
    std::filesystem::create_directories(out_dir / "attributions");
    std::filesystem::create_directories(out_dir / "reports");

    RunManifest manifest;
    manifest.config_digest = run_digest(cfg);
    manifest.framework_version = kVersion;
    std::mutex manifest_mutex;

    const auto finish = [&](StageRecord record, Clock::time_point start) {
        std::sort(record.artifacts.begin(), record.artifacts.end());
        record.wall_seconds = seconds_since(start);
        manifest.stages.push_back(std::move(record));
    };
    const auto stop_here = [&](Stage stage) {
        manifest.save(out_dir / "manifest.json");
        return stop_after == stage;
    };

    // On a hard failure the manifest keeps the stage name and whatever
    // artifacts were already persisted.
    std::string current_stage = "generate";
    try {

    // ---- generate --------------------------------------------------------
    auto stage_start = Clock::now();
    StageRecord generate_record;
    generate_record.name = "generate";
    generate_record.cached = true;

    std::vector<DatasetCell> cells;
    if (cfg.datasets.synthetic_grid) {
        for (const auto& spec : enumerate_grid(cfg.datasets.n, cfg.seed)) {
            const std::string name = spec_digest(spec);
            if (!cfg.datasets.subset.empty()) {
                bool keep = false;
                for (const auto& want : cfg.datasets.subset) {
                    if (name.rfind(want, 0) == 0) {
                        keep = true;
                        break;
                    }
                }
                if (!keep) continue;
            }
            DatasetCell cell;
            cell.name = name;
            cell.synthetic = true;
            cell.spec = spec;
            cells.push_back(std::move(cell));
        }
        if (cells.empty()) {
            throw std::runtime_error("pipeline: dataset subset selected nothing");
        }
    }
    for (std::size_t r = 0; r < cfg.datasets.real.size(); ++r) {
        DatasetCell cell;
        cell.name = cfg.datasets.real[r].name;
        cell.synthetic = false;
        cell.real_index = r;
        cells.push_back(std::move(cell));
    }

    parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
        DatasetCell& cell = cells[i];
        cell.seed = derive_seed(cfg.seed, fnv1a64(cell.name));
        if (cell.synthetic) {
            cell.data = generate(*cell.spec);
            cell.dataset_digest = digest_hex(spec_digest(*cell.spec));
            cell.gt = ground_truth(*cell.spec, cfg.ground_truth_mode);
        } else {
            const auto& ref = cfg.datasets.real[cell.real_index];
            const DatasetConfig ds_cfg = load_dataset_config(ref.config);
            const Dataset raw = load_csv(ref.csv, ds_cfg.schema);
            cell.data = encode(raw).dataset;
            cell.dataset_digest = digest_hex(file_bytes(ref.csv) + file_bytes(ref.config));
        }

        const auto path =
            out_dir / "datasets" / (cell.name + "__" + cell.dataset_digest + ".csv");
        bool wrote = false;
        if (!std::filesystem::exists(path)) {
            save_csv(cell.data, path);
            wrote = true;
        }
        std::lock_guard lock(manifest_mutex);
        if (wrote) generate_record.cached = false;
        generate_record.artifacts.push_back(path.string());
    });

    // Grid manifest: every generated spec digest in one structured file.
    if (cfg.datasets.synthetic_grid) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& cell : cells) {
            if (cell.synthetic) list.push_back(cell.name);
        }
        nlohmann::json grid_json{{"n_datasets", list.size()}, {"specs", list}, {"seed", cfg.seed}};
        const auto path =
            out_dir / "datasets" / ("grid_manifest__" + manifest.config_digest + ".json");
        if (!std::filesystem::exists(path)) {
            std::ofstream out(path);
            out << grid_json.dump(2) << '\n';
            generate_record.cached = false;
        }
        generate_record.artifacts.push_back(path.string());
    }

    finish(std::move(generate_record), stage_start);
    if (stop_here(Stage::generate)) return manifest;

    // ---- train -----------------------------------------------------------
    current_stage = "train";
    stage_start = Clock::now();
    StageRecord train_record;
    train_record.name = "train";
    train_record.cached = true;

    const std::string model_section_json = [&] {
        nlohmann::json j;
        j["cv_folds"] = cfg.model.cv_folds;
        j["spec"] = model_label(cfg.model.spec);
        j["grid"] = nlohmann::json::array();
        for (const auto& cell : cfg.model.grid) j["grid"].push_back(model_label(cell));
        return j.dump();
    }();

    parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
        DatasetCell& cell = cells[i];
        cell.split_indices = split(cell.data, cfg.test_fraction,
                                   derive_seed(cell.seed, 0x5b11), cfg.stratified_split);
        cell.train = take_rows(cell.data, cell.split_indices.train);

        ModelSpec chosen = cfg.model.spec;
        if (!cfg.model.grid.empty()) {
            const auto gs = grid_search(cell.train, cfg.model.grid, cfg.model.cv_folds,
                                        derive_seed(cell.seed, 0x62d5));
            chosen = cfg.model.grid[gs.best_index];
        }
        cell.label = model_label(chosen);
        cell.model_digest = digest_hex(cell.dataset_digest + model_section_json + cell.label +
                                       std::to_string(cfg.seed));

        const auto path = out_dir / "models" /
                          (cell.name + "__" + cell.label + "__" + cell.model_digest + ".json");
        bool wrote = false;
        if (std::filesystem::exists(path)) {
            cell.model = load_model(path);
        } else {
            cell.model = fit_model(cell.train, chosen, derive_seed(cell.seed, 0xf17));
            save_model(cell.model, path);
            wrote = true;
        }

        // Explained subset: the first max_explain test rows (the split is
        // already a seeded permutation, so this is a uniform subsample).
        const std::size_t n_explained = std::min(cfg.max_explain, cell.split_indices.test.size());
        const std::vector<std::size_t> explained_rows(
            cell.split_indices.test.begin(),
            cell.split_indices.test.begin() + static_cast<std::ptrdiff_t>(n_explained));
        cell.explained = take_rows(cell.data, explained_rows);

        cell.background =
            sample_background(cell.train.features, std::min(cfg.background_size, cell.train.n()),
                              derive_seed(cell.seed, 0xb9));

        std::lock_guard lock(manifest_mutex);
        if (wrote) train_record.cached = false;
        train_record.artifacts.push_back(path.string());
    });

    finish(std::move(train_record), stage_start);
    if (stop_here(Stage::train)) return manifest;

    // ---- explain: one task per (dataset, method) --------------------------
    current_stage = "explain";
    stage_start = Clock::now();
    StageRecord explain_record;
    explain_record.name = "explain";
    explain_record.cached = true;

    const std::string explainer_cfg_json = [&] {
        nlohmann::json j;
        j["coalition_samples"] = cfg.explainer.coalition_samples;
        j["enumerate_coalitions"] = cfg.explainer.enumerate_coalitions;
        j["permutation_samples"] = cfg.explainer.permutation_samples;
        j["enumerate_permutations"] = cfg.explainer.enumerate_permutations;
        j["neighborhood_size"] = cfg.explainer.neighborhood_size;
        j["kernel_width"] = cfg.explainer.kernel_width;
        j["neighbor_count"] = cfg.explainer.neighbor_count;
        j["ridge_lambda"] = cfg.explainer.ridge_lambda;
        j["logodds_output"] = cfg.explainer.logodds_output;
        j["background_size"] = cfg.background_size;
        j["max_explain"] = cfg.max_explain;
        return j.dump();
    }();

    const std::size_t n_methods = cfg.explainers.size();
    std::vector<std::vector<ExplainCellResult>> results(
        cells.size(), std::vector<ExplainCellResult>(n_methods));

    parallel_for(cells.size() * n_methods, cfg.jobs, [&](std::size_t task) {
        const std::size_t d = task / n_methods;
        const std::size_t m = task % n_methods;
        DatasetCell& cell = cells[d];
        const Method method = cfg.explainers[m];
        const std::string cell_digest =
            digest_hex(cell.model_digest + explainer_cfg_json + to_string(method));
        const auto path = out_dir / "attributions" /
                          (cell.name + "__" + to_string(method) + "__" + cell_digest + ".csv");

        ExplainCellResult& slot = results[d][m];
        bool wrote = false;
        if (std::filesystem::exists(path)) {
            slot.batch = load_attributions(path);
        } else {
            ExplainerConfig local = cfg.explainer;
            local.seed = derive_seed(cell.seed, fnv1a64(to_string(method)));
            ExplainContext ctx;
            ctx.train_features = &cell.train.features;
            ctx.background = &cell.background;
            const auto outcomes =
                explain_batch(method, cell.model, cell.explained.features, ctx, local);
            std::string first_error;
            for (const auto& outcome : outcomes) {
                if (outcome.attribution) {
                    slot.batch.push_back(*outcome.attribution);
                } else {
                    ++slot.failures;
                    if (first_error.empty()) first_error = outcome.error;
                }
            }
            if (slot.batch.empty()) {
                throw std::runtime_error("explain: every instance failed for " +
                                         to_string(method) + " on " + cell.name + ": " +
                                         first_error);
            }
            save_attributions(
                slot.batch, path,
                {{"dataset", cell.name},
                 {"method", to_string(method)},
                 {"model", cell.label},
                 {"config_digest", manifest.config_digest},
                 {"seed",
                  std::to_string(derive_seed(cell.seed, fnv1a64(to_string(method))))}});
            wrote = true;
        }
        std::lock_guard lock(manifest_mutex);
        if (wrote) explain_record.cached = false;
        explain_record.artifacts.push_back(path.string());
        if (slot.failures > 0) {
            explain_record.error += cell.name + "/" + to_string(method) + ": " +
                                    std::to_string(slot.failures) + " instance failures; ";
        }
    });

    finish(std::move(explain_record), stage_start);
    if (stop_here(Stage::explain)) return manifest;

    // ---- evaluate: metrics fold (sequential, deterministic order) ---------
    current_stage = "evaluate";
    stage_start = Clock::now();
    StageRecord evaluate_record;
    evaluate_record.name = "evaluate";

    const auto has_metric = [&](const std::string& name) {
        return std::find(cfg.metrics.list.begin(), cfg.metrics.list.end(), name) !=
               cfg.metrics.list.end();
    };

    MetricReport report;
    std::vector<ShareSample> boxplot;
    std::vector<AgreementMatrix> heatmaps;

    for (std::size_t d = 0; d < cells.size(); ++d) {
        const DatasetCell& cell = cells[d];
        const std::size_t m_features = cell.data.n_features();

        // Keep only instances every method explained so cross-method
        // metrics stay aligned.
        std::map<std::size_t, std::size_t> coverage;
        for (std::size_t m = 0; m < n_methods; ++m) {
            for (const auto& a : results[d][m].batch) ++coverage[a.instance_id];
        }
        std::vector<std::size_t> kept_ids;
        for (const auto& [id, count] : coverage) {
            if (count == n_methods) kept_ids.push_back(id);
        }
        if (kept_ids.empty()) {
            evaluate_record.error += cell.name + ": no instance explained by all methods; ";
            continue;
        }

        std::vector<std::vector<const Attribution*>> aligned(
            n_methods, std::vector<const Attribution*>(kept_ids.size(), nullptr));
        for (std::size_t m = 0; m < n_methods; ++m) {
            std::map<std::size_t, const Attribution*> by_id;
            for (const auto& a : results[d][m].batch) by_id[a.instance_id] = &a;
            for (std::size_t i = 0; i < kept_ids.size(); ++i) {
                aligned[m][i] = by_id.at(kept_ids[i]);
            }
        }

        std::vector<std::vector<NormalizedAttribution>> normalized(n_methods);
        for (std::size_t m = 0; m < n_methods; ++m) {
            normalized[m].reserve(kept_ids.size());
            for (const Attribution* a : aligned[m]) normalized[m].push_back(normalize(*a));
        }

        Matrix kept_features(kept_ids.size(), m_features);
        std::vector<int> kept_predicted(kept_ids.size());
        for (std::size_t i = 0; i < kept_ids.size(); ++i) {
            for (std::size_t j = 0; j < m_features; ++j) {
                kept_features(i, j) = cell.explained.features(kept_ids[i], j);
            }
            kept_predicted[i] = cell.model.predict(kept_features.row(i));
        }
        const TrainingStats scale = training_stats(cell.train.features);

        // Model-level rows (accuracy, impurity importances).
        report.add(cell.name, cell.label, "_model", "test_accuracy", "mean",
                   cell.model.accuracy_on(cell.data, cell.split_indices.test));
        const auto importance = cell.model.importance();
        for (std::size_t f = 0; f < m_features; ++f) {
            report.add(cell.name, cell.label, "_model",
                       "gini_importance_" + cell.data.feature_names[f], "mean", importance[f]);
        }

        const PredictFn prob_fn = predict_fn(cell.model, false);
        for (std::size_t m = 0; m < n_methods; ++m) {
            const std::string method = to_string(cfg.explainers[m]);

            if (has_metric("consistency")) {
                if (n_methods > 1) {
                    aggregate_into(report, cell.name, cell.label, method,
                                   "consistency_pairwise", pairwise_consistency(normalized, m));
                }
                if (cell.gt) {
                    std::vector<double> vs_gt;
                    vs_gt.reserve(kept_ids.size());
                    for (const auto& na : normalized[m]) {
                        vs_gt.push_back(consistency(na.shares, cell.gt->normalized));
                    }
                    aggregate_into(report, cell.name, cell.label, method, "consistency_gt",
                                   vs_gt);
                }
            }

            if (has_metric("stability") && kept_ids.size() >= 2) {
                const std::size_t k =
                    std::min(cfg.metrics.stability_neighbors, kept_ids.size() - 1);
                std::vector<double> values;
                values.reserve(kept_ids.size());
                for (std::size_t i = 0; i < kept_ids.size(); ++i) {
                    values.push_back(stability(normalized[m], kept_features, kept_predicted,
                                               scale, i, k)
                                         .value);
                }
                aggregate_into(report, cell.name, cell.label, method, "stability", values);
            }

            if (has_metric("compactness")) {
                std::vector<CompactnessCurve> curves;
                std::vector<double> dist1;
                curves.reserve(kept_ids.size());
                for (std::size_t i = 0; i < kept_ids.size(); ++i) {
                    curves.push_back(compactness(prob_fn, kept_features.row(i), *aligned[m][i],
                                                 cell.background,
                                                 cfg.metrics.compactness_threshold));
                    dist1.push_back(curves.back().output_distance[0]);
                }
                const auto summary =
                    summarize_compactness(curves, cfg.metrics.compactness_threshold);
                report.add(cell.name, cell.label, method, "features_for_90pct", "mean",
                           static_cast<double>(summary.k_needed));
                report.add(cell.name, cell.label, method, "fidelity_at_5", "mean",
                           summary.fidelity_at_5);
                aggregate_into(report, cell.name, cell.label, method,
                               "distance_with_1_feature", dist1);
            }

            for (std::size_t i = 0; i < kept_ids.size(); ++i) {
                for (std::size_t f = 0; f < m_features; ++f) {
                    boxplot.push_back({cell.name, method, cell.data.feature_names[f],
                                       kept_ids[i], normalized[m][i].shares[f]});
                }
            }
        }

        const bool want_fa = has_metric("feature_agreement");
        const bool want_ra = has_metric("rank_agreement");
        if ((want_fa || want_ra) && n_methods > 1) {
            const std::size_t k = std::min(cfg.metrics.top_k, m_features);
            std::vector<std::vector<std::vector<std::size_t>>> rankings(n_methods);
            for (std::size_t m = 0; m < n_methods; ++m) {
                rankings[m].reserve(kept_ids.size());
                for (const auto& na : normalized[m]) {
                    rankings[m].push_back(rank_features(na.shares));
                }
            }
            for (const auto kind : {std::string("feature"), std::string("rank")}) {
                if (kind == "feature" && !want_fa) continue;
                if (kind == "rank" && !want_ra) continue;
                AgreementMatrix matrix;
                matrix.dataset = cell.name;
                matrix.kind = kind;
                matrix.k = k;
                for (std::size_t m = 0; m < n_methods; ++m) {
                    matrix.methods.push_back(to_string(cfg.explainers[m]));
                }
                matrix.values = Matrix(n_methods, n_methods);
                for (std::size_t a = 0; a < n_methods; ++a) {
                    for (std::size_t b = 0; b < n_methods; ++b) {
                        std::vector<double> per_instance;
                        per_instance.reserve(kept_ids.size());
                        for (std::size_t i = 0; i < kept_ids.size(); ++i) {
                            per_instance.push_back(
                                kind == "feature"
                                    ? feature_agreement(rankings[a][i], rankings[b][i], k)
                                    : rank_agreement(rankings[a][i], rankings[b][i], k));
                        }
                        double mean = 0.0;
                        for (double v : per_instance) mean += v;
                        mean /= static_cast<double>(per_instance.size());
                        matrix.values(a, b) = mean;
                        if (a < b) {
                            aggregate_into(report, cell.name, cell.label,
                                           matrix.methods[a] + "|" + matrix.methods[b],
                                           kind + "_agreement", per_instance);
                        }
                    }
                }
                heatmaps.push_back(std::move(matrix));
            }
        }
    }

    const auto metrics_csv = out_dir / "reports" / ("metrics__" + manifest.config_digest + ".csv");
    const auto metrics_json =
        out_dir / "reports" / ("metrics__" + manifest.config_digest + ".json");
    evaluate_record.cached =
        std::filesystem::exists(metrics_csv) && std::filesystem::exists(metrics_json);
    if (!evaluate_record.cached) {
        save_metric_report_csv(report, metrics_csv);
        save_metric_report_json(report, metrics_json);
    }
    evaluate_record.artifacts.push_back(metrics_csv.string());
    evaluate_record.artifacts.push_back(metrics_json.string());

    finish(std::move(evaluate_record), stage_start);
    if (stop_here(Stage::evaluate)) return manifest;

    // ---- report: presentation layouts -------------------------------------
    current_stage = "report";
    stage_start = Clock::now();
    StageRecord report_record;
    report_record.name = "report";

    const auto table_path =
        out_dir / "reports" / ("summary_table__" + manifest.config_digest + ".csv");
    const auto boxplot_path =
        out_dir / "reports" / ("boxplot__" + manifest.config_digest + ".csv");
    const auto heatmap_path =
        out_dir / "reports" / ("heatmap__" + manifest.config_digest + ".csv");

    report_record.cached = std::filesystem::exists(table_path) &&
                           std::filesystem::exists(boxplot_path) &&
                           (heatmaps.empty() || std::filesystem::exists(heatmap_path));
    if (!report_record.cached) {
        emit_report(report, ReportLayout::summary_table, table_path);
        emit_boxplot_data(boxplot, boxplot_path);
        if (!heatmaps.empty()) emit_heatmap_data(heatmaps, heatmap_path);
    }
    report_record.artifacts.push_back(table_path.string());
    report_record.artifacts.push_back(boxplot_path.string());
    if (!heatmaps.empty()) report_record.artifacts.push_back(heatmap_path.string());

    finish(std::move(report_record), stage_start);
    manifest.save(out_dir / "manifest.json");
    return manifest;

    } catch (const std::exception& e) {
        StageRecord failed;
        failed.name = current_stage;
        failed.error = e.what();
        manifest.stages.push_back(std::move(failed));
        manifest.ok = false;
        manifest.save(out_dir / "manifest.json");
        throw std::runtime_error("stage '" + current_stage + "' failed: " + e.what());
    }
}

namespace {

// Random tree over M features with given depth bound; leaf values are
// class-count ratios so prediction matches the fitted-tree code path.
TreeModel random_tree(Rng& rng, std::size_t m, std::size_t max_depth) {
    std::vector<TreeNode> nodes;
    const std::function<int(std::size_t)> grow = [&](std::size_t depth) -> int {
        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        const bool leaf = depth >= max_depth || rng.bernoulli(0.25);
        if (leaf) {
            nodes[id].class_counts = {1 + rng.below(20), 1 + rng.below(20)};
            nodes[id].samples = nodes[id].class_counts[0] + nodes[id].class_counts[1];
            return id;
        }
        nodes[id].feature = static_cast<int>(rng.below(m));
        nodes[id].threshold = -1.0 + 2.0 * rng.uniform();
        const int left = grow(depth + 1);
        const int right = grow(depth + 1);
        nodes[id].left = left;
        nodes[id].right = right;
        nodes[id].samples = nodes[static_cast<std::size_t>(left)].samples +
                            nodes[static_cast<std::size_t>(right)].samples;
        nodes[id].class_counts = {
            nodes[static_cast<std::size_t>(left)].class_counts[0] +
                nodes[static_cast<std::size_t>(right)].class_counts[0],
            nodes[static_cast<std::size_t>(left)].class_counts[1] +
                nodes[static_cast<std::size_t>(right)].class_counts[1]};
        return id;
    };
    grow(0);
    return TreeModel(std::move(nodes), m, {0.5, 0.5}, max_depth);
}

}  // namespace

OracleSweepResult validate_oracle(std::size_t n_models, std::uint64_t seed, std::size_t jobs) {
    OracleSweepResult result;
    result.models_checked = n_models;
    std::mutex mutex;

    parallel_for(n_models, jobs, [&](std::size_t i) {
        Rng rng(derive_seed(seed, 0x02ac1e, i));
        const std::size_t m = 2 + rng.below(3);          // 2..4 features
        const std::size_t depth = 1 + rng.below(4);      // 1..4
        const TreeModel tree = random_tree(rng, m, depth);
        const Model model(tree);

        Background bg;
        bg.rows = Matrix(1 + rng.below(32), m);
        for (auto& v : bg.rows.data) v = -1.5 + 3.0 * rng.uniform();

        const PredictFn f = predict_fn(model, false);
        ExplainerConfig cfg;
        cfg.enumerate_coalitions = true;
        cfg.seed = derive_seed(seed, i);

        double worst_tree = 0.0;
        double worst_kernel = 0.0;
        std::vector<double> x(m);
        for (int rep = 0; rep < 3; ++rep) {
            for (auto& v : x) v = -1.5 + 3.0 * rng.uniform();
            const Attribution ex = exact_shapley(f, x, bg);
            const Attribution ts = tree_shap(model, x, bg);
            const Attribution ks = kernel_shap(f, x, bg, cfg);
            for (std::size_t j = 0; j < m; ++j) {
                worst_tree = std::max(worst_tree, std::abs(ts.values[j] - ex.values[j]));
                worst_kernel = std::max(worst_kernel, std::abs(ks.values[j] - ex.values[j]));
            }
        }

        std::lock_guard lock(mutex);
        result.max_tree_shap_error = std::max(result.max_tree_shap_error, worst_tree);
        result.max_kernel_shap_error = std::max(result.max_kernel_shap_error, worst_kernel);
        if (worst_tree > 1e-9) {
            result.ok = false;
            result.failures.push_back("model " + std::to_string(i) +
                                      ": tree_shap error " + std::to_string(worst_tree));
        }
        if (worst_kernel > 1e-6) {
            result.ok = false;
            result.failures.push_back("model " + std::to_string(i) +
                                      ": kernel_shap error " + std::to_string(worst_kernel));
        }
    });
    std::sort(result.failures.begin(), result.failures.end());
    return result;
}

}  // namespace treebench
