#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "treebench/pipeline.hpp"
#include "treebench/version.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::string dataset;
    std::string method;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t jobs = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
    auto* config = cmd->add_option("--config", opts.config_path, "Experiment config (JSON)");
    if (config_required) config->required();
    cmd->add_option("--out", opts.out_dir, "Output directory (overrides config)");
    cmd->add_option("--seed", opts.seed, "RNG seed (overrides config)")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--jobs", opts.jobs, "Parallel worker count (overrides config)");
    cmd->add_option("--dataset", opts.dataset, "Restrict to datasets with this name prefix");
    cmd->add_option("--method", opts.method, "Restrict to one explainer");
}

treebench::ExperimentConfig resolve_config(const CommonOptions& opts) {
    treebench::ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = treebench::load_experiment_config(opts.config_path);
    }
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.jobs > 0) cfg.jobs = opts.jobs;
    if (!opts.dataset.empty()) cfg.datasets.subset = {opts.dataset};
    if (!opts.method.empty()) {
        cfg.explainers = {treebench::method_from_string(opts.method)};
    }
    cfg.validate();
    return cfg;
}

int run_stage(const CommonOptions& opts, treebench::Stage stop_after) {
    const auto cfg = resolve_config(opts);
    const auto manifest = treebench::run_pipeline(cfg, stop_after);
    std::cout << "config digest " << manifest.config_digest << '\n';
    for (const auto& stage : manifest.stages) {
        std::cout << "  " << stage.name << ": " << stage.artifacts.size() << " artifact(s), "
                  << (stage.cached ? "cached" : "computed");
        if (!stage.error.empty()) std::cout << " [" << stage.error << "]";
        std::cout << '\n';
    }
    return manifest.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"treebench: explanation-quality benchmarks for tree models"};
    app.set_version_flag("--version", treebench::kVersion);
    app.require_subcommand(1);

    CommonOptions opts;

    auto* generate = app.add_subcommand("generate", "Write the synthetic grid + manifest");
    add_common(generate, opts, false);
    auto* train = app.add_subcommand("train", "Generate/load datasets and fit models");
    add_common(train, opts, true);
    auto* explain = app.add_subcommand("explain", "Run the configured explainers");
    add_common(explain, opts, true);
    auto* evaluate = app.add_subcommand("evaluate", "Compute metric reports");
    add_common(evaluate, opts, true);
    auto* report = app.add_subcommand("report", "Emit table/plot layouts");
    add_common(report, opts, true);
    auto* run = app.add_subcommand("run", "Full pipeline");
    add_common(run, opts, true);

    auto* oracle =
        app.add_subcommand("validate-oracle", "Explainer-vs-exact-Shapley equivalence sweep");
    std::size_t oracle_models = 200;
    std::uint64_t oracle_seed = 0;
    std::size_t oracle_jobs = 1;
    oracle->add_option("--models", oracle_models, "Randomized models to check");
    oracle->add_option("--seed", oracle_seed, "Sweep seed");
    oracle->add_option("--jobs", oracle_jobs, "Parallel worker count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help / --version
        std::cerr << e.what() << "\n\n" << app.help() << '\n';
        return 2;
    }

    try {
        if (generate->parsed()) {
            // A bare `generate --out dir` writes the default 24-spec grid.
            if (opts.config_path.empty() && opts.out_dir.empty()) {
                std::cerr << "generate: need --config or --out\n";
                return 2;
            }
            return run_stage(opts, treebench::Stage::generate);
        }
        if (train->parsed()) return run_stage(opts, treebench::Stage::train);
        if (explain->parsed()) return run_stage(opts, treebench::Stage::explain);
        if (evaluate->parsed()) return run_stage(opts, treebench::Stage::evaluate);
        if (report->parsed()) return run_stage(opts, treebench::Stage::report);
        if (run->parsed()) return run_stage(opts, treebench::Stage::report);
        if (oracle->parsed()) {
            const auto sweep =
                treebench::validate_oracle(oracle_models, oracle_seed, oracle_jobs);
            std::cout << "oracle sweep: " << sweep.models_checked << " models, max tree_shap "
                      << sweep.max_tree_shap_error << ", max kernel_shap "
                      << sweep.max_kernel_shap_error << '\n';
            for (const auto& failure : sweep.failures) {
                std::cout << "  FAIL " << failure << '\n';
            }
            std::cout << (sweep.ok ? "PASS" : "FAIL") << '\n';
            return sweep.ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
