#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "treebench/dataset.hpp"
#include "treebench/tree.hpp"

namespace treebench {

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 2;
    std::size_t min_samples_split = 2;
    // Features drawn per split; 0 means ceil(sqrt(M)).
    std::size_t feature_subsample = 0;
    bool bootstrap = true;
};

class ForestModel {
public:
    ForestModel() = default;
    ForestModel(std::vector<TreeModel> trees, std::vector<std::uint64_t> tree_seeds,
                std::size_t feature_subsample)
        : trees_(std::move(trees)),
          tree_seeds_(std::move(tree_seeds)),
          feature_subsample_(feature_subsample) {}

    const std::vector<TreeModel>& trees() const { return trees_; }
    const std::vector<std::uint64_t>& tree_seeds() const { return tree_seeds_; }
    std::size_t feature_subsample() const { return feature_subsample_; }
    std::size_t feature_count() const {
        return trees_.empty() ? 0 : trees_.front().feature_count();
    }

    // Mean of per-tree class probabilities.
    std::array<double, 2> predict_proba(std::span<const double> x) const;
    double prob1(std::span<const double> x) const { return predict_proba(x)[1]; }
    int predict(std::span<const double> x) const { return prob1(x) >= 0.5 ? 1 : 0; }

private:
    std::vector<TreeModel> trees_;
    std::vector<std::uint64_t> tree_seeds_;
    std::size_t feature_subsample_ = 0;
};

// Bagged CART trees: each tree is grown on a bootstrap resample (n draws
// with replacement, unless bootstrap is off) with per-split uniform feature
// subsampling. Deterministic under (dataset, params, seed).
ForestModel fit_forest(const Dataset& ds, const ForestParams& params, std::uint64_t seed);

double accuracy(const ForestModel& model, const Dataset& ds,
                std::span<const std::size_t> indices = {});

// Mean of per-tree normalized Gini importances, renormalized.
std::vector<double> gini_importance(const ForestModel& model);

}  // namespace treebench
