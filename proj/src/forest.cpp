#include "treebench/forest.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tree_internal.hpp"

namespace treebench {

ForestModel fit_forest(const Dataset& ds, const ForestParams& params, std::uint64_t seed) {
    if (params.n_trees < 1) {
        throw std::invalid_argument("fit_forest: n_trees must be >= 1");
    }
    validate(ds);

    const std::size_t m = ds.n_features();
    const std::size_t subsample =
        params.feature_subsample > 0
            ? std::min(params.feature_subsample, m)
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));

    const TreeParams tree_params{params.max_depth, params.min_samples_split};
    std::vector<TreeModel> trees;
    std::vector<std::uint64_t> tree_seeds;
    trees.reserve(params.n_trees);
    tree_seeds.reserve(params.n_trees);

    std::vector<std::size_t> rows(ds.n());
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(seed, 0xf0e5, t);
        Rng rng(tree_seed);
        if (params.bootstrap) {
            for (auto& r : rows) r = rng.below(ds.n());
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        trees.push_back(detail::fit_tree_on(ds, rows, tree_params, subsample, rng));
        tree_seeds.push_back(tree_seed);
    }
    return ForestModel(std::move(trees), std::move(tree_seeds), subsample);
}

std::array<double, 2> ForestModel::predict_proba(std::span<const double> x) const {
    if (trees_.empty()) {
        throw std::logic_error("forest: no trees");
    }
    double p1 = 0.0;
    for (const auto& tree : trees_) p1 += tree.prob1(x);
    p1 /= static_cast<double>(trees_.size());
    return {1.0 - p1, p1};
}

double accuracy(const ForestModel& model, const Dataset& ds,
                std::span<const std::size_t> indices) {
    std::vector<std::size_t> all;
    if (indices.empty()) {
        all.resize(ds.n());
        std::iota(all.begin(), all.end(), std::size_t{0});
        indices = all;
    }
    std::size_t correct = 0;
    for (auto i : indices) {
        if (model.predict(ds.features.row(i)) == ds.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(indices.size());
}

std::vector<double> gini_importance(const ForestModel& model) {
    std::vector<double> imp(model.feature_count(), 0.0);
    for (const auto& tree : model.trees()) {
        const auto tree_imp = gini_importance(tree);
        for (std::size_t f = 0; f < imp.size(); ++f) imp[f] += tree_imp[f];
    }
    const double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (sum > 0.0) {
        for (auto& v : imp) v /= sum;
    }
    return imp;
}

}  // namespace treebench
