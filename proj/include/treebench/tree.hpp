#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "treebench/dataset.hpp"

namespace treebench {

// One arena slot. feature < 0 marks a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t samples = 0;
    double gini = 0.0;
    std::array<std::size_t, 2> class_counts{0, 0};

    bool is_leaf() const { return feature < 0; }
};

struct TreeParams {
    std::size_t max_depth = 2;
    std::size_t min_samples_split = 2;
};

class TreeModel {
public:
    TreeModel() = default;
    TreeModel(std::vector<TreeNode> nodes, std::size_t feature_count,
              std::array<double, 2> prior, std::size_t max_depth)
        : nodes_(std::move(nodes)),
          feature_count_(feature_count),
          prior_(prior),
          max_depth_(max_depth) {}

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    static constexpr int root_id() { return 0; }
    std::size_t feature_count() const { return feature_count_; }
    std::size_t max_depth() const { return max_depth_; }
    std::array<double, 2> training_prior() const { return prior_; }

    // Index of the leaf the instance falls into. Split rule: go left when
    // value <= threshold.
    int leaf_for(std::span<const double> x) const;

    // Class-probability pair from the leaf's class frequencies.
    std::array<double, 2> predict_proba(std::span<const double> x) const;
    double prob1(std::span<const double> x) const { return predict_proba(x)[1]; }
    int predict(std::span<const double> x) const { return prob1(x) >= 0.5 ? 1 : 0; }

    // Mean prediction (probability of class 1) at an arbitrary node.
    double node_mean(int node_id) const;

private:
    std::vector<TreeNode> nodes_;
    std::size_t feature_count_ = 0;
    std::array<double, 2> prior_{0.5, 0.5};
    std::size_t max_depth_ = 0;
};

// Greedy CART with the Gini criterion. Candidate thresholds are midpoints
// between consecutive distinct sorted values; a node becomes a leaf at
// max_depth, purity, fewer than min_samples_split rows, or when no split
// has positive Gini decrease.
//
// Exact ties in Gini decrease are broken deterministically: prefer the
// feature used least often on the path from the root, then the lower
// feature index, then the lower threshold. The path-usage rule spreads
// splits across features that carry literally identical information
// (perfectly correlated columns), where any fixed single-feature
// preference would silently absorb all importance.
TreeModel fit_tree(const Dataset& ds, const TreeParams& params, std::uint64_t seed);

// Fraction of correctly classified rows.
double accuracy(const TreeModel& model, const Dataset& ds,
                std::span<const std::size_t> indices = {});

// Mean-decrease-in-impurity importance: per feature, the sum over its
// split nodes of (node_samples/n) * (node_gini - weighted child gini),
// normalized to sum to one (all zeros when the tree has no split).
std::vector<double> gini_importance(const TreeModel& model);

}  // namespace treebench
