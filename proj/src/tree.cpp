#include "treebench/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tree_internal.hpp"

namespace treebench {

namespace {

double gini_from_counts(std::size_t c0, std::size_t c1) {
    const std::size_t n = c0 + c1;
    if (n == 0) return 0.0;
    const double p0 = static_cast<double>(c0) / static_cast<double>(n);
    const double p1 = static_cast<double>(c1) / static_cast<double>(n);
    return 1.0 - p0 * p0 - p1 * p1;
}

struct SplitChoice {
    bool found = false;
    double decrease = 0.0;
    std::size_t path_uses = 0;
    int feature = -1;
    double threshold = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& ds, const TreeParams& params, std::size_t feature_subsample,
                Rng& rng)
        : ds_(ds), params_(params), feature_subsample_(feature_subsample), rng_(rng) {}

    TreeModel build(std::span<const std::size_t> rows) {
        if (rows.empty()) {
            throw std::invalid_argument("fit_tree: empty dataset");
        }
        std::vector<std::size_t> idx(rows.begin(), rows.end());
        path_uses_.assign(ds_.n_features(), 0);
        grow(idx, 0);

        std::array<std::size_t, 2> root_counts = nodes_[0].class_counts;
        const double total = static_cast<double>(root_counts[0] + root_counts[1]);
        std::array<double, 2> prior{static_cast<double>(root_counts[0]) / total,
                                    static_cast<double>(root_counts[1]) / total};
        return TreeModel(std::move(nodes_), ds_.n_features(), prior, params_.max_depth);
    }

private:
    int grow(std::vector<std::size_t>& idx, std::size_t depth) {
        std::array<std::size_t, 2> counts{0, 0};
        for (auto i : idx) ++counts[static_cast<std::size_t>(ds_.labels[i])];

        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        nodes_[id].samples = idx.size();
        nodes_[id].class_counts = counts;
        nodes_[id].gini = gini_from_counts(counts[0], counts[1]);

        const bool can_split = depth < params_.max_depth &&
                               idx.size() >= params_.min_samples_split &&
                               nodes_[id].gini > 0.0;
        if (!can_split) return id;

        const SplitChoice best = best_split(idx, nodes_[id].gini);
        if (!best.found) return id;

        nodes_[id].feature = best.feature;
        nodes_[id].threshold = best.threshold;

        const auto mid = std::stable_partition(idx.begin(), idx.end(), [&](std::size_t i) {
            return ds_.features(i, static_cast<std::size_t>(best.feature)) <= best.threshold;
        });
        std::vector<std::size_t> left_idx(idx.begin(), mid);
        std::vector<std::size_t> right_idx(mid, idx.end());

        ++path_uses_[static_cast<std::size_t>(best.feature)];
        const int left = grow(left_idx, depth + 1);
        const int right = grow(right_idx, depth + 1);
        --path_uses_[static_cast<std::size_t>(best.feature)];

        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    std::vector<std::size_t> candidate_features() {
        const std::size_t m = ds_.n_features();
        std::vector<std::size_t> feats(m);
        std::iota(feats.begin(), feats.end(), std::size_t{0});
        if (feature_subsample_ == 0 || feature_subsample_ >= m) return feats;
        // Partial Fisher-Yates, then sorted so the scan order (and with it
        // the tie-breaking) never depends on draw order.
        for (std::size_t i = 0; i < feature_subsample_; ++i) {
            std::swap(feats[i], feats[i + rng_.below(m - i)]);
        }
        feats.resize(feature_subsample_);
        std::sort(feats.begin(), feats.end());
        return feats;
    }

    SplitChoice best_split(const std::vector<std::size_t>& idx, double parent_gini) {
        SplitChoice best;
        const double n = static_cast<double>(idx.size());
        std::vector<std::pair<double, int>> ordered;  // (value, label)
        ordered.reserve(idx.size());

        for (std::size_t f : candidate_features()) {
            ordered.clear();
            for (auto i : idx) ordered.emplace_back(ds_.features(i, f), ds_.labels[i]);
            std::sort(ordered.begin(), ordered.end());

            std::size_t left[2] = {0, 0};
            std::size_t total[2] = {0, 0};
            for (const auto& [v, y] : ordered) ++total[static_cast<std::size_t>(y)];

            for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
                ++left[static_cast<std::size_t>(ordered[i].second)];
                if (ordered[i + 1].first <= ordered[i].first) continue;

                const double threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
                const std::size_t nl = i + 1;
                const std::size_t nr = ordered.size() - nl;
                const double gl = gini_from_counts(left[0], left[1]);
                const double gr = gini_from_counts(total[0] - left[0], total[1] - left[1]);
                const double decrease =
                    parent_gini - (static_cast<double>(nl) / n) * gl -
                    (static_cast<double>(nr) / n) * gr;
                if (decrease <= 1e-12) continue;  // every executed split must improve

                // Prefer larger decrease; on an exact tie prefer the
                // feature least used on the current root path, then the
                // lower feature index, then the lower threshold. The
                // path-usage rule matters when two columns carry identical
                // information (e.g. perfectly correlated features), where
                // a bare lowest-index rule would hand one column every
                // split and all of the importance.
                const std::size_t uses = path_uses_[f];
                const bool better =
                    !best.found || decrease > best.decrease ||
                    (decrease == best.decrease &&
                     (uses < best.path_uses ||
                      (uses == best.path_uses &&
                       (static_cast<int>(f) < best.feature ||
                        (static_cast<int>(f) == best.feature &&
                         threshold < best.threshold)))));
                if (better) {
                    best.found = true;
                    best.decrease = decrease;
                    best.path_uses = uses;
                    best.feature = static_cast<int>(f);
                    best.threshold = threshold;
                }
            }
        }
        return best;
    }

    const Dataset& ds_;
    const TreeParams& params_;
    std::size_t feature_subsample_;
    Rng& rng_;
    std::vector<TreeNode> nodes_;
    std::vector<std::size_t> path_uses_;
};

}  // namespace

namespace detail {

TreeModel fit_tree_on(const Dataset& ds, std::span<const std::size_t> rows,
                      const TreeParams& params, std::size_t feature_subsample, Rng& rng) {
    if (params.min_samples_split < 2) {
        throw std::invalid_argument("fit_tree: min_samples_split must be >= 2");
    }
    return TreeBuilder(ds, params, feature_subsample, rng).build(rows);
}

}  // namespace detail

TreeModel fit_tree(const Dataset& ds, const TreeParams& params, std::uint64_t seed) {
    validate(ds);
    std::vector<std::size_t> rows(ds.n());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng rng(derive_seed(seed, 0x7133));  // unused without feature subsampling
    return detail::fit_tree_on(ds, rows, params, 0, rng);
}

int TreeModel::leaf_for(std::span<const double> x) const {
    if (x.size() != feature_count_) {
        throw std::invalid_argument("predict: instance has " + std::to_string(x.size()) +
                                    " features, model expects " +
                                    std::to_string(feature_count_));
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("predict: non-finite feature value");
        }
    }
    int node = root_id();
    while (!nodes_[static_cast<std::size_t>(node)].is_leaf()) {
        const TreeNode& nd = nodes_[static_cast<std::size_t>(node)];
        node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return node;
}

std::array<double, 2> TreeModel::predict_proba(std::span<const double> x) const {
    const TreeNode& leaf = nodes_[static_cast<std::size_t>(leaf_for(x))];
    const double n = static_cast<double>(leaf.samples);
    return {static_cast<double>(leaf.class_counts[0]) / n,
            static_cast<double>(leaf.class_counts[1]) / n};
}

double TreeModel::node_mean(int node_id) const {
    const TreeNode& nd = nodes_[static_cast<std::size_t>(node_id)];
    return static_cast<double>(nd.class_counts[1]) / static_cast<double>(nd.samples);
}

double accuracy(const TreeModel& model, const Dataset& ds,
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

std::vector<double> gini_importance(const TreeModel& model) {
    std::vector<double> imp(model.feature_count(), 0.0);
    const auto& nodes = model.nodes();
    if (nodes.empty()) return imp;
    const double n_root = static_cast<double>(nodes[0].samples);

    for (const TreeNode& nd : nodes) {
        if (nd.is_leaf()) continue;
        const TreeNode& l = nodes[static_cast<std::size_t>(nd.left)];
        const TreeNode& r = nodes[static_cast<std::size_t>(nd.right)];
        const double nn = static_cast<double>(nd.samples);
        const double child_gini = (static_cast<double>(l.samples) * l.gini +
                                   static_cast<double>(r.samples) * r.gini) /
                                  nn;
        imp[static_cast<std::size_t>(nd.feature)] += (nn / n_root) * (nd.gini - child_gini);
    }

    const double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (sum > 0.0) {
        for (auto& v : imp) v /= sum;
    }
    return imp;
}

}  // namespace treebench
