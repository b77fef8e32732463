#include "treebench/explainers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "treebench/ridge.hpp"
#include "treebench/rng.hpp"

namespace treebench {

namespace {

constexpr std::size_t kEnumerationBound = 15;   // 2^M value-function table
constexpr std::size_t kPermutationBound = 8;    // M! permutation sweep

double logit(double p) {
    const double q = std::clamp(p, 1e-6, 1.0 - 1e-6);
    return std::log(q / (1.0 - q));
}

// Interventional value function v(S): features in `mask` come from x,
// the rest from each background row, averaged over the background.
double value_function(const PredictFn& f, std::span<const double> x, std::uint64_t mask,
                      const Background& bg, std::vector<double>& buffer) {
    const std::size_t m = x.size();
    double acc = 0.0;
    for (std::size_t r = 0; r < bg.size(); ++r) {
        for (std::size_t j = 0; j < m; ++j) {
            buffer[j] = (mask >> j) & 1ULL ? x[j] : bg.rows(r, j);
        }
        acc += f(buffer);
    }
    return acc / static_cast<double>(bg.size());
}

// Shapley coalition weights |S|! (M-|S|-1)! / M! for |S| = 0..M-1.
std::vector<double> coalition_weights(std::size_t m) {
    std::vector<double> factorial(m + 1, 1.0);
    for (std::size_t i = 1; i <= m; ++i) {
        factorial[i] = factorial[i - 1] * static_cast<double>(i);
    }
    std::vector<double> w(m);
    for (std::size_t s = 0; s < m; ++s) {
        w[s] = factorial[s] * factorial[m - s - 1] / factorial[m];
    }
    return w;
}

double binomial(std::size_t n, std::size_t k) {
    double result = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        result *= static_cast<double>(n - i + 1) / static_cast<double>(i);
    }
    return result;
}

// Shapley kernel pi(z) = (M-1) / (C(M,|z|) * |z| * (M-|z|)).
double shapley_kernel(std::size_t m, std::size_t size) {
    return static_cast<double>(m - 1) /
           (binomial(m, size) * static_cast<double>(size) * static_cast<double>(m - size));
}

void require_background(const Background& bg, std::size_t m, const char* who) {
    if (bg.size() == 0 || bg.rows.cols != m) {
        throw std::invalid_argument(std::string(who) +
                                    ": background must be non-empty with M columns");
    }
}

}  // namespace

PredictFn predict_fn(const Model& model, bool logodds) {
    if (logodds) {
        return [&model](std::span<const double> x) { return logit(model.prob1(x)); };
    }
    return [&model](std::span<const double> x) { return model.prob1(x); };
}

TrainingStats training_stats(const Matrix& train_features) {
    const ColumnStats cs = column_stats(train_features);
    return TrainingStats{cs.mean, cs.stddev};
}

Attribution exact_shapley(const PredictFn& f, std::span<const double> x,
                          const Background& background) {
    const std::size_t m = x.size();
    if (m == 0 || m > kEnumerationBound) {
        throw std::invalid_argument(
            "exact_shapley: enumeration supports 1.." + std::to_string(kEnumerationBound) +
            " features (got " + std::to_string(m) +
            "); use kernel_shap or sampling_shap instead");
    }
    require_background(background, m, "exact_shapley");

    const std::uint64_t n_subsets = 1ULL << m;
    std::vector<double> v(n_subsets);
    std::vector<double> buffer(m);
    for (std::uint64_t mask = 0; mask < n_subsets; ++mask) {
        v[mask] = value_function(f, x, mask, background, buffer);
    }

    const auto w = coalition_weights(m);
    Attribution a;
    a.method = Method::exact;
    a.values.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t bit = 1ULL << i;
        for (std::uint64_t mask = 0; mask < n_subsets; ++mask) {
            if (mask & bit) continue;
            a.values[i] += w[static_cast<std::size_t>(std::popcount(mask))] *
                           (v[mask | bit] - v[mask]);
        }
    }
    a.base_value = v[0];
    a.target_output = f(x);
    return a;
}

Attribution kernel_shap(const PredictFn& f, std::span<const double> x,
                        const Background& background, const ExplainerConfig& cfg) {
    const std::size_t m = x.size();
    require_background(background, m, "kernel_shap");

    Attribution a;
    a.method = Method::kshap;
    std::vector<double> buffer(m);
    a.base_value = value_function(f, x, 0, background, buffer);
    a.target_output = f(x);
    const double excess = a.target_output - a.base_value;

    if (m == 1) {
        a.values = {excess};
        return a;
    }

    // Coalition rows, each with its Shapley-kernel weight. The empty and
    // full coalitions never appear: they are folded into the constraints
    // base = v(empty) and sum(phi) = f(x) - base.
    std::map<std::uint64_t, double> coalition_weight;
    if (cfg.enumerate_coalitions) {
        if (m > kEnumerationBound) {
            throw std::invalid_argument("kernel_shap: enumeration bound is " +
                                        std::to_string(kEnumerationBound) + " features");
        }
        for (std::uint64_t mask = 1; mask + 1 < (1ULL << m); ++mask) {
            coalition_weight[mask] =
                shapley_kernel(m, static_cast<std::size_t>(std::popcount(mask)));
        }
    } else {
        if (cfg.coalition_samples < m + 2) {
            throw std::invalid_argument("kernel_shap: need at least M+2 coalition samples");
        }
        Rng rng(derive_seed(cfg.seed, 0xc0a1));
        const std::uint64_t span =
            m >= 64 ? UINT64_MAX - 1 : (1ULL << m) - 2;  // proper non-empty masks
        for (std::size_t s = 0; s < cfg.coalition_samples; ++s) {
            const std::uint64_t mask = 1 + rng.below(span);
            coalition_weight[mask] +=
                shapley_kernel(m, static_cast<std::size_t>(std::popcount(mask)));
        }
    }

    // Weighted least squares with sum(phi) = excess enforced by eliminating
    // the last feature: phi_last = excess - sum(others).
    const std::size_t p = m - 1;
    Matrix design(coalition_weight.size(), p);
    std::vector<double> targets;
    std::vector<double> weights;
    targets.reserve(coalition_weight.size());
    weights.reserve(coalition_weight.size());
    std::size_t row = 0;
    for (const auto& [mask, weight] : coalition_weight) {
        const double z_last = (mask >> (m - 1)) & 1ULL ? 1.0 : 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double z_j = (mask >> j) & 1ULL ? 1.0 : 0.0;
            design(row, j) = z_j - z_last;
        }
        targets.push_back(value_function(f, x, mask, background, buffer) - a.base_value -
                          z_last * excess);
        weights.push_back(weight);
        ++row;
    }

    const RidgeResult solved = weighted_ridge(design, targets, weights, 0.0);
    a.values.assign(m, 0.0);
    double head_sum = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        a.values[j] = solved.beta[j];
        head_sum += solved.beta[j];
    }
    a.values[m - 1] = excess - head_sum;
    if (solved.fallback) a.flags.push_back("ridge_fallback");
    return a;
}

Attribution sampling_shap(const PredictFn& f, std::span<const double> x,
                          const Background& background, const ExplainerConfig& cfg) {
    const std::size_t m = x.size();
    require_background(background, m, "sampling_shap");

    Attribution a;
    a.method = Method::sshap;
    a.values.assign(m, 0.0);
    a.target_output = f(x);

    std::vector<double> current(m);
    double base_acc = 0.0;
    std::size_t walks = 0;

    // One pass: start from the reference row, switch features to the
    // instance's values in permutation order, credit each feature its
    // marginal change.
    const auto walk = [&](std::span<const std::size_t> perm, std::size_t row) {
        for (std::size_t j = 0; j < m; ++j) current[j] = background.rows(row, j);
        double prev = f(current);
        base_acc += prev;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t j = perm[k];
            current[j] = x[j];
            const double next = f(current);
            a.values[j] += next - prev;
            prev = next;
        }
        ++walks;
    };

    if (cfg.enumerate_permutations) {
        if (m > kPermutationBound) {
            throw std::invalid_argument("sampling_shap: permutation enumeration is limited to " +
                                        std::to_string(kPermutationBound) + " features");
        }
        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        do {
            for (std::size_t r = 0; r < background.size(); ++r) walk(perm, r);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        Rng rng(derive_seed(cfg.seed, 0x5a3f));
        for (std::size_t s = 0; s < cfg.permutation_samples; ++s) {
            const auto perm = rng.permutation(m);
            walk(perm, rng.below(background.size()));
        }
    }

    for (auto& phi : a.values) phi /= static_cast<double>(walks);
    a.base_value = base_acc / static_cast<double>(walks);
    return a;
}

namespace {

// Pair weights for interventional Tree SHAP: W[a][b] = a! (b-a)! / (b+1)!,
// i.e. the Shapley coefficient for a coalition of size a among b+1 players.
std::vector<std::vector<double>> pair_weights(std::size_t m) {
    std::vector<std::vector<double>> w(m + 1, std::vector<double>(m + 1, 0.0));
    for (std::size_t j = 0; j < m; ++j) {
        w[0][j] = 1.0 / static_cast<double>(j + 1);
        w[j][j] = 1.0 / static_cast<double>(j + 1);
    }
    for (std::size_t j = 2; j < m; ++j) {
        for (std::size_t i = j - 1; i > 0; --i) {
            w[i][j] = w[i + 1][j] * static_cast<double>(j - i) / static_cast<double>(i + 1);
        }
    }
    return w;
}

// Single (instance, reference) recursion. Tracks the features on which the
// two paths diverge: S_X holds features fixed to the instance, S_Z those
// fixed to the reference. At a leaf, every player receives its Shapley
// coefficient times the leaf value, positive for S_X, negative for S_Z.
class TreeShapPair {
public:
    TreeShapPair(const TreeModel& tree, std::span<const double> x, std::span<const double> z,
                 const std::vector<std::vector<double>>& w, std::vector<double>& phi)
        : tree_(tree), x_(x), z_(z), w_(w), phi_(phi) {
        in_x_.assign(x.size(), 0);
        in_z_.assign(x.size(), 0);
    }

    void run() { recurse(TreeModel::root_id()); }

private:
    void recurse(int node_id) {
        const TreeNode& nd = tree_.nodes()[static_cast<std::size_t>(node_id)];
        if (nd.is_leaf()) {
            const std::size_t players = nx_ + nz_;
            if (players == 0) return;  // paths never diverged, phi stays 0
            const double value = static_cast<double>(nd.class_counts[1]) /
                                 static_cast<double>(nd.samples);
            for (std::size_t i = 0; i < phi_.size(); ++i) {
                if (in_x_[i]) {
                    phi_[i] += w_[nx_ - 1][players - 1] * value;
                } else if (in_z_[i]) {
                    phi_[i] -= w_[nx_][players - 1] * value;
                }
            }
            return;
        }

        const auto feature = static_cast<std::size_t>(nd.feature);
        const int x_child = x_[feature] <= nd.threshold ? nd.left : nd.right;
        const int z_child = z_[feature] <= nd.threshold ? nd.left : nd.right;

        if (x_child == z_child) {
            recurse(x_child);
            return;
        }
        // Already committed: keep S_X and S_Z disjoint by following the
        // branch the owning side took.
        if (in_x_[feature]) {
            recurse(x_child);
            return;
        }
        if (in_z_[feature]) {
            recurse(z_child);
            return;
        }
        in_x_[feature] = 1;
        ++nx_;
        recurse(x_child);
        in_x_[feature] = 0;
        --nx_;

        in_z_[feature] = 1;
        ++nz_;
        recurse(z_child);
        in_z_[feature] = 0;
        --nz_;
    }

    const TreeModel& tree_;
    std::span<const double> x_;
    std::span<const double> z_;
    const std::vector<std::vector<double>>& w_;
    std::vector<double>& phi_;
    std::vector<int> in_x_;
    std::vector<int> in_z_;
    std::size_t nx_ = 0;
    std::size_t nz_ = 0;
};

void tree_shap_accumulate(const TreeModel& tree, std::span<const double> x,
                          const Background& bg,
                          const std::vector<std::vector<double>>& w,
                          std::vector<double>& phi, double& base) {
    std::vector<double> pair_phi(x.size());
    for (std::size_t r = 0; r < bg.size(); ++r) {
        const auto z = bg.rows.row(r);
        base += tree.prob1(z);
        std::fill(pair_phi.begin(), pair_phi.end(), 0.0);
        TreeShapPair(tree, x, z, w, pair_phi).run();
        for (std::size_t j = 0; j < phi.size(); ++j) phi[j] += pair_phi[j];
    }
}

}  // namespace

Attribution tree_shap(const Model& model, std::span<const double> x,
                      const Background& background, bool logodds) {
    if (logodds) {
        throw std::invalid_argument(
            "tree_shap: log-odds output is not decomposable over trees; "
            "use a model-agnostic explainer for log-odds");
    }
    const std::size_t m = x.size();
    require_background(background, m, "tree_shap");
    if (model.feature_count() != m) {
        throw std::invalid_argument("tree_shap: instance width does not match model");
    }

    const auto w = pair_weights(m);
    Attribution a;
    a.method = Method::tshap;
    a.values.assign(m, 0.0);

    const double r = static_cast<double>(background.size());
    if (model.is_tree()) {
        double base = 0.0;
        tree_shap_accumulate(model.tree(), x, background, w, a.values, base);
        for (auto& phi : a.values) phi /= r;
        a.base_value = base / r;
    } else {
        const auto& trees = model.forest().trees();
        std::vector<double> tree_phi(m);
        double base_sum = 0.0;
        for (const auto& tree : trees) {
            std::fill(tree_phi.begin(), tree_phi.end(), 0.0);
            double base = 0.0;
            tree_shap_accumulate(tree, x, background, w, tree_phi, base);
            for (std::size_t j = 0; j < m; ++j) a.values[j] += tree_phi[j] / r;
            base_sum += base / r;
        }
        const double t = static_cast<double>(trees.size());
        for (auto& phi : a.values) phi /= t;
        a.base_value = base_sum / t;
    }
    a.target_output = model.prob1(x);
    return a;
}

Attribution tree_interpreter(const Model& model, std::span<const double> x, bool logodds) {
    if (logodds) {
        throw std::invalid_argument(
            "tree_interpreter: log-odds output is not decomposable over trees; "
            "use a model-agnostic explainer for log-odds");
    }
    const std::size_t m = model.feature_count();
    if (x.size() != m) {
        throw std::invalid_argument("tree_interpreter: instance width does not match model");
    }

    Attribution a;
    a.method = Method::ti;
    a.values.assign(m, 0.0);

    const auto decompose = [&](const TreeModel& tree, std::vector<double>& phi) {
        int node = TreeModel::root_id();
        double mean = tree.node_mean(node);
        const double root_mean = mean;
        while (!tree.nodes()[static_cast<std::size_t>(node)].is_leaf()) {
            const TreeNode& nd = tree.nodes()[static_cast<std::size_t>(node)];
            const int child =
                x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
            const double child_mean = tree.node_mean(child);
            phi[static_cast<std::size_t>(nd.feature)] += child_mean - mean;
            mean = child_mean;
            node = child;
        }
        return std::pair{root_mean, mean};  // (bias, prediction)
    };

    if (model.is_tree()) {
        const auto [bias, prediction] = decompose(model.tree(), a.values);
        a.base_value = bias;
        a.target_output = prediction;
    } else {
        const auto& trees = model.forest().trees();
        std::vector<double> tree_phi(m);
        double bias_sum = 0.0;
        double prediction_sum = 0.0;
        for (const auto& tree : trees) {
            std::fill(tree_phi.begin(), tree_phi.end(), 0.0);
            const auto [bias, prediction] = decompose(tree, tree_phi);
            bias_sum += bias;
            prediction_sum += prediction;
            for (std::size_t j = 0; j < m; ++j) a.values[j] += tree_phi[j];
        }
        const double t = static_cast<double>(trees.size());
        for (auto& phi : a.values) phi /= t;
        a.base_value = bias_sum / t;
        a.target_output = prediction_sum / t;
    }
    return a;
}

Attribution lime(const PredictFn& f, std::span<const double> x, const TrainingStats& stats,
                 const ExplainerConfig& cfg) {
    const std::size_t m = x.size();
    if (stats.mean.size() != m || stats.stddev.size() != m) {
        throw std::invalid_argument("lime: training stats do not match instance width");
    }
    if (cfg.neighborhood_size < m + 2) {
        throw std::invalid_argument("lime: neighborhood_size must be at least M+2");
    }
    const double sigma =
        cfg.kernel_width > 0.0 ? cfg.kernel_width : 0.75 * std::sqrt(static_cast<double>(m));

    const std::size_t n = cfg.neighborhood_size;
    Rng rng(derive_seed(cfg.seed, 0x113e));
    Matrix design(n, m + 1);
    std::vector<double> targets(n);
    std::vector<double> weights(n);
    std::vector<double> point(m);

    double total_weight = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        design(i, 0) = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double z = stats.mean[j] + stats.stddev[j] * rng.normal();
            design(i, j + 1) = z;
            point[j] = z;
            const double u = (z - x[j]) / stats.stddev[j];
            d2 += u * u;
        }
        targets[i] = f(point);
        weights[i] = std::exp(-d2 / (sigma * sigma));
        total_weight += weights[i];
    }
    if (total_weight <= 0.0) {
        throw std::runtime_error("lime: degenerate neighborhood (zero total kernel weight)");
    }

    const RidgeResult solved =
        weighted_ridge(design, targets, weights, cfg.ridge_lambda, /*unpenalized_intercept=*/true);

    Attribution a;
    a.method = Method::lime;
    a.values.assign(m, 0.0);
    // Scale by feature std so magnitudes are comparable across features.
    for (std::size_t j = 0; j < m; ++j) a.values[j] = solved.beta[j + 1] * stats.stddev[j];
    a.base_value = solved.beta[0];
    a.target_output = f(x);
    if (solved.fallback) a.flags.push_back("ridge_fallback");
    return a;
}

Attribution local_surrogate(const PredictFn& f, std::span<const double> x,
                            const Matrix& train_features, const TrainingStats& stats,
                            const ExplainerConfig& cfg) {
    const std::size_t m = x.size();
    const std::size_t n = train_features.rows;
    if (train_features.cols != m) {
        throw std::invalid_argument("local_surrogate: training width does not match instance");
    }
    if (cfg.neighbor_count > n) {
        throw std::invalid_argument("local_surrogate: neighbor_count exceeds training size");
    }
    if (cfg.neighbor_count < m + 1) {
        throw std::invalid_argument(
            "local_surrogate: neighbor_count must be at least M+1 (underdetermined fit)");
    }

    // Nearest real training instances by standardized Euclidean distance;
    // index order breaks distance ties deterministically.
    std::vector<std::pair<double, std::size_t>> by_distance(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double u = (train_features(i, j) - x[j]) / stats.stddev[j];
            d2 += u * u;
        }
        by_distance[i] = {d2, i};
    }
    std::sort(by_distance.begin(), by_distance.end());

    const std::size_t k = cfg.neighbor_count;
    Matrix design(k, m + 1);
    std::vector<double> targets(k);
    const std::vector<double> weights(k, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t src = by_distance[i].second;
        design(i, 0) = 1.0;
        for (std::size_t j = 0; j < m; ++j) design(i, j + 1) = train_features(src, j);
        targets[i] = f(train_features.row(src));
    }

    const RidgeResult solved =
        weighted_ridge(design, targets, weights, cfg.ridge_lambda, /*unpenalized_intercept=*/true);

    // Surrogate fidelity on its own neighborhood.
    double mean_y = 0.0;
    for (double y : targets) mean_y += y;
    mean_y /= static_cast<double>(k);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < m + 1; ++j) fit += design(i, j) * solved.beta[j];
        ss_res += (targets[i] - fit) * (targets[i] - fit);
        ss_tot += (targets[i] - mean_y) * (targets[i] - mean_y);
    }

    Attribution a;
    a.method = Method::lsurro;
    a.values.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) a.values[j] = solved.beta[j + 1] * stats.stddev[j];
    a.base_value = solved.beta[0];
    a.target_output = f(x);
    a.extras["r2"] = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (solved.fallback) a.flags.push_back("ridge_fallback");
    return a;
}

std::vector<ExplainOutcome> explain_batch(Method method, const Model& model,
                                          const Matrix& instances, const ExplainContext& ctx,
                                          const ExplainerConfig& cfg) {
    const std::size_t m = model.feature_count();
    cfg.validate(m);

    const bool needs_background = method == Method::kshap || method == Method::sshap ||
                                  method == Method::tshap || method == Method::exact;
    if (needs_background && ctx.background == nullptr) {
        throw std::invalid_argument("explain_batch: " + to_string(method) +
                                    " requires a background");
    }
    if ((method == Method::lime || method == Method::lsurro) && ctx.train_features == nullptr) {
        throw std::invalid_argument("explain_batch: " + to_string(method) +
                                    " requires training features");
    }

    const PredictFn f = predict_fn(model, cfg.logodds_output);
    const TrainingStats stats =
        ctx.train_features ? training_stats(*ctx.train_features) : TrainingStats{};

    std::vector<ExplainOutcome> out(instances.rows);
    for (std::size_t i = 0; i < instances.rows; ++i) {
        ExplainerConfig local = cfg;
        local.seed = derive_seed(cfg.seed, i);  // order-independent results
        const auto x = instances.row(i);
        try {
            Attribution a;
            switch (method) {
                case Method::exact: a = exact_shapley(f, x, *ctx.background); break;
                case Method::kshap: a = kernel_shap(f, x, *ctx.background, local); break;
                case Method::sshap: a = sampling_shap(f, x, *ctx.background, local); break;
                case Method::tshap:
                    a = tree_shap(model, x, *ctx.background, cfg.logodds_output);
                    break;
                case Method::ti: a = tree_interpreter(model, x, cfg.logodds_output); break;
                case Method::lime: a = lime(f, x, stats, local); break;
                case Method::lsurro:
                    a = local_surrogate(f, x, *ctx.train_features, stats, local);
                    break;
            }
            a.instance_id = i;
            out[i].attribution = std::move(a);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    }
    return out;
}

}  // namespace treebench
