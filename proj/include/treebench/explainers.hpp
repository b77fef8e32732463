#pragma once

#include <functional>
#include <optional>
#include <span>

#include "treebench/attribution.hpp"
#include "treebench/dataset.hpp"
#include "treebench/model.hpp"

namespace treebench {

// Real-valued model output being explained; probability of class 1 by
// default, log-odds behind the config flag.
using PredictFn = std::function<double(std::span<const double>)>;

PredictFn predict_fn(const Model& model, bool logodds = false);

// Brute-force Shapley values under the interventional value function
// v(S) = mean over background rows r of f(x on S, r elsewhere). Exact
// reference for every estimator here; enumeration bound M <= 15.
Attribution exact_shapley(const PredictFn& f, std::span<const double> x,
                          const Background& background);

// Weighted-least-squares Shapley estimate. Coalitions are enumerated when
// cfg.enumerate_coalitions (M <= 15) or sampled uniformly otherwise, each
// weighted by the Shapley kernel (M-1)/(C(M,|z|)*|z|*(M-|z|)). The empty
// and full coalitions enter as hard constraints: base = v(empty) and
// sum(phi) = f(x) - base, enforced by variable elimination.
Attribution kernel_shap(const PredictFn& f, std::span<const double> x,
                        const Background& background, const ExplainerConfig& cfg);

// Monte-Carlo permutation estimator: phi_i accumulates the marginal
// f(prefix + {i} from x, rest from r) - f(prefix from x, rest from r)
// over random (permutation, background row) draws. Unbiased for
// exact_shapley; exact when cfg.enumerate_permutations exhausts M! x rows.
Attribution sampling_shap(const PredictFn& f, std::span<const double> x,
                          const Background& background, const ExplainerConfig& cfg);

// Interventional Tree SHAP: recurses over each tree once per background
// row, tracking the features on which the instance and the reference
// diverge, and weights leaf contributions by the Shapley permutation
// coefficients. Matches exact_shapley on the same background; forests
// average per-tree values (linearity).
Attribution tree_shap(const Model& model, std::span<const double> x,
                      const Background& background, bool logodds = false);

// Decision-path decomposition: walking the instance's path, each internal
// node adds (child mean - node mean) to its split feature; the base value
// is the root mean. base + sum(phi) telescopes exactly to f(x).
Attribution tree_interpreter(const Model& model, std::span<const double> x,
                             bool logodds = false);

struct TrainingStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

TrainingStats training_stats(const Matrix& train_features);

// LIME for tabular data: Gaussian neighborhood drawn per feature from the
// training mean/std, exponential kernel exp(-d^2/sigma^2) on standardized
// distance to the instance, weighted ridge fit of f over the raw perturbed
// features. phi = coefficient * feature std, base = intercept.
Attribution lime(const PredictFn& f, std::span<const double> x,
                 const TrainingStats& stats, const ExplainerConfig& cfg);

// Local surrogate on real data: the neighbor_count nearest training
// instances (standardized Euclidean), unweighted ridge fit of f on those
// rows. phi = coefficient * feature std; extras["r2"] records surrogate
// fidelity on the neighborhood.
Attribution local_surrogate(const PredictFn& f, std::span<const double> x,
                            const Matrix& train_features, const TrainingStats& stats,
                            const ExplainerConfig& cfg);

// One explained instance out of a batch; `error` is empty on success.
struct ExplainOutcome {
    std::optional<Attribution> attribution;
    std::string error;
};

struct ExplainContext {
    const Matrix* train_features = nullptr;  // lime / lsurro
    const Background* background = nullptr;  // Shapley family
};

// Applies `method` to every row of `instances`. Each instance runs under a
// seed derived from (cfg.seed, instance index), so results are independent
// of execution order; failures are recorded per instance without aborting
// the batch.
std::vector<ExplainOutcome> explain_batch(Method method, const Model& model,
                                          const Matrix& instances,
                                          const ExplainContext& ctx,
                                          const ExplainerConfig& cfg);

}  // namespace treebench
