#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "treebench/dataset.hpp"

namespace treebench {

enum class Method { kshap, sshap, tshap, ti, lime, lsurro, exact };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

// Per-feature signed importances for one explained instance. For the
// Shapley family and the tree-path decomposition,
// base_value + sum(values) equals target_output (local accuracy).
struct Attribution {
    std::vector<double> values;
    double base_value = 0.0;
    Method method = Method::exact;
    double target_output = 0.0;
    std::size_t instance_id = 0;
    std::vector<std::string> flags;              // e.g. "ridge_fallback"
    std::map<std::string, double> extras;        // e.g. surrogate "r2"

    double efficiency_gap() const;
};

// Reference rows supplying values for features outside a coalition.
struct Background {
    enum class Origin { training_sample, kmeans_summary, explicit_rows };

    Matrix rows;
    Origin origin = Origin::explicit_rows;

    std::size_t size() const { return rows.rows; }
    std::vector<double> column_means() const;
};

// Uniform sample of `count` training rows (with replacement only if the
// training set is smaller than `count`).
Background sample_background(const Matrix& train_features, std::size_t count,
                             std::uint64_t seed);

struct ExplainerConfig {
    // Kernel SHAP
    std::size_t coalition_samples = 2048;
    bool enumerate_coalitions = true;  // exact weighting, requires M <= 15
    // Sampling SHAP
    std::size_t permutation_samples = 1000;
    bool enumerate_permutations = false;  // exhausts M! x background
    // LIME
    std::size_t neighborhood_size = 5000;
    double kernel_width = 0.0;  // 0 -> 0.75 * sqrt(M)
    // Local surrogate
    std::size_t neighbor_count = 100;
    // Shared
    double ridge_lambda = 1.0;
    std::uint64_t seed = 0;
    bool logodds_output = false;  // explain log-odds instead of probability

    void validate(std::size_t n_features) const;
};

}  // namespace treebench
