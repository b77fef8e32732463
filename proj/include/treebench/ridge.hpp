#pragma once

#include <span>
#include <vector>

#include "treebench/dataset.hpp"

namespace treebench {

struct RidgeResult {
    std::vector<double> beta;
    // True when a singular system forced an internal lambda bump.
    bool fallback = false;
};

// Minimizes sum_i w_i (y_i - x_i . beta)^2 + lambda * ||beta||^2 through the
// normal equations with a Cholesky solve. When `unpenalized_intercept` is
// set, column 0 of the design is treated as the intercept and excluded from
// the penalty. A singular system at lambda = 0 is retried with 1e-8 (then
// escalating decades) and flagged.
RidgeResult weighted_ridge(const Matrix& design, std::span<const double> targets,
                           std::span<const double> weights, double lambda,
                           bool unpenalized_intercept = false);

}  // namespace treebench
