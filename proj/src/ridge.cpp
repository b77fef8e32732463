#include "treebench/ridge.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace treebench {

namespace {

// In-place Cholesky solve of A x = b for symmetric positive-definite A.
// Returns false when a pivot collapses (singular / indefinite system).
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t p) {
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) sum -= a[i * p + k] * a[j * p + k];
            if (i == j) {
                if (sum <= 0.0 || !std::isfinite(sum)) return false;
                a[i * p + i] = std::sqrt(sum);
            } else {
                a[i * p + j] = sum / a[j * p + j];
            }
        }
    }
    for (std::size_t i = 0; i < p; ++i) {  // L y = b
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= a[i * p + k] * b[k];
        b[i] = sum / a[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {  // L^T x = y
        double sum = b[ii];
        for (std::size_t k = ii + 1; k < p; ++k) sum -= a[k * p + ii] * b[k];
        b[ii] = sum / a[ii * p + ii];
    }
    return true;
}

}  // namespace

RidgeResult weighted_ridge(const Matrix& design, std::span<const double> targets,
                           std::span<const double> weights, double lambda,
                           bool unpenalized_intercept) {
    const std::size_t n = design.rows;
    const std::size_t p = design.cols;
    if (n == 0 || targets.size() != n || weights.size() != n) {
        throw std::invalid_argument("weighted_ridge: shape mismatch");
    }
    if (lambda < 0.0) {
        throw std::invalid_argument("weighted_ridge: lambda must be >= 0");
    }
    double weight_sum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) {
            throw std::invalid_argument("weighted_ridge: weights must be >= 0 and finite");
        }
        weight_sum += w;
    }
    if (weight_sum <= 0.0) {
        throw std::invalid_argument("weighted_ridge: all weights are zero");
    }

    // Normal equations: (X^T W X + lambda D) beta = X^T W y.
    std::vector<double> xtwx(p * p, 0.0);
    std::vector<double> xtwy(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights[i];
        if (w == 0.0) continue;
        for (std::size_t a = 0; a < p; ++a) {
            const double xa = design(i, a) * w;
            xtwy[a] += xa * targets[i];
            for (std::size_t b = 0; b <= a; ++b) {
                xtwx[a * p + b] += xa * design(i, b);
            }
        }
    }
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a + 1; b < p; ++b) xtwx[a * p + b] = xtwx[b * p + a];
    }

    RidgeResult result;
    double lam = lambda;
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<double> a = xtwx;
        std::vector<double> b = xtwy;
        for (std::size_t d = unpenalized_intercept ? 1 : 0; d < p; ++d) {
            a[d * p + d] += lam;
        }
        if (cholesky_solve(a, b, p)) {
            result.beta = std::move(b);
            return result;
        }
        // Singular: bump the penalty and flag the fallback.
        lam = lam == 0.0 ? 1e-8 : lam * 10.0;
        result.fallback = true;
    }
    throw std::runtime_error("weighted_ridge: system remained singular after retries");
}

}  // namespace treebench
