#include "treebench/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace treebench {

void validate(const Dataset& ds, bool allow_missing) {
    const std::size_t n = ds.features.rows;
    const std::size_t m = ds.features.cols;
    if (ds.labels.size() != n) {
        throw std::invalid_argument("dataset: " + std::to_string(ds.labels.size()) +
                                    " labels for " + std::to_string(n) + " rows");
    }
    if (ds.feature_names.size() != m || ds.feature_kinds.size() != m) {
        throw std::invalid_argument("dataset: feature metadata length does not match " +
                                    std::to_string(m) + " columns");
    }
    if (!ds.categories.empty() && ds.categories.size() != m) {
        throw std::invalid_argument("dataset: category tables length mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (ds.labels[i] != 0 && ds.labels[i] != 1) {
            throw std::invalid_argument("dataset: non-binary label " +
                                        std::to_string(ds.labels[i]) + " at row " +
                                        std::to_string(i));
        }
    }
    if (!allow_missing) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (!std::isfinite(ds.features(i, j))) {
                    throw std::invalid_argument("dataset: non-finite value at row " +
                                                std::to_string(i) + ", column " +
                                                std::to_string(j));
                }
            }
        }
    }
}

Dataset take_rows(const Dataset& ds, std::span<const std::size_t> indices) {
    Dataset out;
    out.features = Matrix(indices.size(), ds.features.cols);
    out.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        for (std::size_t j = 0; j < ds.features.cols; ++j) {
            out.features(i, j) = ds.features(src, j);
        }
        out.labels.push_back(ds.labels[src]);
    }
    out.feature_names = ds.feature_names;
    out.feature_kinds = ds.feature_kinds;
    out.provenance = ds.provenance;
    out.categories = ds.categories;
    return out;
}

ColumnStats column_stats(const Matrix& m) {
    ColumnStats stats;
    stats.mean.assign(m.cols, 0.0);
    stats.stddev.assign(m.cols, 1.0);
    if (m.rows == 0) return stats;
    for (std::size_t j = 0; j < m.cols; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) sum += m(i, j);
        const double mean = sum / static_cast<double>(m.rows);
        double ss = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double d = m(i, j) - mean;
            ss += d * d;
        }
        const double var = ss / static_cast<double>(m.rows);
        stats.mean[j] = mean;
        stats.stddev[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return stats;
}

}  // namespace treebench
