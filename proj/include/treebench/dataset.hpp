#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace treebench {

enum class FeatureKind { continuous, discrete };

// Dense row-major matrix of doubles. Rows are instances, columns features.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
    std::span<double> row(std::size_t i) {
        return {data.data() + i * cols, cols};
    }
};

// A binary-classification dataset. Discrete columns hold ordinal category
// codes; the code -> category-name tables from ingestion are kept so that
// encodings stay auditable and reversible.
struct Dataset {
    Matrix features;
    std::vector<int> labels;  // each 0 or 1
    std::vector<std::string> feature_names;
    std::vector<FeatureKind> feature_kinds;
    // Spec digest for generated data, source path for files.
    std::string provenance;
    // Per column, sorted category names for discrete columns (code = index);
    // empty for continuous columns.
    std::vector<std::vector<std::string>> categories;

    std::size_t n() const { return features.rows; }
    std::size_t n_features() const { return features.cols; }
};

// Checks the structural invariants (shape agreement, binary labels and,
// unless `allow_missing`, that every feature value is finite). Throws
// std::invalid_argument naming the first offending row/column.
void validate(const Dataset& ds, bool allow_missing = false);

// New dataset holding the given rows (in order, duplicates allowed).
Dataset take_rows(const Dataset& ds, std::span<const std::size_t> indices);

// Per-column mean and standard deviation, used for standardized distances.
struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // 1.0 is substituted for constant columns
};

ColumnStats column_stats(const Matrix& m);

}  // namespace treebench
