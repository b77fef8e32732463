#include "treebench/attribution.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "treebench/rng.hpp"

namespace treebench {

std::string to_string(Method m) {
    switch (m) {
        case Method::kshap: return "kshap";
        case Method::sshap: return "sshap";
        case Method::tshap: return "tshap";
        case Method::ti: return "ti";
        case Method::lime: return "lime";
        case Method::lsurro: return "lsurro";
        case Method::exact: return "exact";
    }
    throw std::logic_error("unknown method");
}

Method method_from_string(const std::string& s) {
    if (s == "kshap") return Method::kshap;
    if (s == "sshap") return Method::sshap;
    if (s == "tshap") return Method::tshap;
    if (s == "ti") return Method::ti;
    if (s == "lime") return Method::lime;
    if (s == "lsurro") return Method::lsurro;
    if (s == "exact") return Method::exact;
    throw std::invalid_argument("unknown explainer '" + s + "'");
}

double Attribution::efficiency_gap() const {
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    return std::abs(base_value + sum - target_output);
}

std::vector<double> Background::column_means() const {
    std::vector<double> means(rows.cols, 0.0);
    for (std::size_t i = 0; i < rows.rows; ++i) {
        for (std::size_t j = 0; j < rows.cols; ++j) means[j] += rows(i, j);
    }
    for (auto& m : means) m /= static_cast<double>(rows.rows);
    return means;
}

Background sample_background(const Matrix& train_features, std::size_t count,
                             std::uint64_t seed) {
    if (train_features.rows == 0 || count == 0) {
        throw std::invalid_argument("background: need at least one row");
    }
    Background bg;
    bg.origin = Background::Origin::training_sample;
    bg.rows = Matrix(count, train_features.cols);
    Rng rng(derive_seed(seed, 0xb6));

    if (count <= train_features.rows) {
        // Sample without replacement: partial Fisher-Yates over row ids.
        std::vector<std::size_t> ids(train_features.rows);
        std::iota(ids.begin(), ids.end(), std::size_t{0});
        for (std::size_t i = 0; i < count; ++i) {
            std::swap(ids[i], ids[i + rng.below(train_features.rows - i)]);
            for (std::size_t j = 0; j < train_features.cols; ++j) {
                bg.rows(i, j) = train_features(ids[i], j);
            }
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t src = rng.below(train_features.rows);
            for (std::size_t j = 0; j < train_features.cols; ++j) {
                bg.rows(i, j) = train_features(src, j);
            }
        }
    }
    return bg;
}

void ExplainerConfig::validate(std::size_t n_features) const {
    if (coalition_samples < 1 || permutation_samples < 1 || neighborhood_size < 1 ||
        neighbor_count < 1) {
        throw std::invalid_argument("explainer config: all sample counts must be >= 1");
    }
    if (kernel_width < 0.0) {
        throw std::invalid_argument("explainer config: kernel_width must be > 0 (or 0 for default)");
    }
    if (ridge_lambda < 0.0) {
        throw std::invalid_argument("explainer config: ridge_lambda must be >= 0");
    }
    if (enumerate_coalitions && n_features > 15) {
        throw std::invalid_argument(
            "explainer config: coalition enumeration is limited to 15 features; "
            "disable enumerate_coalitions to sample instead");
    }
}

}  // namespace treebench
