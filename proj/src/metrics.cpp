#include "treebench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace treebench {

NormalizedAttribution normalize_values(std::span<const double> values) {
    NormalizedAttribution out;
    out.shares.assign(values.size(), 0.0);
    double total = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("normalize: non-finite attribution value");
        }
        total += std::abs(v);
    }
    if (total > 0.0) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out.shares[i] = std::abs(values[i]) / total;
        }
    } else {
        // All-zero attribution: uniform shares, flagged.
        std::fill(out.shares.begin(), out.shares.end(),
                  1.0 / static_cast<double>(values.size()));
        out.degenerate = true;
    }
    return out;
}

NormalizedAttribution normalize(const Attribution& a) {
    NormalizedAttribution out = normalize_values(a.values);
    out.instance_id = a.instance_id;
    out.method = a.method;
    return out;
}

double consistency(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("consistency: length mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::sqrt(d2);
}

std::vector<std::size_t> rank_features(std::span<const double> shares) {
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return shares[a] > shares[b];  // stable: ties keep the lower index first
    });
    return order;
}

double feature_agreement(std::span<const std::size_t> rank_a,
                         std::span<const std::size_t> rank_b, std::size_t k) {
    if (rank_a.size() != rank_b.size()) {
        throw std::invalid_argument("feature_agreement: rankings cover different feature sets");
    }
    if (k == 0 || k > rank_a.size()) {
        throw std::invalid_argument("feature_agreement: k must be in 1..M");
    }
    std::vector<char> in_b(rank_a.size(), 0);
    for (std::size_t i = 0; i < k; ++i) in_b[rank_b[i]] = 1;
    std::size_t common = 0;
    for (std::size_t i = 0; i < k; ++i) common += in_b[rank_a[i]];
    return static_cast<double>(common) / static_cast<double>(k);
}

double rank_agreement(std::span<const std::size_t> rank_a,
                      std::span<const std::size_t> rank_b, std::size_t k) {
    if (rank_a.size() != rank_b.size()) {
        throw std::invalid_argument("rank_agreement: rankings cover different feature sets");
    }
    if (k == 0 || k > rank_a.size()) {
        throw std::invalid_argument("rank_agreement: k must be in 1..M");
    }
    std::size_t same = 0;
    for (std::size_t i = 0; i < k; ++i) same += rank_a[i] == rank_b[i];
    return static_cast<double>(same) / static_cast<double>(k);
}

StabilityResult stability(const std::vector<NormalizedAttribution>& batch,
                          const Matrix& instance_features,
                          std::span<const int> predicted_class, const TrainingStats& scale,
                          std::size_t idx, std::size_t n_neighbors) {
    const std::size_t n = batch.size();
    if (instance_features.rows != n || predicted_class.size() != n) {
        throw std::invalid_argument("stability: batch, features and predictions must align");
    }
    if (idx >= n) {
        throw std::invalid_argument("stability: instance index out of range");
    }
    if (n_neighbors == 0 || n_neighbors > n - 1) {
        throw std::invalid_argument("stability: n_neighbors must be in 1..n-1");
    }

    const std::size_t m = instance_features.cols;
    std::vector<std::pair<double, std::size_t>> by_distance;
    by_distance.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == idx) continue;
        double d2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double u =
                (instance_features(i, j) - instance_features(idx, j)) / scale.stddev[j];
            d2 += u * u;
        }
        by_distance.emplace_back(d2, i);
    }
    std::sort(by_distance.begin(), by_distance.end());

    StabilityResult result;
    double sum = 0.0;
    std::size_t taken = 0;
    for (const auto& [d2, i] : by_distance) {
        if (predicted_class[i] != predicted_class[idx]) continue;
        sum += consistency(batch[idx].shares, batch[i].shares);
        if (++taken == n_neighbors) break;
    }
    if (taken == 0) {
        // No same-class neighbor: fall back to the unrestricted
        // neighborhood and flag the value.
        result.mixed_classes = true;
        for (std::size_t i = 0; i < n_neighbors; ++i) {
            sum += consistency(batch[idx].shares, batch[by_distance[i].second].shares);
        }
        taken = n_neighbors;
    }
    result.value = sum / static_cast<double>(taken);
    return result;
}

CompactnessCurve compactness(const PredictFn& f, std::span<const double> x,
                             const Attribution& a, const Background& background,
                             double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("compactness: threshold must be in (0,1]");
    }
    const std::size_t m = x.size();
    if (a.values.size() != m) {
        throw std::invalid_argument("compactness: attribution width does not match instance");
    }

    const std::vector<double> means = background.column_means();
    std::vector<double> abs_values(m);
    for (std::size_t j = 0; j < m; ++j) abs_values[j] = std::abs(a.values[j]);
    const auto order = rank_features(abs_values);

    const double full = f(x);
    const int full_label = full >= 0.5 ? 1 : 0;

    CompactnessCurve curve;
    curve.label_match.resize(m);
    curve.output_distance.resize(m);
    curve.k_needed = m;

    std::vector<double> masked = means;  // start all-background, reveal top-k
    for (std::size_t k = 1; k <= m; ++k) {
        const std::size_t j = order[k - 1];
        masked[j] = x[j];
        const double out = f(masked);
        const int label = out >= 0.5 ? 1 : 0;
        curve.label_match[k - 1] = label == full_label ? 1 : 0;
        curve.output_distance[k - 1] = std::abs(out - full);
    }
    for (std::size_t k = 1; k <= m; ++k) {
        if (curve.label_match[k - 1] == 1) {
            curve.k_needed = k;
            break;
        }
    }
    return curve;
}

CompactnessSummary summarize_compactness(const std::vector<CompactnessCurve>& curves,
                                         double threshold) {
    if (curves.empty()) {
        throw std::invalid_argument("compactness summary: no curves");
    }
    const std::size_t m = curves.front().label_match.size();
    CompactnessSummary summary;
    summary.fidelity_curve.assign(m, 0.0);
    double dist1 = 0.0;
    for (const auto& c : curves) {
        for (std::size_t k = 0; k < m; ++k) {
            summary.fidelity_curve[k] += static_cast<double>(c.label_match[k]);
        }
        dist1 += c.output_distance[0];
    }
    const double n = static_cast<double>(curves.size());
    for (auto& v : summary.fidelity_curve) v /= n;
    summary.distance_with_1 = dist1 / n;

    summary.k_needed = m;
    for (std::size_t k = 0; k < m; ++k) {
        if (summary.fidelity_curve[k] >= threshold) {
            summary.k_needed = k + 1;
            break;
        }
    }
    summary.fidelity_at_5 = summary.fidelity_curve[std::min<std::size_t>(5, m) - 1];
    return summary;
}

void MetricReport::add(const std::string& dataset, const std::string& model,
                       const std::string& method, const std::string& metric,
                       const std::string& aggregate, double value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("metric report: non-finite value for " + dataset + "/" +
                                    method + "/" + metric);
    }
    const Key key{dataset, model, method, metric, aggregate};
    if (!entries_.emplace(key, value).second) {
        throw std::invalid_argument("metric report: duplicate key " + dataset + "/" + model +
                                    "/" + method + "/" + metric + "/" + aggregate);
    }
}

bool aggregate_into(MetricReport& report, const std::string& dataset,
                    const std::string& model, const std::string& method,
                    const std::string& metric, std::span<const double> values) {
    if (values.empty()) return false;
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= n;
    report.add(dataset, model, method, metric, "mean", mean);
    report.add(dataset, model, method, metric, "variance", var);
    return true;
}

std::vector<double> pairwise_consistency(
    const std::vector<std::vector<NormalizedAttribution>>& batches,
    std::size_t method_index) {
    if (method_index >= batches.size()) {
        throw std::invalid_argument("pairwise_consistency: method index out of range");
    }
    const auto& own = batches[method_index];
    std::vector<double> per_instance;
    per_instance.reserve(own.size());
    for (std::size_t i = 0; i < own.size(); ++i) {
        double sum = 0.0;
        std::size_t others = 0;
        for (std::size_t m = 0; m < batches.size(); ++m) {
            if (m == method_index) continue;
            if (batches[m].size() != own.size()) {
                throw std::invalid_argument("pairwise_consistency: batches are not aligned");
            }
            sum += consistency(own[i].shares, batches[m][i].shares);
            ++others;
        }
        per_instance.push_back(others > 0 ? sum / static_cast<double>(others) : 0.0);
    }
    return per_instance;
}

}  // namespace treebench
