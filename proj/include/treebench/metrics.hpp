#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "treebench/attribution.hpp"
#include "treebench/explainers.hpp"

namespace treebench {

// |phi_i| / sum|phi_j|; all-zero attributions fall back to uniform shares
// with the degenerate flag set.
struct NormalizedAttribution {
    std::vector<double> shares;
    bool degenerate = false;
    std::size_t instance_id = 0;
    Method method = Method::exact;
};

NormalizedAttribution normalize(const Attribution& a);
NormalizedAttribution normalize_values(std::span<const double> values);

// Euclidean distance between two share vectors (lower = more consistent).
double consistency(std::span<const double> a, std::span<const double> b);

// Feature indices by descending share; ties go to the lower index.
std::vector<std::size_t> rank_features(std::span<const double> shares);

// |top_k(a) over top_k(b)| / k on two rankings of the same M features.
double feature_agreement(std::span<const std::size_t> rank_a,
                         std::span<const std::size_t> rank_b, std::size_t k);

// Fraction of the k leading positions holding the identical feature.
double rank_agreement(std::span<const std::size_t> rank_a,
                      std::span<const std::size_t> rank_b, std::size_t k);

struct StabilityResult {
    double value = 0.0;
    // Set when no same-class neighbor existed and all neighbors were used.
    bool mixed_classes = false;
};

// Mean L2 distance between instance `idx`'s shares and those of its
// n_neighbors nearest same-predicted-class instances, with distances taken
// in standardized feature space over the explained batch.
StabilityResult stability(const std::vector<NormalizedAttribution>& batch,
                          const Matrix& instance_features,
                          std::span<const int> predicted_class,
                          const TrainingStats& scale, std::size_t idx,
                          std::size_t n_neighbors);

struct CompactnessCurve {
    // Per k = 1..M: does the model label survive keeping only the top-k
    // attributed features (others replaced by background column means)?
    std::vector<int> label_match;
    // Per k: |f(masked) - f(x)| on the explained output.
    std::vector<double> output_distance;
    // Smallest k with label_match = 1 for this instance (M at the latest).
    std::size_t k_needed = 0;
};

CompactnessCurve compactness(const PredictFn& f, std::span<const double> x,
                             const Attribution& a, const Background& background,
                             double threshold);

// Dataset-level view of many curves: fraction matched per k, the smallest
// k whose fraction reaches the threshold, and the fixed-k columns the
// report tables use.
struct CompactnessSummary {
    std::vector<double> fidelity_curve;  // index k-1
    std::size_t k_needed = 0;
    double fidelity_at_5 = 0.0;          // k = min(5, M)
    double distance_with_1 = 0.0;        // mean output_distance at k = 1
};

CompactnessSummary summarize_compactness(const std::vector<CompactnessCurve>& curves,
                                         double threshold);

// Aggregated values keyed by (dataset, model, method, metric, aggregate).
class MetricReport {
public:
    using Key = std::tuple<std::string, std::string, std::string, std::string, std::string>;

    void add(const std::string& dataset, const std::string& model,
             const std::string& method, const std::string& metric,
             const std::string& aggregate, double value);
    const std::map<Key, double>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

private:
    std::map<Key, double> entries_;
};

// Adds "mean" and "variance" entries for a group of per-instance values;
// empty groups are skipped (reported via return value).
bool aggregate_into(MetricReport& report, const std::string& dataset,
                    const std::string& model, const std::string& method,
                    const std::string& metric, std::span<const double> values);

// Per-instance mean pairwise L2 of one method's shares against every other
// method's shares on the same instances. `batches[m]` is method m's
// normalized batch; all batches must be instance-aligned.
std::vector<double> pairwise_consistency(
    const std::vector<std::vector<NormalizedAttribution>>& batches, std::size_t method_index);

}  // namespace treebench
