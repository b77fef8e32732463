#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "treebench/explainers.hpp"
#include "treebench/metrics.hpp"

namespace treebench {

// Columnar attribution file: run-metadata header lines ("# key: value"),
// then instance_id, method, base_value, phi_1..phi_M, target_output.
void save_attributions(const std::vector<Attribution>& batch,
                       const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::string>>& metadata);
std::vector<Attribution> load_attributions(const std::filesystem::path& path);

// One row per MetricReport key: dataset,model,method,metric,aggregate,value.
void save_metric_report_csv(const MetricReport& report, const std::filesystem::path& path);

// Nested JSON mirroring the summary-table layout (dataset -> method -> metric).
void save_metric_report_json(const MetricReport& report, const std::filesystem::path& path);

enum class ReportLayout { summary_table, figure_boxplot, figure_heatmap };

ReportLayout report_layout_from_string(const std::string& s);

// Formats the aggregated report in one of the figure/table layouts and
// writes it under `path`. Output is byte-stable for a fixed report: keys
// are sorted and numbers use fixed two-decimal formatting in tables.
//
//   summary_table  - per (dataset, model): one row per method with the
//                    compactness / consistency / stability columns.
//   figure_boxplot - per-instance normalized shares, long format, for
//                    box plots of each (dataset, method, feature).
//   figure_heatmap - method x method top-k agreement matrices per dataset.
//
// Layout-specific inputs (share samples, agreement matrices) are passed by
// the pipeline through the plot-data hooks below.
void emit_report(const MetricReport& report, ReportLayout layout,
                 const std::filesystem::path& path);

// Long-format share samples: dataset,method,feature,instance_id,share.
struct ShareSample {
    std::string dataset;
    std::string method;
    std::string feature;
    std::size_t instance_id = 0;
    double share = 0.0;
};

void emit_boxplot_data(const std::vector<ShareSample>& samples,
                       const std::filesystem::path& path);

// One matrix per (dataset, k): rows/cols in method order.
struct AgreementMatrix {
    std::string dataset;
    std::string kind;  // "feature" | "rank"
    std::size_t k = 0;
    std::vector<std::string> methods;
    Matrix values;
};

void emit_heatmap_data(const std::vector<AgreementMatrix>& matrices,
                       const std::filesystem::path& path);

}  // namespace treebench
