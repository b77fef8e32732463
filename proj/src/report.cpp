#include "treebench/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace treebench {

namespace {

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Two decimals in table layouts, matching the printed precision of the
// summary tables this mirrors.
std::string fmt_table(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

}  // namespace

void save_attributions(const std::vector<Attribution>& batch,
                       const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::string>>& metadata) {
    if (batch.empty()) {
        throw std::invalid_argument("save_attributions: empty batch");
    }
    auto out = open_out(path);
    for (const auto& [key, value] : metadata) {
        out << "# " << key << ": " << value << '\n';
    }
    const std::size_t m = batch.front().values.size();
    out << "instance_id,method,base_value";
    for (std::size_t j = 1; j <= m; ++j) out << ",phi_" << j;
    out << ",target_output\n";
    for (const auto& a : batch) {
        out << a.instance_id << ',' << to_string(a.method) << ',' << fmt_full(a.base_value);
        for (double v : a.values) out << ',' << fmt_full(v);
        out << ',' << fmt_full(a.target_output) << '\n';
    }
}

std::vector<Attribution> load_attributions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_attributions: cannot open " + path.string());
    }
    std::vector<Attribution> batch;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {  // column header
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 4) {
            throw std::runtime_error("load_attributions: malformed row in " + path.string());
        }
        Attribution a;
        a.instance_id = std::stoull(cells[0]);
        a.method = method_from_string(cells[1]);
        a.base_value = std::stod(cells[2]);
        for (std::size_t i = 3; i + 1 < cells.size(); ++i) {
            a.values.push_back(std::stod(cells[i]));
        }
        a.target_output = std::stod(cells.back());
        batch.push_back(std::move(a));
    }
    return batch;
}

void save_metric_report_csv(const MetricReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "dataset,model,method,metric,aggregate,value\n";
    for (const auto& [key, value] : report.entries()) {
        const auto& [dataset, model, method, metric, aggregate] = key;
        out << dataset << ',' << model << ',' << method << ',' << metric << ',' << aggregate
            << ',' << fmt_full(value) << '\n';
    }
}

void save_metric_report_json(const MetricReport& report, const std::filesystem::path& path) {
    nlohmann::json j;
    for (const auto& [key, value] : report.entries()) {
        const auto& [dataset, model, method, metric, aggregate] = key;
        j[dataset][model][method][metric][aggregate] = value;
    }
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

ReportLayout report_layout_from_string(const std::string& s) {
    if (s == "summary-table" || s == "table") return ReportLayout::summary_table;
    if (s == "figure-boxplot" || s == "boxplot") return ReportLayout::figure_boxplot;
    if (s == "figure-heatmap" || s == "heatmap") return ReportLayout::figure_heatmap;
    throw std::invalid_argument("unknown report layout '" + s +
                                "' (valid: summary-table, figure-boxplot, figure-heatmap)");
}

void emit_report(const MetricReport& report, ReportLayout layout,
                 const std::filesystem::path& path) {
    if (report.empty()) {
        throw std::invalid_argument("emit_report: empty report");
    }
    if (layout != ReportLayout::summary_table) {
        throw std::invalid_argument(
            "emit_report: boxplot/heatmap layouts are emitted from per-instance data; "
            "use emit_boxplot_data / emit_heatmap_data");
    }

    // Fixed column set per (dataset, model): one row per method.
    static constexpr const char* kColumns[] = {
        "compactness_k90", "compactness_dist1", "compactness_acc5",
        "mean_consistency", "mean_stability"};
    static constexpr const char* kSource[] = {
        "features_for_90pct", "distance_with_1_feature", "fidelity_at_5",
        "consistency_pairwise", "stability"};

    std::map<std::pair<std::string, std::string>, std::set<std::string>> methods_by_group;
    for (const auto& [key, value] : report.entries()) {
        const auto& [dataset, model, method, metric, aggregate] = key;
        methods_by_group[{dataset, model}].insert(method);
    }

    auto out = open_out(path);
    out << "dataset,model,method";
    for (const char* c : kColumns) out << ',' << c;
    out << '\n';
    for (const auto& [group, methods] : methods_by_group) {
        for (const auto& method : methods) {
            out << group.first << ',' << group.second << ',' << method;
            for (const char* metric : kSource) {
                const MetricReport::Key key{group.first, group.second, method, metric, "mean"};
                const auto it = report.entries().find(key);
                out << ',' << (it != report.entries().end() ? fmt_table(it->second) : "");
            }
            out << '\n';
        }
    }
}

void emit_boxplot_data(const std::vector<ShareSample>& samples,
                       const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "dataset,method,feature,instance_id,share\n";
    for (const auto& s : samples) {
        out << s.dataset << ',' << s.method << ',' << s.feature << ',' << s.instance_id << ','
            << fmt_full(s.share) << '\n';
    }
}

void emit_heatmap_data(const std::vector<AgreementMatrix>& matrices,
                       const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& m : matrices) {
        out << "# dataset: " << m.dataset << ", kind: " << m.kind << ", k: " << m.k << '\n';
        out << "method";
        for (const auto& name : m.methods) out << ',' << name;
        out << '\n';
        for (std::size_t i = 0; i < m.methods.size(); ++i) {
            out << m.methods[i];
            for (std::size_t j = 0; j < m.methods.size(); ++j) {
                out << ',' << fmt_table(m.values(i, j));
            }
            out << '\n';
        }
        out << '\n';
    }
}

}  // namespace treebench
