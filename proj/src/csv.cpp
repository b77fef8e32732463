#include "treebench/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace treebench {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// RFC-4180-ish field split: quoted fields may contain commas and doubled
// quotes. Surrounding whitespace of unquoted fields is trimmed (the UCI
// files put a space after each comma).
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

bool parse_number(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_csv: cannot open " + path.string());
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("load_csv: empty file " + path.string());
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line);

    std::size_t label_col = header.size();
    std::vector<std::size_t> feature_cols;
    std::vector<std::string> feature_names;
    std::vector<FeatureKind> feature_kinds;
    const std::set<std::string> dropped(schema.drop.begin(), schema.drop.end());
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == schema.label_column) {
            if (label_col != header.size()) {
                throw std::runtime_error("load_csv: duplicate label column '" +
                                         schema.label_column + "'");
            }
            label_col = c;
            continue;
        }
        if (dropped.count(header[c])) continue;
        feature_cols.push_back(c);
        feature_names.push_back(header[c]);
        auto it = schema.kinds.find(header[c]);
        feature_kinds.push_back(it != schema.kinds.end() ? it->second
                                                         : FeatureKind::continuous);
    }
    if (label_col == header.size()) {
        throw std::runtime_error("load_csv: label column '" + schema.label_column +
                                 "' not found in " + path.string());
    }

    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error("load_csv: row " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " columns, expected " +
                                     std::to_string(header.size()));
        }
        rows.push_back(std::move(fields));
    }

    const std::size_t n = rows.size();
    const std::size_t m = feature_cols.size();

    // Labels first: fail early on a non-binary target.
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = rows[i][label_col];
        if (!schema.label_map.empty()) {
            auto it = schema.label_map.find(cell);
            if (it == schema.label_map.end()) {
                throw std::runtime_error("load_csv: unmapped label '" + cell + "' at row " +
                                         std::to_string(i + 2));
            }
            labels[i] = it->second;
        } else {
            double v = 0.0;
            if (!parse_number(cell, v) || (v != 0.0 && v != 1.0)) {
                throw std::runtime_error("load_csv: non-binary label '" + cell +
                                         "' at row " + std::to_string(i + 2));
            }
            labels[i] = static_cast<int>(v);
        }
        if (labels[i] != 0 && labels[i] != 1) {
            throw std::runtime_error("load_csv: non-binary label mapping for '" + cell + "'");
        }
    }

    // Discrete columns: collect the category vocabulary, sorted for a
    // canonical code assignment.
    std::vector<std::vector<std::string>> categories(m);
    std::vector<std::map<std::string, double>> codes(m);
    for (std::size_t f = 0; f < m; ++f) {
        if (feature_kinds[f] != FeatureKind::discrete) continue;
        std::set<std::string> vocab;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string& cell = rows[i][feature_cols[f]];
            if (!is_missing(cell)) vocab.insert(cell);
        }
        categories[f].assign(vocab.begin(), vocab.end());
        for (std::size_t c = 0; c < categories[f].size(); ++c) {
            codes[f][categories[f][c]] = static_cast<double>(c);
        }
    }

    Dataset ds;
    ds.features = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < m; ++f) {
            const std::string& cell = rows[i][feature_cols[f]];
            if (is_missing(cell)) {
                ds.features(i, f) = std::numeric_limits<double>::quiet_NaN();
            } else if (feature_kinds[f] == FeatureKind::discrete) {
                ds.features(i, f) = codes[f][cell];
            } else {
                double v = 0.0;
                if (!parse_number(cell, v)) {
                    throw std::runtime_error("load_csv: non-numeric value '" + cell +
                                             "' in continuous column '" + feature_names[f] +
                                             "' at row " + std::to_string(i + 2));
                }
                ds.features(i, f) = v;
            }
        }
    }
    ds.labels = std::move(labels);
    ds.feature_names = std::move(feature_names);
    ds.feature_kinds = std::move(feature_kinds);
    ds.categories = std::move(categories);
    ds.provenance = path.string();
    validate(ds, /*allow_missing=*/true);
    return ds;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path,
              const std::string& label_column) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_csv: cannot write " + path.string());
    }
    for (std::size_t f = 0; f < ds.n_features(); ++f) {
        out << ds.feature_names[f] << ',';
    }
    out << label_column << '\n';

    char buf[40];
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t f = 0; f < ds.n_features(); ++f) {
            const double v = ds.features(i, f);
            if (std::isnan(v)) {
                out << '?';
            } else if (!ds.categories.empty() && !ds.categories[f].empty()) {
                out << ds.categories[f][static_cast<std::size_t>(v)];
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << buf;
            }
            out << ',';
        }
        out << ds.labels[i] << '\n';
    }
}

DatasetConfig load_dataset_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("dataset config: cannot open " + path.string());
    }
    nlohmann::json j;
    in >> j;

    DatasetConfig cfg;
    cfg.name = j.value("name", path.stem().string());
    cfg.url = j.value("url", "");
    cfg.schema.label_column = j.at("label").get<std::string>();
    if (j.contains("kinds")) {
        for (auto& [col, kind] : j.at("kinds").items()) {
            const std::string k = kind.get<std::string>();
            if (k != "continuous" && k != "discrete") {
                throw std::runtime_error("dataset config: unknown kind '" + k + "' for '" +
                                         col + "'");
            }
            cfg.schema.kinds[col] =
                k == "discrete" ? FeatureKind::discrete : FeatureKind::continuous;
        }
    }
    if (j.contains("label_map")) {
        for (auto& [value, mapped] : j.at("label_map").items()) {
            cfg.schema.label_map[value] = mapped.get<int>();
        }
    }
    if (j.contains("drop")) {
        cfg.schema.drop = j.at("drop").get<std::vector<std::string>>();
    }
    return cfg;
}

}  // namespace treebench
