#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "treebench/dataset.hpp"

namespace treebench {

// Column-role map for a CSV file. Exactly one column is the label; every
// other column defaults to continuous unless listed in `kinds`. `label_map`
// translates raw label strings to {0,1} (e.g. ">50K" -> 1); when empty the
// label column must already contain 0/1.
struct ColumnSchema {
    std::string label_column;
    std::map<std::string, FeatureKind> kinds;
    std::map<std::string, int> label_map;
    std::vector<std::string> drop;  // columns ignored at load time
};

// Loads a comma-separated file (header row required, UTF-8). Missing-value
// sentinels are the empty cell and "?"; they are stored as NaN so encode()
// can impute them later. Discrete cells become ordinal codes against the
// column's sorted category table, kept on the returned dataset.
Dataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema);

// Writes features + label in the same CSV dialect (17 significant digits,
// so a round trip is value-exact). Discrete codes are written back as their
// category names when a table is present.
void save_csv(const Dataset& ds, const std::filesystem::path& path,
              const std::string& label_column = "y");

// Reads a per-dataset sidecar config (JSON): label column, column kinds,
// optional label_map / drop list, and the upstream fetch URL.
struct DatasetConfig {
    std::string name;
    std::string url;
    ColumnSchema schema;
};

DatasetConfig load_dataset_config(const std::filesystem::path& path);

}  // namespace treebench
