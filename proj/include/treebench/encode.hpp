#pragma once

#include <string>
#include <vector>

#include "treebench/dataset.hpp"

namespace treebench {

// Fitted per-column encoding: the persisted category -> integer table for
// discrete columns plus the imputation value used for missing cells
// (column median for continuous, most frequent category for discrete).
struct ColumnEncoding {
    FeatureKind kind = FeatureKind::continuous;
    std::vector<std::string> categories;  // sorted; code = index
    double impute_value = 0.0;
};

struct EncodingTable {
    int version = 1;
    std::vector<ColumnEncoding> columns;

    // Code for `category` in column `col`; throws on a category that was
    // not present when the table was fitted (no silent bucket).
    double encode_category(std::size_t col, const std::string& category) const;
    // Inverse lookup, for round-tripping encoded data back to names.
    const std::string& decode_category(std::size_t col, std::size_t code) const;
};

struct EncodeResult {
    Dataset dataset;
    EncodingTable table;
};

// Fits the encoding on `ds` and returns the imputed, fully finite dataset.
// Row count is unchanged; discrete codes are re-expressed against the
// fitted table.
EncodeResult encode(const Dataset& ds);

// Applies a previously fitted table to another raw dataset. Categories are
// matched by name; an unseen category raises an error naming row/column.
Dataset apply_encoding(const EncodingTable& table, const Dataset& ds);

}  // namespace treebench
