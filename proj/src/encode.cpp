#include "treebench/encode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace treebench {

namespace {

double column_median(const Matrix& m, std::size_t col) {
    std::vector<double> vals;
    vals.reserve(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (std::isfinite(m(i, col))) vals.push_back(m(i, col));
    }
    if (vals.empty()) {
        throw std::invalid_argument("encode: column " + std::to_string(col) +
                                    " has no observed values to impute from");
    }
    std::sort(vals.begin(), vals.end());
    const std::size_t k = vals.size();
    return k % 2 == 1 ? vals[k / 2] : 0.5 * (vals[k / 2 - 1] + vals[k / 2]);
}

double most_frequent_code(const Matrix& m, std::size_t col) {
    std::map<double, std::size_t> counts;
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (std::isfinite(m(i, col))) ++counts[m(i, col)];
    }
    if (counts.empty()) {
        throw std::invalid_argument("encode: column " + std::to_string(col) +
                                    " has no observed values to impute from");
    }
    // Ties resolve to the lowest code (map iteration order).
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

}  // namespace

double EncodingTable::encode_category(std::size_t col, const std::string& category) const {
    const auto& enc = columns.at(col);
    const auto it = std::lower_bound(enc.categories.begin(), enc.categories.end(), category);
    if (it == enc.categories.end() || *it != category) {
        throw std::out_of_range("encoding: unseen category '" + category + "' in column " +
                                std::to_string(col));
    }
    return static_cast<double>(it - enc.categories.begin());
}

const std::string& EncodingTable::decode_category(std::size_t col, std::size_t code) const {
    const auto& enc = columns.at(col);
    if (code >= enc.categories.size()) {
        throw std::out_of_range("encoding: code " + std::to_string(code) +
                                " out of range for column " + std::to_string(col));
    }
    return enc.categories[code];
}

EncodeResult encode(const Dataset& ds) {
    EncodeResult out;
    out.dataset = ds;
    out.table.columns.resize(ds.n_features());

    for (std::size_t f = 0; f < ds.n_features(); ++f) {
        ColumnEncoding& enc = out.table.columns[f];
        enc.kind = ds.feature_kinds[f];
        if (enc.kind == FeatureKind::discrete && f < ds.categories.size()) {
            enc.categories = ds.categories[f];
        }

        bool any_missing = false;
        for (std::size_t i = 0; i < ds.n(); ++i) {
            if (!std::isfinite(ds.features(i, f))) {
                any_missing = true;
                break;
            }
        }
        enc.impute_value = enc.kind == FeatureKind::discrete
                               ? most_frequent_code(ds.features, f)
                               : column_median(ds.features, f);
        if (any_missing) {
            for (std::size_t i = 0; i < ds.n(); ++i) {
                if (!std::isfinite(out.dataset.features(i, f))) {
                    out.dataset.features(i, f) = enc.impute_value;
                }
            }
        }
    }
    validate(out.dataset);
    return out;
}

Dataset apply_encoding(const EncodingTable& table, const Dataset& ds) {
    if (table.columns.size() != ds.n_features()) {
        throw std::invalid_argument("apply_encoding: table has " +
                                    std::to_string(table.columns.size()) +
                                    " columns, dataset has " +
                                    std::to_string(ds.n_features()));
    }
    Dataset out = ds;
    for (std::size_t f = 0; f < ds.n_features(); ++f) {
        const ColumnEncoding& enc = table.columns[f];
        for (std::size_t i = 0; i < ds.n(); ++i) {
            const double v = ds.features(i, f);
            if (!std::isfinite(v)) {
                out.features(i, f) = enc.impute_value;
            } else if (enc.kind == FeatureKind::discrete) {
                // Map through category names so codes fitted on another
                // file line up; unseen names fail loudly.
                if (f >= ds.categories.size() ||
                    static_cast<std::size_t>(v) >= ds.categories[f].size()) {
                    throw std::out_of_range("apply_encoding: row " + std::to_string(i) +
                                            " column " + std::to_string(f) +
                                            " has no category name for code " +
                                            std::to_string(v));
                }
                out.features(i, f) =
                    table.encode_category(f, ds.categories[f][static_cast<std::size_t>(v)]);
            }
        }
        if (enc.kind == FeatureKind::discrete) {
            out.categories.resize(ds.n_features());
            out.categories[f] = enc.categories;
        }
    }
    validate(out);
    return out;
}

}  // namespace treebench
