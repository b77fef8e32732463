#pragma once

#include <span>

#include "treebench/dataset.hpp"
#include "treebench/rng.hpp"
#include "treebench/tree.hpp"

namespace treebench::detail {

// Grows one CART tree on the given row multiset (bootstrap duplicates
// allowed). feature_subsample = 0 considers all features at every node;
// otherwise that many distinct features are drawn per node from `rng`.
TreeModel fit_tree_on(const Dataset& ds, std::span<const std::size_t> rows,
                      const TreeParams& params, std::size_t feature_subsample, Rng& rng);

}  // namespace treebench::detail
