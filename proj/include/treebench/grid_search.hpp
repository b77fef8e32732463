#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "treebench/forest.hpp"
#include "treebench/model.hpp"
#include "treebench/tree.hpp"

namespace treebench {

// One candidate configuration: which family to train plus its parameters.
struct ModelSpec {
    std::string kind = "tree";  // "tree" | "forest"
    TreeParams tree_params;
    ForestParams forest_params;
};

Model fit_model(const Dataset& ds, const ModelSpec& spec, std::uint64_t seed);

struct GridSearchResult {
    std::size_t best_index = 0;
    double best_cv_accuracy = 0.0;
    std::vector<double> cell_accuracies;  // mean fold accuracy, grid order
};

// Exhaustive k-fold cross-validated search over the given cells. Ties on
// mean accuracy keep the earliest cell in declared grid order.
GridSearchResult grid_search(const Dataset& ds, const std::vector<ModelSpec>& grid,
                             std::size_t k, std::uint64_t seed);

}  // namespace treebench
