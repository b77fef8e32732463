#include "treebench/grid_search.hpp"

#include <stdexcept>

#include "treebench/resample.hpp"
#include "treebench/rng.hpp"

namespace treebench {

Model fit_model(const Dataset& ds, const ModelSpec& spec, std::uint64_t seed) {
    if (spec.kind == "tree") return Model(fit_tree(ds, spec.tree_params, seed));
    if (spec.kind == "forest") return Model(fit_forest(ds, spec.forest_params, seed));
    throw std::invalid_argument("fit_model: unknown model kind '" + spec.kind + "'");
}

GridSearchResult grid_search(const Dataset& ds, const std::vector<ModelSpec>& grid,
                             std::size_t k, std::uint64_t seed) {
    if (grid.empty()) {
        throw std::invalid_argument("grid_search: empty grid");
    }
    if (k < 2) {
        throw std::invalid_argument("grid_search: need k >= 2 folds");
    }
    const auto folds = kfold(ds.n(), k, derive_seed(seed, 0xcf01d));

    GridSearchResult result;
    result.cell_accuracies.reserve(grid.size());
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        double acc_sum = 0.0;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            const Dataset train = take_rows(ds, folds[f].train);
            const Model model = fit_model(train, grid[cell], derive_seed(seed, cell, f));
            acc_sum += model.accuracy_on(ds, folds[f].test);
        }
        const double mean_acc = acc_sum / static_cast<double>(folds.size());
        result.cell_accuracies.push_back(mean_acc);
        // Strictly-greater keeps the first cell in declared order on ties.
        if (cell == 0 || mean_acc > result.best_cv_accuracy) {
            result.best_index = cell;
            result.best_cv_accuracy = mean_acc;
        }
    }
    return result;
}

}  // namespace treebench
