#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <variant>

#include "treebench/forest.hpp"
#include "treebench/tree.hpp"

namespace treebench {

// Either model family behind one prediction surface, so the pipeline and
// the explainers can stay agnostic about which one an experiment trains.
class Model {
public:
    Model() = default;
    explicit Model(TreeModel tree) : model_(std::move(tree)) {}
    explicit Model(ForestModel forest) : model_(std::move(forest)) {}

    bool is_tree() const { return std::holds_alternative<TreeModel>(model_); }
    const TreeModel& tree() const { return std::get<TreeModel>(model_); }
    const ForestModel& forest() const { return std::get<ForestModel>(model_); }

    std::size_t feature_count() const;
    double prob1(std::span<const double> x) const;
    int predict(std::span<const double> x) const;
    std::vector<double> importance() const;
    double accuracy_on(const Dataset& ds, std::span<const std::size_t> indices = {}) const;

    std::string kind() const { return is_tree() ? "tree" : "forest"; }

private:
    std::variant<TreeModel, ForestModel> model_;
};

// JSON serialization (node list with ids, versioned) so experiments can be
// re-explained without retraining.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

}  // namespace treebench
