#include "treebench/model.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace treebench {

namespace {

constexpr int kModelFormatVersion = 1;

nlohmann::json tree_to_json(const TreeModel& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t id = 0; id < tree.nodes().size(); ++id) {
        const TreeNode& nd = tree.nodes()[id];
        nodes.push_back({{"id", id},
                         {"feature", nd.feature},
                         {"threshold", nd.threshold},
                         {"left", nd.left},
                         {"right", nd.right},
                         {"samples", nd.samples},
                         {"gini", nd.gini},
                         {"counts", nd.class_counts}});
    }
    return {{"nodes", nodes},
            {"feature_count", tree.feature_count()},
            {"prior", tree.training_prior()},
            {"max_depth", tree.max_depth()}};
}

TreeModel tree_from_json(const nlohmann::json& j) {
    std::vector<TreeNode> nodes(j.at("nodes").size());
    for (const auto& nj : j.at("nodes")) {
        TreeNode nd;
        nd.feature = nj.at("feature").get<int>();
        nd.threshold = nj.at("threshold").get<double>();
        nd.left = nj.at("left").get<int>();
        nd.right = nj.at("right").get<int>();
        nd.samples = nj.at("samples").get<std::size_t>();
        nd.gini = nj.at("gini").get<double>();
        nd.class_counts = nj.at("counts").get<std::array<std::size_t, 2>>();
        nodes.at(nj.at("id").get<std::size_t>()) = nd;
    }
    return TreeModel(std::move(nodes), j.at("feature_count").get<std::size_t>(),
                     j.at("prior").get<std::array<double, 2>>(),
                     j.at("max_depth").get<std::size_t>());
}

}  // namespace

std::size_t Model::feature_count() const {
    return is_tree() ? tree().feature_count() : forest().feature_count();
}

double Model::prob1(std::span<const double> x) const {
    return is_tree() ? tree().prob1(x) : forest().prob1(x);
}

int Model::predict(std::span<const double> x) const {
    return is_tree() ? tree().predict(x) : forest().predict(x);
}

std::vector<double> Model::importance() const {
    return is_tree() ? gini_importance(tree()) : gini_importance(forest());
}

double Model::accuracy_on(const Dataset& ds, std::span<const std::size_t> indices) const {
    return is_tree() ? accuracy(tree(), ds, indices) : accuracy(forest(), ds, indices);
}

std::string model_to_json(const Model& model) {
    nlohmann::json j;
    j["version"] = kModelFormatVersion;
    j["kind"] = model.kind();
    if (model.is_tree()) {
        j["tree"] = tree_to_json(model.tree());
    } else {
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& tree : model.forest().trees()) trees.push_back(tree_to_json(tree));
        j["trees"] = trees;
        j["tree_seeds"] = model.forest().tree_seeds();
        j["feature_subsample"] = model.forest().feature_subsample();
    }
    return j.dump(2);
}

Model model_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("version").get<int>() != kModelFormatVersion) {
        throw std::runtime_error("model: unsupported format version");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "tree") {
        return Model(tree_from_json(j.at("tree")));
    }
    if (kind == "forest") {
        std::vector<TreeModel> trees;
        for (const auto& tj : j.at("trees")) trees.push_back(tree_from_json(tj));
        return Model(ForestModel(std::move(trees),
                                 j.at("tree_seeds").get<std::vector<std::uint64_t>>(),
                                 j.at("feature_subsample").get<std::size_t>()));
    }
    throw std::runtime_error("model: unknown kind '" + kind + "'");
}

void save_model(const Model& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_model: cannot write " + path.string());
    }
    out << model_to_json(model) << '\n';
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_model: cannot open " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace treebench
