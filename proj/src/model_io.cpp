#include "mnemorank/ensemble.hpp"
#include "mnemorank/error.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace mnemorank {
namespace {

constexpr const char* kFormat = "mnemorank-model";
constexpr int kVersion = 1;

using nlohmann::json;

json tree_to_json(const DecisionTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes()) {
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.label}));
    }
    return nodes;
}

DecisionTree tree_from_json(const json& j) {
    std::vector<TreeNode> nodes;
    nodes.reserve(j.size());
    for (const auto& n : j) {
        nodes.push_back({n.at(0).get<std::int32_t>(), n.at(1).get<double>(), n.at(2).get<std::uint32_t>(),
                         n.at(3).get<std::uint32_t>(), n.at(4).get<ClassId>()});
    }
    return DecisionTree(std::move(nodes));
}

} // namespace

void save_model(std::ostream& out, const Model& model) {
    const auto& c = model.config;
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["config"] = {{"kind", std::string(to_string(c.kind))},
                   {"trees_per_forest", c.trees_per_forest},
                   {"meta_iterations", c.meta_iterations},
                   {"bag_percent", c.bag_percent},
                   {"feature_subset_size", c.feature_subset_size},
                   {"seed", c.seed},
                   {"threads", c.threads}};
    j["class_names"] = model.class_names;
    j["feature_count"] = model.feature_count;
    json members = json::array();
    for (const auto& m : model.members) {
        json trees = json::array();
        for (const auto& t : m.forest.trees) {
            trees.push_back(tree_to_json(t));
        }
        members.push_back({{"weight", m.weight}, {"trees", trees}});
    }
    j["members"] = members;
    out << j.dump() << '\n';
}

Model load_model(std::istream& in) {
    json j;
    try {
        in >> j;
        if (j.at("format").get<std::string>() != kFormat) {
            fail(ErrorCode::InvalidArgument, "not a mnemorank model");
        }
        if (j.at("version").get<int>() != kVersion) {
            fail(ErrorCode::InvalidArgument, "unsupported model version " + std::to_string(j.at("version").get<int>()));
        }
        Model model;
        const auto& c = j.at("config");
        auto kind = parse_learner_kind(c.at("kind").get<std::string>());
        if (!kind) {
            fail(ErrorCode::InvalidArgument, "unknown learner kind in model");
        }
        model.config.kind = *kind;
        model.config.trees_per_forest = c.at("trees_per_forest").get<std::size_t>();
        model.config.meta_iterations = c.at("meta_iterations").get<std::size_t>();
        model.config.bag_percent = c.at("bag_percent").get<double>();
        model.config.feature_subset_size = c.at("feature_subset_size").get<std::size_t>();
        model.config.seed = c.at("seed").get<std::uint64_t>();
        model.config.threads = c.at("threads").get<unsigned>();
        model.class_names = j.at("class_names").get<std::vector<std::string>>();
        model.feature_count = j.at("feature_count").get<std::size_t>();
        for (const auto& m : j.at("members")) {
            CommitteeMember member;
            member.weight = m.at("weight").get<double>();
            for (const auto& t : m.at("trees")) {
                member.forest.trees.push_back(tree_from_json(t));
            }
            model.members.push_back(std::move(member));
        }
        if (model.members.empty() || model.class_names.empty()) {
            fail(ErrorCode::InvalidArgument, "model has no members or no classes");
        }
        for (const auto& m : model.members) {
            for (const auto& t : m.forest.trees) {
                for (const auto& n : t.nodes()) {
                    if (n.label >= model.class_names.size() ||
                        (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= model.feature_count)) {
                        fail(ErrorCode::InvalidArgument, "model tree references an unknown class or feature");
                    }
                }
            }
        }
        return model;
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidArgument, std::string("malformed model file: ") + e.what());
    }
}

} // namespace mnemorank
