#pragma once

#include "mnemorank/dataset.hpp"
#include "mnemorank/tree.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mnemorank {

enum class LearnerKind { RandomForest, Bagging, AdaBoostM1, MultiBoostAB };

std::string_view to_string(LearnerKind kind) noexcept;
// Accepts "rf", "bagging", "adaboost" / "adaboost_m1", "multiboost" / "multiboost_ab".
std::optional<LearnerKind> parse_learner_kind(std::string_view name) noexcept;

struct LearnerConfig {
    LearnerKind kind = LearnerKind::RandomForest;
    std::size_t trees_per_forest = 10;
    std::size_t meta_iterations = 10;
    double bag_percent = 100.0;
    // 0 selects floor(log2(F)) + 1.
    std::size_t feature_subset_size = 0;
    std::uint64_t seed = 1;
    // Worker threads for tree construction; results do not depend on it.
    unsigned threads = 1;

    friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

void validate(const LearnerConfig& config);

std::size_t default_feature_subset_size(std::size_t feature_count) noexcept;

struct Forest {
    std::vector<DecisionTree> trees;

    // Majority vote of the trees, ties to the lowest class id.
    ClassId predict(std::span<const double> features, std::size_t class_count) const;

    friend bool operator==(const Forest&, const Forest&) = default;
};

// Trains config.trees_per_forest trees, each on `sample_size` rows (0 = all
// N) drawn with replacement with probability proportional to the weights.
// Tree j of committee member m uses random stream m * trees_per_forest + j.
Forest train_forest(const LabeledDataset& data, const LearnerConfig& config, std::span<const double> weights,
                    std::size_t member_index = 0, std::size_t sample_size = 0);

struct CommitteeMember {
    double weight = 1.0;
    Forest forest;

    friend bool operator==(const CommitteeMember&, const CommitteeMember&) = default;
};

struct Model {
    LearnerConfig config;
    std::vector<std::string> class_names;
    std::size_t feature_count = 0;
    std::vector<CommitteeMember> members;

    friend bool operator==(const Model&, const Model&) = default;
};

// Per-iteration diagnostics of the boosting learners.
struct BoostingTrace {
    std::vector<double> errors;                 // weighted training error of iteration t
    std::vector<bool> kept;                     // whether iteration t joined the committee
    std::vector<std::vector<double>> weights;   // instance weights after iteration t
    std::vector<std::size_t> resets;            // iterations after which weights were wagged
};

// Sub-committee end points ceil(i * T / ceil(sqrt(T))), i = 1..ceil(sqrt(T)).
std::vector<std::size_t> multiboost_boundaries(std::size_t iterations);

// Continuous-Poisson wagging: -ln(u) per row, u uniform in (0, 1], normalised
// to sum to 1.
std::vector<double> wagging_weights(std::size_t n, Rng& rng);

Model train_meta(const LabeledDataset& data, const LearnerConfig& config, BoostingTrace* trace = nullptr);

struct Prediction {
    std::string label;
    ClassId class_id = 0;
    std::map<std::string, double> votes;
};

// Committee-weighted vote of each member's forest label; ties go to the
// lexicographically smallest label.
Prediction predict(const Model& model, std::span<const double> features);

// Versioned JSON carrying config, class names and every tree.
void save_model(std::ostream& out, const Model& model);
Model load_model(std::istream& in);

} // namespace mnemorank
