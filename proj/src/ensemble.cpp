#include "mnemorank/ensemble.hpp"

#include "mnemorank/error.hpp"
#include "mnemorank/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace mnemorank {

std::string_view to_string(LearnerKind kind) noexcept {
    switch (kind) {
    case LearnerKind::RandomForest: return "rf";
    case LearnerKind::Bagging: return "bagging";
    case LearnerKind::AdaBoostM1: return "adaboost";
    case LearnerKind::MultiBoostAB: return "multiboost";
    }
    return "?";
}

std::optional<LearnerKind> parse_learner_kind(std::string_view name) noexcept {
    if (name == "rf") {
        return LearnerKind::RandomForest;
    }
    if (name == "bagging") {
        return LearnerKind::Bagging;
    }
    if (name == "adaboost" || name == "adaboost_m1") {
        return LearnerKind::AdaBoostM1;
    }
    if (name == "multiboost" || name == "multiboost_ab") {
        return LearnerKind::MultiBoostAB;
    }
    return std::nullopt;
}

void validate(const LearnerConfig& config) {
    if (config.trees_per_forest < 1) {
        fail(ErrorCode::InvalidArgument, "trees_per_forest must be at least 1");
    }
    if (config.meta_iterations < 1) {
        fail(ErrorCode::InvalidArgument, "meta_iterations must be at least 1");
    }
    if (!(config.bag_percent > 0.0 && config.bag_percent <= 1000.0)) {
        fail(ErrorCode::InvalidArgument, "bag_percent must lie in (0, 1000]");
    }
}

std::size_t default_feature_subset_size(std::size_t feature_count) noexcept {
    if (feature_count == 0) {
        return 0;
    }
    // floor(log2(F)) + 1 equals the bit width of F.
    return static_cast<std::size_t>(std::bit_width(feature_count));
}

ClassId Forest::predict(std::span<const double> features, std::size_t class_count) const {
    std::vector<std::size_t> votes(class_count, 0);
    for (const auto& tree : trees) {
        ++votes[tree.predict(features)];
    }
    return static_cast<ClassId>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

namespace {

std::size_t draw_weighted(std::span<const double> cumulative, Rng& rng) {
    const double u = uniform01(rng) * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto i = static_cast<std::size_t>(it - cumulative.begin());
    return std::min(i, cumulative.size() - 1);
}

std::vector<double> normalized(std::vector<double> w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) {
        x /= total;
    }
    return w;
}

std::vector<bool> misclassified(const LabeledDataset& data, const Forest& forest) {
    std::vector<bool> wrong(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        wrong[i] = forest.predict(data.row(i), data.class_count()) != data.label(i);
    }
    return wrong;
}

double weighted_error(std::span<const double> weights, const std::vector<bool>& wrong) {
    double err = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (wrong[i]) {
            err += weights[i];
        }
    }
    return err;
}

constexpr double kMinBeta = 1e-10;

Model train_boosted(const LabeledDataset& data, const LearnerConfig& config, BoostingTrace* trace) {
    const bool multiboost = config.kind == LearnerKind::MultiBoostAB;
    const std::size_t n = data.size();
    const std::size_t iterations = config.meta_iterations;
    const auto boundaries = multiboost ? multiboost_boundaries(iterations) : std::vector<std::size_t>{};

    Model model{config, data.class_names(), data.feature_count(), {}};
    std::optional<Forest> fallback;
    std::vector<double> weights(n, 1.0 / static_cast<double>(n));

    for (std::size_t t = 1; t <= iterations; ++t) {
        Forest forest = train_forest(data, config, weights, t - 1);
        const auto wrong = misclassified(data, forest);
        const double err = weighted_error(weights, wrong);
        bool kept = false;
        bool reset = multiboost && std::binary_search(boundaries.begin(), boundaries.end(), t);
        bool stop = false;

        if (err >= 0.5) {
            if (!fallback) {
                fallback = std::move(forest);
            }
            reset = multiboost;
            stop = !multiboost;
        } else if (err == 0.0) {
            model.members.push_back({std::log(1.0 / kMinBeta), std::move(forest)});
            kept = true;
            reset = multiboost;
            stop = !multiboost;
        } else {
            const double beta = err / (1.0 - err);
            model.members.push_back({std::log(1.0 / beta), std::move(forest)});
            kept = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (!wrong[i]) {
                    weights[i] *= beta;
                }
            }
            weights = normalized(std::move(weights));
        }

        if (reset && t < iterations) {
            Rng rng = derive_stream(config.seed, StreamDomain::Wagging, t);
            weights = wagging_weights(n, rng);
        }
        if (trace) {
            trace->errors.push_back(err);
            trace->kept.push_back(kept);
            trace->weights.push_back(weights);
            if (reset && t < iterations) {
                trace->resets.push_back(t);
            }
        }
        if (stop) {
            break;
        }
    }

    // Every iteration failed: keep the first forest so the committee is usable.
    if (model.members.empty()) {
        model.members.push_back({1.0, std::move(*fallback)});
    }
    return model;
}

} // namespace

Forest train_forest(const LabeledDataset& data, const LearnerConfig& config, std::span<const double> weights,
                    std::size_t member_index, std::size_t sample_size) {
    validate(config);
    if (data.size() == 0) {
        fail(ErrorCode::InvalidArgument, "cannot train on an empty dataset");
    }
    if (weights.size() != data.size()) {
        fail(ErrorCode::DimensionMismatch, "one instance weight per row is required");
    }
    std::vector<double> cumulative(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            fail(ErrorCode::DegenerateWeights, "instance weights must be finite and non-negative");
        }
        total += weights[i];
        cumulative[i] = total;
    }
    if (!(total > 0.0)) {
        fail(ErrorCode::DegenerateWeights, "instance weights sum to zero");
    }

    const std::size_t draws = sample_size == 0 ? data.size() : sample_size;
    const std::size_t subset = config.feature_subset_size == 0
                                   ? default_feature_subset_size(data.feature_count())
                                   : std::min(config.feature_subset_size, data.feature_count());

    Forest forest;
    forest.trees.resize(config.trees_per_forest);
    parallel_for(config.trees_per_forest, config.threads, [&](std::size_t j) {
        Rng rng = derive_stream(config.seed, StreamDomain::Tree, member_index * config.trees_per_forest + j);
        std::vector<std::size_t> rows(draws);
        for (auto& r : rows) {
            r = draw_weighted(cumulative, rng);
        }
        forest.trees[j] = train_tree(data, rows, subset, rng);
    });
    return forest;
}

std::vector<std::size_t> multiboost_boundaries(std::size_t iterations) {
    if (iterations == 0) {
        return {};
    }
    auto committees = static_cast<std::size_t>(std::sqrt(static_cast<double>(iterations)));
    while (committees * committees < iterations) {
        ++committees;
    }
    while (committees > 1 && (committees - 1) * (committees - 1) >= iterations) {
        --committees;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i <= committees; ++i) {
        out.push_back((i * iterations + committees - 1) / committees);
    }
    return out;
}

std::vector<double> wagging_weights(std::size_t n, Rng& rng) {
    std::vector<double> w(n);
    for (double& x : w) {
        x = -std::log(uniform01_open_zero(rng));
    }
    // u = 1 gives weight 0; an all-zero draw is astronomically unlikely but
    // would make the weights unusable.
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
        std::fill(w.begin(), w.end(), 1.0);
    }
    return normalized(std::move(w));
}

Model train_meta(const LabeledDataset& data, const LearnerConfig& config, BoostingTrace* trace) {
    validate(config);
    if (data.size() == 0) {
        fail(ErrorCode::InvalidArgument, "cannot train on an empty dataset");
    }
    const std::size_t n = data.size();

    switch (config.kind) {
    case LearnerKind::RandomForest: {
        Model model{config, data.class_names(), data.feature_count(), {}};
        model.members.push_back({1.0, train_forest(data, config, std::vector<double>(n, 1.0), 0)});
        return model;
    }
    case LearnerKind::Bagging: {
        Model model{config, data.class_names(), data.feature_count(), {}};
        const auto bag_size = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(config.bag_percent / 100.0 * static_cast<double>(n))));
        for (std::size_t m = 0; m < config.meta_iterations; ++m) {
            Rng rng = derive_stream(config.seed, StreamDomain::Bag, m);
            std::vector<double> multiplicity(n, 0.0);
            for (std::size_t i = 0; i < bag_size; ++i) {
                multiplicity[uniform_index(rng, n)] += 1.0;
            }
            model.members.push_back({1.0, train_forest(data, config, multiplicity, m, bag_size)});
        }
        return model;
    }
    case LearnerKind::AdaBoostM1:
    case LearnerKind::MultiBoostAB:
        if (data.class_count() < 2) {
            fail(ErrorCode::SingleClassData, "boosting needs at least two classes");
        }
        return train_boosted(data, config, trace);
    }
    fail(ErrorCode::Internal, "unhandled learner kind");
}

Prediction predict(const Model& model, std::span<const double> features) {
    if (features.size() != model.feature_count) {
        fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(model.feature_count) + " features, got " +
                                               std::to_string(features.size()));
    }
    const std::size_t k = model.class_names.size();
    std::vector<double> votes(k, 0.0);
    for (const auto& member : model.members) {
        votes[member.forest.predict(features, k)] += member.weight;
    }
    Prediction p;
    p.class_id = static_cast<ClassId>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    p.label = model.class_names[p.class_id];
    for (std::size_t c = 0; c < k; ++c) {
        p.votes[model.class_names[c]] = votes[c];
    }
    return p;
}

} // namespace mnemorank
