#include "mnemorank/tree.hpp"

#include "mnemorank/error.hpp"

#include <algorithm>
#include <numeric>

namespace mnemorank {

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) {
        fail(ErrorCode::InvalidArgument, "a tree needs at least a root node");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (!n.is_leaf() && (n.left <= i || n.right <= i || n.left >= nodes_.size() || n.right >= nodes_.size())) {
            fail(ErrorCode::InvalidArgument, "tree child index out of order");
        }
    }
}

ClassId DecisionTree::predict(std::span<const double> features) const {
    std::uint32_t at = 0;
    for (;;) {
        const TreeNode& n = nodes_[at];
        if (n.is_leaf()) {
            return n.label;
        }
        const auto f = static_cast<std::size_t>(n.feature);
        if (f >= features.size()) {
            fail(ErrorCode::DimensionMismatch, "feature vector shorter than the tree expects");
        }
        at = features[f] <= n.threshold ? n.left : n.right;
    }
}

std::size_t DecisionTree::leaf_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const {
    std::vector<std::size_t> level(nodes_.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, level[i]);
        if (!nodes_[i].is_leaf()) {
            level[nodes_[i].left] = level[i] + 1;
            level[nodes_[i].right] = level[i] + 1;
        }
    }
    return deepest;
}

double gini_impurity(std::span<const std::uint64_t> class_counts) noexcept {
    const double total = static_cast<double>(std::accumulate(class_counts.begin(), class_counts.end(), std::uint64_t{0}));
    if (total == 0.0) {
        return 0.0;
    }
    double sum_sq = 0.0;
    for (auto c : class_counts) {
        const double p = static_cast<double>(c) / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

namespace {

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    // n * weighted child impurity, i.e. sum over children of n_k - S_k / n_k
    // where S_k is the sum of squared class counts.
    double score = 0.0;
    bool valid = false;
};

bool better(const Split& candidate, const Split& best) {
    if (!best.valid) {
        return true;
    }
    if (candidate.score != best.score) {
        return candidate.score < best.score;
    }
    if (candidate.feature != best.feature) {
        return candidate.feature < best.feature;
    }
    return candidate.threshold < best.threshold;
}

struct Work {
    std::uint32_t node;
    std::vector<std::size_t> rows;
};

class TreeGrower {
public:
    TreeGrower(const LabeledDataset& data, std::size_t subset_size, Rng& rng)
        : data_(data), subset_size_(subset_size), rng_(rng), features_(data.feature_count()) {
        std::iota(features_.begin(), features_.end(), std::size_t{0});
    }

    DecisionTree grow(std::span<const std::size_t> root_rows) {
        std::vector<TreeNode> nodes(1);
        std::vector<Work> stack;
        stack.push_back({0, std::vector<std::size_t>(root_rows.begin(), root_rows.end())});
        while (!stack.empty()) {
            Work work = std::move(stack.back());
            stack.pop_back();

            const auto counts = histogram(work.rows);
            TreeNode& node = nodes[work.node];
            node.label = majority(counts);
            const auto n = static_cast<double>(work.rows.size());
            const double parent_score = n - sum_squares(counts) / n;
            if (parent_score <= kTolerance * n) {
                continue;  // pure
            }

            const Split split = find_split(work.rows, parent_score);
            if (!split.valid) {
                continue;
            }

            std::vector<std::size_t> left_rows;
            std::vector<std::size_t> right_rows;
            for (std::size_t r : work.rows) {
                (data_.value(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
            }
            const auto left = static_cast<std::uint32_t>(nodes.size());
            node.feature = static_cast<std::int32_t>(split.feature);
            node.threshold = split.threshold;
            node.left = left;
            node.right = left + 1;
            nodes.resize(nodes.size() + 2);
            // Right pushed first so the left subtree is grown first.
            stack.push_back({left + 1, std::move(right_rows)});
            stack.push_back({left, std::move(left_rows)});
        }
        return DecisionTree(std::move(nodes));
    }

private:
    static constexpr double kTolerance = 1e-12;

    std::vector<std::uint64_t> histogram(std::span<const std::size_t> rows) const {
        std::vector<std::uint64_t> counts(data_.class_count(), 0);
        for (std::size_t r : rows) {
            ++counts[data_.label(r)];
        }
        return counts;
    }

    static ClassId majority(std::span<const std::uint64_t> counts) {
        return static_cast<ClassId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }

    static double sum_squares(std::span<const std::uint64_t> counts) {
        double s = 0.0;
        for (auto c : counts) {
            s += static_cast<double>(c) * static_cast<double>(c);
        }
        return s;
    }

    Split find_split(std::span<const std::size_t> rows, double parent_score) {
        shuffle(features_.begin(), features_.end(), rng_);
        Split best;
        std::size_t scored = 0;
        for (std::size_t f : features_) {
            if (scored >= subset_size_ && best.valid) {
                break;
            }
            ++scored;
            Split candidate = best_threshold(rows, f);
            if (candidate.valid && candidate.score < parent_score - kTolerance * static_cast<double>(rows.size()) &&
                better(candidate, best)) {
                best = candidate;
            }
        }
        return best;
    }

    Split best_threshold(std::span<const std::size_t> rows, std::size_t feature) {
        sorted_.clear();
        for (std::size_t r : rows) {
            sorted_.push_back({data_.value(r, feature), data_.label(r)});
        }
        std::sort(sorted_.begin(), sorted_.end());

        const std::size_t k = data_.class_count();
        left_.assign(k, 0);
        right_.assign(k, 0);
        for (const auto& [v, c] : sorted_) {
            ++right_[c];
        }
        double left_sq = 0.0;
        double right_sq = sum_squares(right_);

        Split best;
        const std::size_t n = sorted_.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const ClassId c = sorted_[i].second;
            left_sq += 2.0 * static_cast<double>(left_[c]) + 1.0;
            right_sq -= 2.0 * static_cast<double>(right_[c]) - 1.0;
            ++left_[c];
            --right_[c];

            const double a = sorted_[i].first;
            const double b = sorted_[i + 1].first;
            if (!(a < b)) {
                continue;
            }
            const auto nl = static_cast<double>(i + 1);
            const auto nr = static_cast<double>(n - i - 1);
            const double score = (nl - left_sq / nl) + (nr - right_sq / nr);
            double threshold = a + (b - a) / 2.0;
            if (!(threshold < b)) {
                threshold = a;
            }
            if (!best.valid || score < best.score) {
                best = {feature, threshold, score, true};
            }
        }
        return best;
    }

    const LabeledDataset& data_;
    std::size_t subset_size_;
    Rng& rng_;
    std::vector<std::size_t> features_;
    std::vector<std::pair<double, ClassId>> sorted_;
    std::vector<std::uint64_t> left_;
    std::vector<std::uint64_t> right_;
};

} // namespace

DecisionTree train_tree(const LabeledDataset& data, std::span<const std::size_t> row_indices,
                        std::size_t feature_subset_size, Rng& rng) {
    if (row_indices.empty()) {
        fail(ErrorCode::InvalidArgument, "cannot train a tree on zero rows");
    }
    if (feature_subset_size == 0 || feature_subset_size > data.feature_count()) {
        fail(ErrorCode::InvalidArgument, "feature subset size must lie in [1, feature count]");
    }
    if (data.class_count() == 0) {
        fail(ErrorCode::InvalidArgument, "dataset has no classes");
    }
    TreeGrower grower(data, feature_subset_size, rng);
    return grower.grow(row_indices);
}

} // namespace mnemorank
