#pragma once

#include "mnemorank/dataset.hpp"
#include "mnemorank/random.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mnemorank {

struct TreeNode {
    static constexpr std::int32_t kLeaf = -1;

    std::int32_t feature = kLeaf;  // split feature, kLeaf for leaves
    double threshold = 0.0;        // rows with value <= threshold go left
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    ClassId label = 0;  // majority class of the training rows at this node

    bool is_leaf() const noexcept { return feature == kLeaf; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Binary classification tree; node 0 is the root.
class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes);

    ClassId predict(std::span<const double> features) const;

    std::span<const TreeNode> nodes() const noexcept { return nodes_; }
    std::size_t leaf_count() const noexcept;
    std::size_t depth() const;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
};

// Gini impurity 1 - sum_c p_c^2 of a class histogram.
double gini_impurity(std::span<const std::uint64_t> class_counts) noexcept;

// Grows an unpruned tree on a multiset of rows. At every node features are
// examined in a random order; at least `feature_subset_size` are scored, and
// scoring continues past that only until some split lowers the impurity.
// Ties prefer the lowest feature index and then the lowest threshold; leaves
// predict the majority class, ties going to the lowest class id.
DecisionTree train_tree(const LabeledDataset& data, std::span<const std::size_t> row_indices,
                        std::size_t feature_subset_size, Rng& rng);

} // namespace mnemorank
