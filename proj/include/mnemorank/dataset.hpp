#pragma once

#include "mnemorank/features.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mnemorank {

using ClassId = std::uint32_t;

// Dense row-major feature values with one active label per row. Class ids
// index `class_names()`, which is sorted, so comparing ids compares names.
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(std::vector<double> values, std::size_t feature_count, std::span<const std::string> labels);

    static LabeledDataset from_matrix(const FeatureMatrix& matrix, LabelTarget target);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t feature_count() const noexcept { return feature_count_; }
    std::size_t class_count() const noexcept { return class_names_.size(); }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values_).subspan(i * feature_count_, feature_count_);
    }
    double value(std::size_t i, std::size_t feature) const noexcept { return values_[i * feature_count_ + feature]; }
    ClassId label(std::size_t i) const noexcept { return labels_[i]; }
    std::span<const ClassId> labels() const noexcept { return labels_; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    // Rows in the given order, class names preserved even when a class is
    // absent from the subset.
    LabeledDataset subset(std::span<const std::size_t> rows) const;

private:
    std::vector<double> values_;
    std::size_t feature_count_ = 0;
    std::vector<ClassId> labels_;
    std::vector<std::string> class_names_;
};

} // namespace mnemorank
