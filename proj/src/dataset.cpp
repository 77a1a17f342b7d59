#include "mnemorank/dataset.hpp"

#include "mnemorank/error.hpp"

#include <algorithm>

namespace mnemorank {

LabeledDataset::LabeledDataset(std::vector<double> values, std::size_t feature_count,
                               std::span<const std::string> labels)
    : values_(std::move(values)), feature_count_(feature_count) {
    if (feature_count_ == 0) {
        fail(ErrorCode::InvalidArgument, "dataset needs at least one feature");
    }
    if (values_.size() != labels.size() * feature_count_) {
        fail(ErrorCode::DimensionMismatch, "value count is not rows x features");
    }
    class_names_.assign(labels.begin(), labels.end());
    std::sort(class_names_.begin(), class_names_.end());
    class_names_.erase(std::unique(class_names_.begin(), class_names_.end()), class_names_.end());
    if (!class_names_.empty() && class_names_.front().empty()) {
        fail(ErrorCode::InvalidArgument, "every row needs a non-empty label");
    }
    labels_.reserve(labels.size());
    for (const auto& l : labels) {
        const auto it = std::lower_bound(class_names_.begin(), class_names_.end(), l);
        labels_.push_back(static_cast<ClassId>(it - class_names_.begin()));
    }
}

LabeledDataset LabeledDataset::from_matrix(const FeatureMatrix& matrix, LabelTarget target) {
    if (matrix.rows.empty()) {
        fail(ErrorCode::EmptyMatrix, "feature matrix has no samples");
    }
    const std::size_t f = matrix.vocabulary.size();
    std::vector<double> values;
    values.reserve(matrix.rows.size() * f);
    std::vector<std::string> labels;
    labels.reserve(matrix.rows.size());
    for (const auto& row : matrix.rows) {
        if (row.values.size() != f) {
            fail(ErrorCode::DimensionMismatch, "row '" + row.sample_id + "' does not match the vocabulary");
        }
        values.insert(values.end(), row.values.begin(), row.values.end());
        labels.push_back(row.label(target));
    }
    return LabeledDataset(std::move(values), f, labels);
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
    LabeledDataset out;
    out.feature_count_ = feature_count_;
    out.class_names_ = class_names_;
    out.values_.reserve(rows.size() * feature_count_);
    out.labels_.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= size()) {
            fail(ErrorCode::InvalidArgument, "row index out of range");
        }
        const auto src = row(r);
        out.values_.insert(out.values_.end(), src.begin(), src.end());
        out.labels_.push_back(labels_[r]);
    }
    return out;
}

} // namespace mnemorank
