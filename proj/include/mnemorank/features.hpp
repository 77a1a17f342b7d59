#pragma once

#include "mnemorank/rank.hpp"
#include "mnemorank/trace.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mnemorank {

class RankCache;

enum class LabelTarget { Type, Family };

std::string_view to_string(LabelTarget target) noexcept;
std::optional<LabelTarget> parse_label_target(std::string_view name) noexcept;

enum class ExportFormat { Csv, Arff };

std::optional<ExportFormat> parse_export_format(std::string_view name) noexcept;

// Sorted, duplicate-free union of mnemonics seen across a corpus.
struct Vocabulary {
    std::vector<std::string> tokens;

    std::size_t size() const noexcept { return tokens.size(); }
    std::optional<std::size_t> position(std::string_view token) const;

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

struct FeatureRow {
    std::string sample_id;
    std::string type_label;
    std::string family_label;
    std::vector<double> values;

    const std::string& label(LabelTarget target) const noexcept {
        return target == LabelTarget::Type ? type_label : family_label;
    }

    friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

struct FeatureMatrix {
    Vocabulary vocabulary;
    std::vector<FeatureRow> rows;

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

Vocabulary build_vocabulary(std::span<const RankVector> rank_vectors);

// Rank of each vocabulary token, 0.0 where the sample never executed it.
std::vector<double> vectorize(const RankVector& ranks, const Vocabulary& vocabulary);

// Rank vectors for every trace, in input order. Graphs are built with or
// without self-visit edges as the variant requires. With a cache, results are
// looked up and stored by content hash of (trace, params).
std::vector<RankVector> rank_corpus(std::span<const MnemonicTrace> traces, const RankParams& params,
                                    unsigned threads = 1, RankCache* cache = nullptr);

// Aligns rank vectors over the vocabulary of the whole corpus.
FeatureMatrix build_feature_matrix(std::span<const MnemonicTrace> traces,
                                   std::span<const RankVector> rank_vectors);

FeatureMatrix featurize_corpus(std::span<const MnemonicTrace> traces, const RankParams& params,
                               unsigned threads = 1, RankCache* cache = nullptr);

// 12 significant digits; integral values keep a ".0" so the column reads as
// real-valued.
std::string format_value(double value);

// `config_echo` lines are written as ARFF '%' comments; CSV carries no
// comments and ignores it.
void export_matrix(std::ostream& out, const FeatureMatrix& matrix, ExportFormat format, LabelTarget label,
                   std::string_view config_echo = {});

// Reads CSV written by export_matrix; the label column fills `label`.
FeatureMatrix import_csv(std::istream& in, LabelTarget label);

} // namespace mnemorank
