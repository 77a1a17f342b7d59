#pragma once

#include "mnemorank/dataset.hpp"
#include "mnemorank/ensemble.hpp"
#include "mnemorank/features.hpp"
#include "mnemorank/rank.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mnemorank {

class RankCache;

// Rows are actual classes, columns predicted classes.
using ConfusionMatrix = std::vector<std::vector<std::uint64_t>>;

struct ClassMetrics {
    std::string name;
    std::uint64_t support = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

struct Metrics {
    std::vector<ClassMetrics> per_class;
    double weighted_f = 0.0;  // support-weighted mean of per-class f
    double macro_f = 0.0;
    double accuracy = 0.0;
};

// Zero denominators yield 0 for the affected precision, recall or f.
// `class_names` may be empty, in which case classes are named by index.
Metrics f_measure(const ConfusionMatrix& confusion, std::span<const std::string> class_names = {});

// Each class is shuffled with its own seeded order and dealt round-robin,
// the dealing position carrying over from one class to the next, so fold
// sizes differ by at most one overall and per class.
std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& data, std::size_t k, std::uint64_t seed);

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct EvalReport {
    std::vector<std::string> class_names;
    ConfusionMatrix confusion;
    Metrics metrics;
    double train_seconds = 0.0;
    double test_seconds = 0.0;
    ConfigEcho config;

    std::uint64_t total() const noexcept;
};

// k-fold cross-validation with one pooled confusion matrix. Fold i trains
// with seed derive_seed(seed, Fold, i); learner.seed is not used.
EvalReport cross_validate(const LabeledDataset& data, const LearnerConfig& learner, std::size_t k,
                          std::uint64_t seed);

void write_report_text(std::ostream& out, const EvalReport& report);
// key=value lines; timing keys come last.
void write_summary(std::ostream& out, const EvalReport& report);
EvalReport read_summary(std::istream& in);
void write_confusion_csv(std::ostream& out, const EvalReport& report);

struct SweepPoint {
    double d = 0.0;
    double weighted_f_type = 0.0;
    double weighted_f_family = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // d strictly increasing

    // Spearman rank correlation between d and weighted f.
    double trend(LabelTarget target) const;
    double best_d(LabelTarget target) const;
};

// For each d (sorted, duplicates removed) recomputes ranks and features and
// cross-validates both the type and the family labels.
SweepResult sweep_d(std::span<const MnemonicTrace> traces, const RankParams& base, std::span<const double> d_values,
                    const LearnerConfig& learner, std::size_t k, std::uint64_t seed, unsigned threads = 1,
                    RankCache* cache = nullptr);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

} // namespace mnemorank
