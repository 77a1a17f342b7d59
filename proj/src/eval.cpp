#include "mnemorank/eval.hpp"

#include "mnemorank/error.hpp"
#include "mnemorank/random.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace mnemorank {
namespace {

std::string exact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) {
            out.push_back(sep);
        }
        out += items[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) {
        out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        fail(ErrorCode::InvalidArgument, "malformed number '" + s + "' in summary");
    }
    return v;
}

std::vector<double> average_ranks(const std::vector<double>& x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) {
            ++j;
        }
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t m = i; m <= j; ++m) {
            ranks[order[m]] = avg;
        }
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace

Metrics f_measure(const ConfusionMatrix& confusion, std::span<const std::string> class_names) {
    const std::size_t k = confusion.size();
    for (const auto& row : confusion) {
        if (row.size() != k) {
            fail(ErrorCode::NonSquare, "confusion matrix must be square");
        }
    }
    if (!class_names.empty() && class_names.size() != k) {
        fail(ErrorCode::DimensionMismatch, "one class name per confusion row is required");
    }

    std::vector<std::uint64_t> column_sums(k, 0);
    std::uint64_t total = 0;
    std::uint64_t diagonal = 0;
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            column_sums[c] += confusion[r][c];
            total += confusion[r][c];
        }
        diagonal += confusion[r][r];
    }

    Metrics m;
    double f_sum = 0.0;
    double weighted_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        ClassMetrics cm;
        cm.name = class_names.empty() ? std::to_string(c) : class_names[c];
        cm.support = std::accumulate(confusion[c].begin(), confusion[c].end(), std::uint64_t{0});
        const auto tp = static_cast<double>(confusion[c][c]);
        cm.precision = column_sums[c] ? tp / static_cast<double>(column_sums[c]) : 0.0;
        cm.recall = cm.support ? tp / static_cast<double>(cm.support) : 0.0;
        const double pr = cm.precision + cm.recall;
        cm.f_measure = pr > 0.0 ? 2.0 * cm.precision * cm.recall / pr : 0.0;
        weighted_sum += static_cast<double>(cm.support) * cm.f_measure;
        f_sum += cm.f_measure;
        m.per_class.push_back(std::move(cm));
    }
    m.weighted_f = total ? weighted_sum / static_cast<double>(total) : 0.0;
    m.macro_f = k ? f_sum / static_cast<double>(k) : 0.0;
    m.accuracy = total ? static_cast<double>(diagonal) / static_cast<double>(total) : 0.0;
    return m;
}

std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& data, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2) {
        fail(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
    }
    if (data.size() < k) {
        fail(ErrorCode::TooFewRows, std::to_string(data.size()) + " rows cannot fill " + std::to_string(k) + " folds");
    }
    std::vector<std::vector<std::size_t>> by_class(data.class_count());
    for (std::size_t i = 0; i < data.size(); ++i) {
        by_class[data.label(i)].push_back(i);
    }
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        Rng rng = derive_stream(seed, StreamDomain::Stratify, c);
        shuffle(by_class[c].begin(), by_class[c].end(), rng);
        for (std::size_t row : by_class[c]) {
            folds[next].push_back(row);
            next = (next + 1) % k;
        }
    }
    for (auto& f : folds) {
        std::sort(f.begin(), f.end());
    }
    return folds;
}

std::uint64_t EvalReport::total() const noexcept {
    std::uint64_t t = 0;
    for (const auto& row : confusion) {
        t = std::accumulate(row.begin(), row.end(), t);
    }
    return t;
}

EvalReport cross_validate(const LabeledDataset& data, const LearnerConfig& learner, std::size_t k,
                          std::uint64_t seed) {
    validate(learner);
    const auto folds = stratified_folds(data, k, seed);
    const std::size_t classes = data.class_count();

    EvalReport report;
    report.class_names = data.class_names();
    report.confusion.assign(classes, std::vector<std::uint64_t>(classes, 0));

    using clock = std::chrono::steady_clock;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<std::size_t> train_rows;
        train_rows.reserve(data.size() - folds[i].size());
        for (std::size_t j = 0; j < k; ++j) {
            if (j != i) {
                train_rows.insert(train_rows.end(), folds[j].begin(), folds[j].end());
            }
        }
        std::sort(train_rows.begin(), train_rows.end());
        const LabeledDataset train = data.subset(train_rows);

        LearnerConfig fold_config = learner;
        fold_config.seed = derive_seed(seed, StreamDomain::Fold, i);

        const auto t0 = clock::now();
        const Model model = train_meta(train, fold_config);
        const auto t1 = clock::now();
        for (std::size_t row : folds[i]) {
            const Prediction p = predict(model, data.row(row));
            ++report.confusion[data.label(row)][p.class_id];
        }
        const auto t2 = clock::now();
        report.train_seconds += std::chrono::duration<double>(t1 - t0).count();
        report.test_seconds += std::chrono::duration<double>(t2 - t1).count();
    }
    if (report.total() != data.size()) {
        fail(ErrorCode::Internal, "pooled confusion matrix does not cover every row exactly once");
    }
    report.metrics = f_measure(report.confusion, report.class_names);

    const auto& c = learner;
    report.config = {{"learner", std::string(to_string(c.kind))},
                     {"trees", std::to_string(c.trees_per_forest)},
                     {"meta_iterations", std::to_string(c.meta_iterations)},
                     {"bag_percent", exact(c.bag_percent)},
                     {"feature_subset", std::to_string(c.feature_subset_size)},
                     {"folds", std::to_string(k)},
                     {"seed", std::to_string(seed)}};
    return report;
}

void write_report_text(std::ostream& out, const EvalReport& report) {
    out << "Configuration\n";
    for (const auto& [k, v] : report.config) {
        out << "  " << k << ": " << v << '\n';
    }
    out << "\nSamples: " << report.total() << '\n';
    out << std::fixed << std::setprecision(4);
    out << "Weighted f-measure: " << report.metrics.weighted_f << '\n';
    out << "Macro f-measure:    " << report.metrics.macro_f << '\n';
    out << "Accuracy:           " << report.metrics.accuracy << "\n\n";

    std::size_t width = 5;
    for (const auto& n : report.class_names) {
        width = std::max(width, n.size());
    }
    const auto w = static_cast<int>(width);
    out << std::left << std::setw(w) << "class" << "  support  precision  recall  f-measure\n";
    for (const auto& c : report.metrics.per_class) {
        out << std::left << std::setw(w) << c.name << std::right << "  " << std::setw(7) << c.support << "  "
            << std::setw(9) << c.precision << "  " << std::setw(6) << c.recall << "  " << std::setw(9) << c.f_measure
            << '\n';
    }
    out << "\nConfusion matrix (rows actual, columns predicted)\n";
    out << std::left << std::setw(w) << "" << std::right;
    for (const auto& n : report.class_names) {
        out << "  " << std::setw(w) << n;
    }
    out << '\n';
    for (std::size_t r = 0; r < report.confusion.size(); ++r) {
        out << std::left << std::setw(w) << report.class_names[r] << std::right;
        for (auto v : report.confusion[r]) {
            out << "  " << std::setw(w) << v;
        }
        out << '\n';
    }
    out << std::setprecision(3) << "\nTraining time: " << report.train_seconds << " s\nTesting time:  "
        << report.test_seconds << " s\n";
    out << std::defaultfloat << std::setprecision(6);
}

void write_summary(std::ostream& out, const EvalReport& report) {
    for (const auto& [k, v] : report.config) {
        out << "config." << k << '=' << v << '\n';
    }
    out << "classes=" << join(report.class_names, ',') << '\n';
    out << "samples=" << report.total() << '\n';
    for (std::size_t r = 0; r < report.confusion.size(); ++r) {
        std::vector<std::string> cells;
        for (auto v : report.confusion[r]) {
            cells.push_back(std::to_string(v));
        }
        out << "confusion." << r << '=' << join(cells, ',') << '\n';
    }
    for (const auto& c : report.metrics.per_class) {
        out << "class." << c.name << ".precision=" << exact(c.precision) << '\n';
        out << "class." << c.name << ".recall=" << exact(c.recall) << '\n';
        out << "class." << c.name << ".f_measure=" << exact(c.f_measure) << '\n';
    }
    out << "weighted_f=" << exact(report.metrics.weighted_f) << '\n';
    out << "macro_f=" << exact(report.metrics.macro_f) << '\n';
    out << "accuracy=" << exact(report.metrics.accuracy) << '\n';
    out << "train_seconds=" << exact(report.train_seconds) << '\n';
    out << "test_seconds=" << exact(report.test_seconds) << '\n';
}

EvalReport read_summary(std::istream& in) {
    EvalReport report;
    std::map<std::size_t, std::vector<std::uint64_t>> rows;
    bool have_classes = false;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::InvalidArgument, "summary line without '=': " + line);
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key.starts_with("config.")) {
            report.config.emplace_back(key.substr(7), value);
        } else if (key == "classes") {
            report.class_names = split(value, ',');
            have_classes = true;
        } else if (key.starts_with("confusion.")) {
            std::vector<std::uint64_t> cells;
            for (const auto& c : split(value, ',')) {
                cells.push_back(static_cast<std::uint64_t>(std::stoull(c)));
            }
            rows[static_cast<std::size_t>(std::stoul(key.substr(10)))] = std::move(cells);
        } else if (key == "train_seconds") {
            report.train_seconds = to_double(value);
        } else if (key == "test_seconds") {
            report.test_seconds = to_double(value);
        }
    }
    if (!have_classes || rows.size() != report.class_names.size()) {
        fail(ErrorCode::InvalidArgument, "summary lacks classes or confusion rows");
    }
    for (auto& [i, cells] : rows) {
        if (i >= report.class_names.size()) {
            fail(ErrorCode::InvalidArgument, "confusion row index out of range");
        }
        report.confusion.push_back(std::move(cells));
    }
    report.metrics = f_measure(report.confusion, report.class_names);
    return report;
}

void write_confusion_csv(std::ostream& out, const EvalReport& report) {
    out << "actual";
    for (const auto& n : report.class_names) {
        out << ',' << n;
    }
    out << '\n';
    for (std::size_t r = 0; r < report.confusion.size(); ++r) {
        out << report.class_names[r];
        for (auto v : report.confusion[r]) {
            out << ',' << v;
        }
        out << '\n';
    }
}

double SweepResult::trend(LabelTarget target) const {
    if (points.size() < 2) {
        return 0.0;
    }
    std::vector<double> d;
    std::vector<double> f;
    for (const auto& p : points) {
        d.push_back(p.d);
        f.push_back(target == LabelTarget::Type ? p.weighted_f_type : p.weighted_f_family);
    }
    return pearson(average_ranks(d), average_ranks(f));
}

double SweepResult::best_d(LabelTarget target) const {
    if (points.empty()) {
        fail(ErrorCode::InvalidArgument, "empty sweep");
    }
    auto value = [&](const SweepPoint& p) {
        return target == LabelTarget::Type ? p.weighted_f_type : p.weighted_f_family;
    };
    // Ties resolve to the largest d.
    const SweepPoint* best = &points.front();
    for (const auto& p : points) {
        if (value(p) >= value(*best)) {
            best = &p;
        }
    }
    return best->d;
}

SweepResult sweep_d(std::span<const MnemonicTrace> traces, const RankParams& base, std::span<const double> d_values,
                    const LearnerConfig& learner, std::size_t k, std::uint64_t seed, unsigned threads,
                    RankCache* cache) {
    if (d_values.empty()) {
        fail(ErrorCode::InvalidArgument, "sweep needs at least one damping value");
    }
    std::vector<double> ds(d_values.begin(), d_values.end());
    for (double d : ds) {
        if (!(d >= 0.0 && d <= 1.0)) {
            fail(ErrorCode::InvalidArgument, "damping values must lie in [0, 1]");
        }
    }
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());

    SweepResult result;
    for (double d : ds) {
        RankParams params = base;
        params.d = d;
        const FeatureMatrix matrix = featurize_corpus(traces, params, threads, cache);
        LearnerConfig config = learner;
        config.threads = threads;
        const auto type_report = cross_validate(LabeledDataset::from_matrix(matrix, LabelTarget::Type), config, k, seed);
        const auto family_report =
            cross_validate(LabeledDataset::from_matrix(matrix, LabelTarget::Family), config, k, seed);
        result.points.push_back({d, type_report.metrics.weighted_f, family_report.metrics.weighted_f});
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "d,weighted_f_type,weighted_f_family\n";
    for (const auto& p : result.points) {
        out << format_value(p.d) << ',' << format_value(p.weighted_f_type) << ',' << format_value(p.weighted_f_family)
            << '\n';
    }
}

} // namespace mnemorank
