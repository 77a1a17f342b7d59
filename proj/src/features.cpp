#include "mnemorank/features.hpp"

#include "mnemorank/error.hpp"
#include "mnemorank/parallel.hpp"
#include "mnemorank/store.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace mnemorank {

std::string_view to_string(LabelTarget target) noexcept {
    return target == LabelTarget::Type ? "type" : "family";
}

std::optional<LabelTarget> parse_label_target(std::string_view name) noexcept {
    if (name == "type") {
        return LabelTarget::Type;
    }
    if (name == "family") {
        return LabelTarget::Family;
    }
    return std::nullopt;
}

std::optional<ExportFormat> parse_export_format(std::string_view name) noexcept {
    if (name == "csv") {
        return ExportFormat::Csv;
    }
    if (name == "arff") {
        return ExportFormat::Arff;
    }
    return std::nullopt;
}

std::optional<std::size_t> Vocabulary::position(std::string_view token) const {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), token);
    if (it == tokens.end() || *it != token) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - tokens.begin());
}

Vocabulary build_vocabulary(std::span<const RankVector> rank_vectors) {
    if (rank_vectors.empty()) {
        fail(ErrorCode::EmptyCorpus, "vocabulary needs at least one rank vector");
    }
    std::set<std::string, std::less<>> all;
    for (const auto& rv : rank_vectors) {
        all.insert(rv.tokens.begin(), rv.tokens.end());
    }
    return Vocabulary{std::vector<std::string>(all.begin(), all.end())};
}

std::vector<double> vectorize(const RankVector& ranks, const Vocabulary& vocabulary) {
    std::vector<double> values(vocabulary.size(), 0.0);
    for (std::size_t i = 0; i < ranks.tokens.size(); ++i) {
        if (auto pos = vocabulary.position(ranks.tokens[i])) {
            values[*pos] = ranks.values[i];
        }
    }
    return values;
}

std::vector<RankVector> rank_corpus(std::span<const MnemonicTrace> traces, const RankParams& params,
                                    unsigned threads, RankCache* cache) {
    std::vector<RankVector> out(traces.size());
    parallel_for(traces.size(), threads, [&](std::size_t i) {
        if (cache) {
            out[i] = cache->get_or_compute(traces[i], params);
        } else {
            out[i] = rank_iterative(build_graph(traces[i], uses_self_loops(params.algorithm)), params);
        }
    });
    return out;
}

FeatureMatrix build_feature_matrix(std::span<const MnemonicTrace> traces,
                                   std::span<const RankVector> rank_vectors) {
    if (traces.size() != rank_vectors.size()) {
        fail(ErrorCode::DimensionMismatch, "one rank vector per trace is required");
    }
    FeatureMatrix matrix;
    matrix.vocabulary = build_vocabulary(rank_vectors);
    matrix.rows.reserve(traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        matrix.rows.push_back({traces[i].sample_id, traces[i].type_label.value_or(""),
                               traces[i].family_label.value_or(""),
                               vectorize(rank_vectors[i], matrix.vocabulary)});
    }
    return matrix;
}

FeatureMatrix featurize_corpus(std::span<const MnemonicTrace> traces, const RankParams& params,
                               unsigned threads, RankCache* cache) {
    if (traces.empty()) {
        fail(ErrorCode::EmptyCorpus, "no traces to featurize");
    }
    const auto ranks = rank_corpus(traces, params, threads, cache);
    return build_feature_matrix(traces, ranks);
}

std::string format_value(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) {
        s += ".0";
    }
    return s;
}

namespace {

bool arff_plain(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

std::string arff_quote(std::string_view s) {
    if (arff_plain(s)) {
        return std::string(s);
    }
    std::string q = "'";
    for (char c : s) {
        if (c == '\'' || c == '\\') {
            q.push_back('\\');
        }
        q.push_back(c);
    }
    q.push_back('\'');
    return q;
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

} // namespace

void export_matrix(std::ostream& out, const FeatureMatrix& matrix, ExportFormat format, LabelTarget label,
                   std::string_view config_echo) {
    if (matrix.rows.empty()) {
        fail(ErrorCode::EmptyMatrix, "feature matrix has no samples");
    }
    for (const auto& row : matrix.rows) {
        if (row.values.size() != matrix.vocabulary.size()) {
            fail(ErrorCode::DimensionMismatch, "row '" + row.sample_id + "' does not match the vocabulary");
        }
    }

    if (format == ExportFormat::Csv) {
        out << "sample_id";
        for (const auto& t : matrix.vocabulary.tokens) {
            out << ',' << t;
        }
        out << ",label\n";
        for (const auto& row : matrix.rows) {
            out << row.sample_id;
            for (double v : row.values) {
                out << ',' << format_value(v);
            }
            out << ',' << row.label(label) << '\n';
        }
        return;
    }

    std::istringstream echo{std::string(config_echo)};
    for (std::string line; std::getline(echo, line);) {
        out << "% " << line << '\n';
    }
    out << "@relation mnemonic_ranks\n\n";
    for (const auto& t : matrix.vocabulary.tokens) {
        out << "@attribute " << arff_quote(t) << " numeric\n";
    }
    std::set<std::string> labels;
    for (const auto& row : matrix.rows) {
        labels.insert(row.label(label));
    }
    out << "@attribute class {";
    bool first = true;
    for (const auto& l : labels) {
        out << (first ? "" : ",") << arff_quote(l);
        first = false;
    }
    out << "}\n\n@data\n";
    for (const auto& row : matrix.rows) {
        for (double v : row.values) {
            out << format_value(v) << ',';
        }
        out << arff_quote(row.label(label)) << '\n';
    }
}

FeatureMatrix import_csv(std::istream& in, LabelTarget label) {
    std::string line;
    if (!std::getline(in, line)) {
        fail(ErrorCode::EmptyMatrix, "csv has no header");
    }
    auto header = split(line, ',');
    if (header.size() < 2 || header.front() != "sample_id" || header.back() != "label") {
        fail(ErrorCode::MissingColumn, "csv header must be sample_id,<tokens...>,label");
    }
    FeatureMatrix matrix;
    matrix.vocabulary.tokens.assign(header.begin() + 1, header.end() - 1);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            fail(ErrorCode::MissingColumn, "csv row has the wrong number of fields");
        }
        FeatureRow row;
        row.sample_id = fields.front();
        (label == LabelTarget::Type ? row.type_label : row.family_label) = fields.back();
        for (std::size_t i = 1; i + 1 < fields.size(); ++i) {
            double v = 0.0;
            const auto& f = fields[i];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                fail(ErrorCode::InvalidArgument, "bad numeric value '" + f + "'");
            }
            row.values.push_back(v);
        }
        matrix.rows.push_back(std::move(row));
    }
    if (matrix.rows.empty()) {
        fail(ErrorCode::EmptyMatrix, "csv has no rows");
    }
    return matrix;
}

} // namespace mnemorank
