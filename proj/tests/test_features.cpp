#include "mnemorank/error.hpp"
#include "mnemorank/features.hpp"
#include "mnemorank/graph.hpp"

#include <doctest.h>

#include <sstream>

using namespace mnemorank;

namespace {

MnemonicTrace trace(std::string id, std::vector<std::string> seq, std::string type, std::string family) {
    MnemonicTrace t;
    t.sample_id = std::move(id);
    t.mnemonics = std::move(seq);
    t.type_label = std::move(type);
    t.family_label = std::move(family);
    return t;
}

std::vector<MnemonicTrace> small_corpus() {
    return {trace("s1", {"mov", "push", "mov", "call"}, "worm", "alpha"),
            trace("s2", {"xor", "xor", "jmp", "xor"}, "trojan", "beta"),
            trace("s3", {"mov", "mov", "mov"}, "worm", "gamma")};
}

RankParams svol() {
    RankParams p;
    p.algorithm = Algorithm::SVOL;
    p.d = 0.85;
    return p;
}

} // namespace

TEST_CASE("vocabulary is the sorted union of executed mnemonics") {
    const auto corpus = small_corpus();
    const auto m = featurize_corpus(corpus, svol());
    CHECK(m.vocabulary.tokens == std::vector<std::string>{"call", "jmp", "mov", "push", "xor"});
    CHECK(m.vocabulary.position("mov") == 2);
    CHECK_FALSE(m.vocabulary.position("add"));
}

TEST_CASE("absent mnemonics are zero and present ones are their rank") {
    const auto corpus = small_corpus();
    const auto ranks = rank_corpus(corpus, svol());
    const auto m = build_feature_matrix(corpus, ranks);
    REQUIRE(m.rows.size() == 3);
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        const auto& row = m.rows[i];
        CHECK(row.values.size() == m.vocabulary.size());
        for (std::size_t j = 0; j < m.vocabulary.size(); ++j) {
            const auto r = ranks[i].rank(m.vocabulary.tokens[j]);
            CHECK(row.values[j] == r.value_or(0.0));
        }
    }
    CHECK(m.rows[0].values[1] == 0.0);
    CHECK(m.rows[2].values[2] > 0.0);
    CHECK(m.rows[0].type_label == "worm");
    CHECK(m.rows[1].family_label == "beta");
}

TEST_CASE("PR variants rank graphs without self-loops") {
    const auto corpus = small_corpus();
    RankParams p;
    p.algorithm = Algorithm::PR;
    const auto ranks = rank_corpus(corpus, p);
    // s3 is only "mov mov mov": one node, no edges once self-pairs go.
    REQUIRE(ranks[2].size() == 1);
    CHECK(ranks[2].values[0] == doctest::Approx(1.0 - p.d));
}

TEST_CASE("rank_corpus gives the same answer for any thread count") {
    const auto corpus = small_corpus();
    CHECK(rank_corpus(corpus, svol(), 1) == rank_corpus(corpus, svol(), 4));
}

TEST_CASE("format_value keeps integral values real-valued") {
    CHECK(format_value(0.0) == "0.0");
    CHECK(format_value(1.0) == "1.0");
    CHECK(format_value(0.15) == "0.15");
    CHECK(format_value(1.0 / 3.0) == "0.333333333333");
    CHECK(format_value(1e-20) == "1e-20");
}

TEST_CASE("CSV export and import round-trip") {
    const auto m = featurize_corpus(small_corpus(), svol());
    std::ostringstream out;
    export_matrix(out, m, ExportFormat::Csv, LabelTarget::Family);
    const std::string text = out.str();
    CHECK(text.rfind("sample_id,call,jmp,mov,push,xor,label\n", 0) == 0);

    std::istringstream in(text);
    const auto back = import_csv(in, LabelTarget::Family);
    CHECK(back.vocabulary == m.vocabulary);
    REQUIRE(back.rows.size() == m.rows.size());
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        CHECK(back.rows[i].family_label == m.rows[i].family_label);
        for (std::size_t j = 0; j < m.vocabulary.size(); ++j) {
            CHECK(back.rows[i].values[j] == doctest::Approx(m.rows[i].values[j]).epsilon(1e-11));
        }
    }
}

TEST_CASE("ARFF export declares numeric attributes and a nominal class") {
    const auto m = featurize_corpus(small_corpus(), svol());
    std::ostringstream out;
    export_matrix(out, m, ExportFormat::Arff, LabelTarget::Type, "algo=svol\nd=0.85\n");
    const std::string text = out.str();
    CHECK(text.rfind("% algo=svol\n% d=0.85\n@relation mnemonic_ranks\n", 0) == 0);
    CHECK(text.find("@attribute mov numeric\n") != std::string::npos);
    CHECK(text.find("@attribute class {trojan,worm}\n") != std::string::npos);
    CHECK(text.find("@data\n") != std::string::npos);
    CHECK(text.substr(text.size() - 5) == "worm\n");
}

TEST_CASE("empty inputs are rejected") {
    CHECK_THROWS_AS(featurize_corpus(std::vector<MnemonicTrace>{}, svol()), Error);
    std::ostringstream out;
    CHECK_THROWS_AS(export_matrix(out, FeatureMatrix{}, ExportFormat::Csv, LabelTarget::Type), Error);
    std::istringstream bad("id,mov,label\n");
    CHECK_THROWS_AS(import_csv(bad, LabelTarget::Type), Error);
}

TEST_CASE("label target names") {
    CHECK(parse_label_target("family") == LabelTarget::Family);
    CHECK(parse_label_target("type") == LabelTarget::Type);
    CHECK_FALSE(parse_label_target("kind"));
    CHECK(parse_export_format("arff") == ExportFormat::Arff);
    CHECK_FALSE(parse_export_format("json"));
}
