#include "mnemorank/error.hpp"
#include "mnemorank/synth.hpp"
#include "mnemorank/trace.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include <unistd.h>

using namespace mnemorank;
namespace fs = std::filesystem;

namespace {

SynthSpec small_spec() {
    SynthSpec s;
    s.n_families = 4;
    s.samples_per_family = 5;
    s.trace_length = 300;
    s.alphabet_size = 12;
    return s;
}

} // namespace

TEST_CASE("alphabet names are unique and start with real mnemonics") {
    const auto a = synthetic_alphabet(60);
    CHECK(a.size() == 60);
    CHECK(std::set<std::string>(a.begin(), a.end()).size() == 60);
    CHECK(a.front() == "mov");
    CHECK(a.back().rfind("op", 0) == 0);
    CHECK(family_name(3) == "family03");
    CHECK(type_name(0) == "type00");
}

TEST_CASE("family matrices are row-stochastic") {
    auto spec = small_spec();
    spec.self_loop_bias = 0.3;
    for (const auto& m : family_matrices(spec)) {
        REQUIRE(m.size() == spec.alphabet_size * spec.alphabet_size);
        for (std::size_t r = 0; r < spec.alphabet_size; ++r) {
            const double sum = std::accumulate(m.begin() + r * spec.alphabet_size,
                                               m.begin() + (r + 1) * spec.alphabet_size, 0.0);
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("paired families differ only by the self-loop bias") {
    auto spec = small_spec();
    spec.paired_self_loops = true;
    spec.self_loop_bias = 0.4;
    const auto ms = family_matrices(spec);
    const std::size_t n = spec.alphabet_size;
    for (std::size_t pair = 0; pair < 2; ++pair) {
        const auto& base = ms[2 * pair];
        const auto& biased = ms[2 * pair + 1];
        for (std::size_t r = 0; r < n; ++r) {
            const double scale = 1.0 / (1.0 + spec.self_loop_bias);
            for (std::size_t c = 0; c < n; ++c) {
                const double expect = (base[r * n + c] + (r == c ? spec.self_loop_bias : 0.0)) * scale;
                CHECK(biased[r * n + c] == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
    CHECK(ms[0] != ms[2]);
}

TEST_CASE("generated corpora are reproducible and thread-independent") {
    const auto spec = small_spec();
    const auto a = generate(spec, 1);
    const auto b = generate(spec, 4);
    REQUIRE(a.traces.size() == 20);
    for (std::size_t i = 0; i < a.traces.size(); ++i) {
        CHECK(a.traces[i].mnemonics == b.traces[i].mnemonics);
        CHECK(a.traces[i].mnemonics.size() == spec.trace_length);
    }
    CHECK(a.traces[0].sample_id == "family00_0000");
    CHECK(*a.traces[7].family_label == "family01");
    CHECK(*a.traces[7].type_label == "type00");
    CHECK(*a.traces[12].type_label == "type01");

    auto other = spec;
    other.seed = 8;
    CHECK(generate(other).traces[0].mnemonics != a.traces[0].mnemonics);
}

TEST_CASE("written corpora load back through the manifest") {
    const auto dir = fs::temp_directory_path() / ("mnemorank_synth_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    const auto corpus = generate(small_spec());
    const auto manifest = write_corpus(corpus, dir);
    const auto back = load_corpus(manifest);
    REQUIRE(back.size() == corpus.traces.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].sample_id == corpus.traces[i].sample_id);
        CHECK(back[i].mnemonics == corpus.traces[i].mnemonics);
        CHECK(back[i].family_label == corpus.traces[i].family_label);
        CHECK(back[i].type_label == corpus.traces[i].type_label);
    }
    fs::remove_all(dir);
}

TEST_CASE("synthesis parameters are validated") {
    auto s = small_spec();
    s.n_families = 0;
    CHECK_THROWS_AS(validate(s), Error);
    s = small_spec();
    s.noise = 1.5;
    CHECK_THROWS_AS(validate(s), Error);
    s = small_spec();
    s.alphabet_size = 1;
    CHECK_THROWS_AS(validate(s), Error);
    s = small_spec();
    s.self_loop_bias = -0.1;
    CHECK_THROWS_AS(validate(s), Error);
}
