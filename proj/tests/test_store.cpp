#include "mnemorank/rank.hpp"
#include "mnemorank/store.hpp"
#include "mnemorank/graph.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace mnemorank;
namespace fs = std::filesystem;

namespace {

MnemonicTrace random_trace(std::mt19937_64& rng, std::string id) {
    MnemonicTrace t;
    t.sample_id = std::move(id);
    const std::size_t len = 2 + rng() % 80;
    for (std::size_t i = 0; i < len; ++i) {
        t.mnemonics.push_back("op" + std::to_string(rng() % 7));
    }
    t.type_label = "type00";
    t.family_label = "family0" + std::to_string(rng() % 3);
    return t;
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("mnemorank_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("rank vectors survive a text round-trip exactly") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto t = random_trace(rng, "s" + std::to_string(i));
        RankParams p;
        p.algorithm = static_cast<Algorithm>(i % 4);
        p.d = 0.1 + 0.8 * static_cast<double>(i) / 50.0;
        const auto r = rank_iterative(build_graph(t, uses_self_loops(p.algorithm)), p);
        std::ostringstream out;
        write_rank_vector(out, t.sample_id, r);
        std::string id;
        auto line = out.str();
        line.pop_back();
        CHECK(read_rank_vector(line, &id) == r);
        CHECK(id == t.sample_id);
    }
}

TEST_CASE("cache keys depend on content and parameters only") {
    std::mt19937_64 rng(9);
    auto a = random_trace(rng, "a");
    auto b = a;
    b.sample_id = "b";
    b.family_label = "other";
    RankParams p;
    CHECK(rank_cache_key(a, p) == rank_cache_key(b, p));
    CHECK(rank_cache_key(a, p).size() == 16);
    auto q = p;
    q.d = 0.5;
    CHECK(rank_cache_key(a, p) != rank_cache_key(a, q));
    q = p;
    q.algorithm = Algorithm::VOL;
    CHECK(rank_cache_key(a, p) != rank_cache_key(a, q));
    b.mnemonics.push_back("nop");
    CHECK(rank_cache_key(a, p) != rank_cache_key(b, p));
}

TEST_CASE("rank cache hits return what a fresh computation gives") {
    const auto dir = scratch("cache");
    std::mt19937_64 rng(21);
    std::vector<MnemonicTrace> traces;
    for (int i = 0; i < 8; ++i) {
        traces.push_back(random_trace(rng, "s" + std::to_string(i)));
    }
    RankParams p;
    RankCache cache(dir);
    std::vector<RankVector> first;
    for (const auto& t : traces) {
        first.push_back(cache.get_or_compute(t, p));
    }
    CHECK(cache.misses() == traces.size());
    CHECK(cache.hits() == 0);
    for (std::size_t i = 0; i < traces.size(); ++i) {
        CHECK(cache.get_or_compute(traces[i], p) == first[i]);
        CHECK(first[i] == rank_iterative(build_graph(traces[i], true), p));
    }
    CHECK(cache.hits() == traces.size());
    fs::remove_all(dir);
}

TEST_CASE("saved corpora load back unchanged") {
    const auto dir = scratch("corpus");
    std::mt19937_64 rng(4);
    std::vector<MnemonicTrace> traces;
    for (int i = 0; i < 5; ++i) {
        traces.push_back(random_trace(rng, "s" + std::to_string(i)));
    }
    traces[2].truncated = true;
    traces[3].type_label.reset();
    save_corpus(dir / "c.mnc", traces);
    const auto back = load_saved_corpus(dir / "c.mnc");
    REQUIRE(back.size() == traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        CHECK(back[i].sample_id == traces[i].sample_id);
        CHECK(back[i].mnemonics == traces[i].mnemonics);
        CHECK(back[i].family_label == traces[i].family_label);
        CHECK(back[i].type_label == traces[i].type_label);
        CHECK(back[i].truncated == traces[i].truncated);
    }
    fs::remove_all(dir);
}

TEST_CASE("fnv1a reference values") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}
