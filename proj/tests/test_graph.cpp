#include "mnemorank/error.hpp"
#include "mnemorank/graph.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

using namespace mnemorank;

namespace {

const std::vector<std::string> kSeq{"mov", "push", "mov", "mov", "push"};

std::vector<std::string> random_trace(std::mt19937_64& rng, std::size_t len, std::size_t alphabet) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back("m" + std::to_string(rng() % alphabet));
    }
    return out;
}

} // namespace

TEST_CASE("build_graph with self-loops counts every 2-gram") {
    const auto g = build_graph(kSeq, true);
    CHECK(g.self_loops_included());
    CHECK(g.node_count() == 2);
    CHECK(g.edge_count() == 3);
    CHECK(g.visits("mov", "push") == 2);
    CHECK(g.visits("push", "mov") == 1);
    CHECK(g.visits("mov", "mov") == 1);
    CHECK(g.total_visits() == kSeq.size() - 1);
}

TEST_CASE("build_graph without self-loops drops repeated pairs") {
    const auto g = build_graph(kSeq, false);
    CHECK(g.edge_count() == 2);
    CHECK(g.visits("mov", "push") == 2);
    CHECK(g.visits("push", "mov") == 1);
    CHECK(g.visits("mov", "mov") == 0);
    CHECK_FALSE(g.has_self_loop());
}

TEST_CASE("a single mnemonic gives one node and no edges") {
    const auto g = build_graph(std::vector<std::string>{"mov"}, true);
    CHECK(g.node_count() == 1);
    CHECK(g.edge_count() == 0);
    CHECK(g.has_dangling_nodes());
}

TEST_CASE("out_stats reports L and TV") {
    const auto with = build_graph(kSeq, true);
    const auto without = build_graph(kSeq, false);
    CHECK(with.out_stats("mov").links == 2);
    CHECK(with.out_stats("mov").visits == 3);
    CHECK(without.out_stats("mov").links == 1);
    CHECK(without.out_stats("mov").visits == 2);
    CHECK(with.out_stats("push").links == 1);
    CHECK(with.out_stats("push").visits == 1);
    CHECK_THROWS_AS(with.out_stats("xor"), Error);
    try {
        (void)with.out_stats("xor");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownNode);
    }
}

TEST_CASE("an empty trace cannot be turned into a graph") {
    CHECK_THROWS_AS(build_graph(std::vector<std::string>{}, true), Error);
}

TEST_CASE("graph invariants hold on random traces") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto seq = random_trace(rng, 1 + rng() % 60, 1 + rng() % 6);
        const auto with = build_graph(seq, true);
        const auto without = build_graph(seq, false);

        CHECK(with == build_graph(seq, true));
        CHECK(with.node_count() == std::set<std::string>(seq.begin(), seq.end()).size());
        CHECK(with.total_visits() == seq.size() - 1);

        for (NodeId v = 0; v < with.node_count(); ++v) {
            const auto s = with.out_stats(v);
            CHECK(s.visits >= s.links);
            bool all_one = true;
            for (const auto& e : with.out_edges(v)) {
                all_one = all_one && e.visits == 1;
            }
            CHECK((s.visits == s.links) == all_one);

            const auto dropped = without.out_stats(without.find(with.name(v)).value());
            CHECK(dropped.links <= s.links);
            CHECK(dropped.visits <= s.visits);
        }

        const auto expected = oracle::count_bigrams(seq, false);
        CHECK(without.edge_count() == expected.size());
        for (const auto& [pair, count] : expected) {
            CHECK(without.visits(pair.first, pair.second) == count);
        }
    }
}

TEST_CASE("in_edges are the backlinks of a node") {
    const auto g = build_graph(std::vector<std::string>{"a", "b", "c", "a", "c", "b"}, false);
    const auto b = g.find("b").value();
    std::set<std::string> backlinks;
    for (const auto& e : g.in_edges(b)) {
        CHECK(e.target == b);
        backlinks.insert(g.name(e.source));
    }
    CHECK(backlinks == std::set<std::string>{"a", "c"});
}

TEST_CASE("edge-list export is sorted by source then target") {
    const auto g = build_graph(std::vector<std::string>{"push", "mov", "add", "mov", "push"}, true);
    std::ostringstream out;
    write_edge_list(out, g);
    CHECK(out.str() == "add mov 1\nmov add 1\nmov push 1\npush mov 1\n");
}

TEST_CASE("from_edges validates its input") {
    CHECK_THROWS_AS(TransitionGraph::from_edges({"a", "b"}, {{0, 0, 1}}, false), Error);
    CHECK_THROWS_AS(TransitionGraph::from_edges({"a", "b"}, {{0, 1, 0}}, false), Error);
    CHECK_THROWS_AS(TransitionGraph::from_edges({"a", "b"}, {{0, 1, 1}, {0, 1, 2}}, false), Error);
    CHECK_THROWS_AS(TransitionGraph::from_edges({"a", "a"}, {}, false), Error);
    const auto g = TransitionGraph::from_edges({"b", "a"}, {{0, 1, 3}}, false);
    CHECK(g.name(0) == "a");
    CHECK(g.visits("b", "a") == 3);
}
