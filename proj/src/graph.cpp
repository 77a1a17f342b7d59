#include "mnemorank/graph.hpp"

#include "mnemorank/error.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace mnemorank {

std::optional<NodeId> TransitionGraph::find(std::string_view mnemonic) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), mnemonic);
    if (it == nodes_.end() || *it != mnemonic) {
        return std::nullopt;
    }
    return static_cast<NodeId>(it - nodes_.begin());
}

std::span<const Edge> TransitionGraph::out_edges(NodeId id) const {
    if (id >= nodes_.size()) {
        fail(ErrorCode::UnknownNode, "node id " + std::to_string(id) + " out of range");
    }
    return std::span<const Edge>(edges_).subspan(out_offsets_[id], out_offsets_[id + 1] - out_offsets_[id]);
}

std::span<const Edge> TransitionGraph::in_edges(NodeId id) const {
    if (id >= nodes_.size()) {
        fail(ErrorCode::UnknownNode, "node id " + std::to_string(id) + " out of range");
    }
    return std::span<const Edge>(in_edges_).subspan(in_offsets_[id], in_offsets_[id + 1] - in_offsets_[id]);
}

OutStats TransitionGraph::out_stats(NodeId id) const {
    OutStats stats;
    for (const Edge& e : out_edges(id)) {
        ++stats.links;
        stats.visits += e.visits;
    }
    return stats;
}

OutStats TransitionGraph::out_stats(std::string_view mnemonic) const {
    const auto id = find(mnemonic);
    if (!id) {
        fail(ErrorCode::UnknownNode, "'" + std::string(mnemonic) + "' is not a node of the graph");
    }
    return out_stats(*id);
}

std::uint64_t TransitionGraph::visits(std::string_view source, std::string_view target) const {
    const auto s = find(source);
    const auto t = find(target);
    if (!s || !t) {
        return 0;
    }
    const auto out = out_edges(*s);
    auto it = std::lower_bound(out.begin(), out.end(), *t,
                               [](const Edge& e, NodeId target_id) { return e.target < target_id; });
    return (it != out.end() && it->target == *t) ? it->visits : 0;
}

std::uint64_t TransitionGraph::total_visits() const noexcept {
    return std::accumulate(edges_.begin(), edges_.end(), std::uint64_t{0},
                           [](std::uint64_t acc, const Edge& e) { return acc + e.visits; });
}

bool TransitionGraph::has_self_loop() const noexcept {
    return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.source == e.target; });
}

bool TransitionGraph::has_dangling_nodes() const noexcept {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (out_offsets_[i] == out_offsets_[i + 1]) {
            return true;
        }
    }
    return false;
}

TransitionGraph TransitionGraph::from_edges(std::vector<std::string> nodes, std::vector<Edge> edges,
                                            bool self_loops_included) {
    // Re-map to lexicographic node order.
    std::vector<NodeId> order(nodes.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return nodes[a] < nodes[b]; });
    std::vector<NodeId> remap(nodes.size());
    TransitionGraph g;
    g.nodes_.reserve(nodes.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        remap[order[rank]] = static_cast<NodeId>(rank);
        g.nodes_.push_back(std::move(nodes[order[rank]]));
    }
    for (std::size_t i = 1; i < g.nodes_.size(); ++i) {
        if (g.nodes_[i] == g.nodes_[i - 1]) {
            fail(ErrorCode::InvalidArgument, "duplicate node '" + g.nodes_[i] + "'");
        }
    }
    for (Edge& e : edges) {
        if (e.source >= remap.size() || e.target >= remap.size()) {
            fail(ErrorCode::UnknownNode, "edge endpoint out of range");
        }
        if (e.visits == 0) {
            fail(ErrorCode::InvalidArgument, "edge visit counts must be positive");
        }
        if (!self_loops_included && e.source == e.target) {
            fail(ErrorCode::InvalidArgument, "self-loop edge in a graph built without self-loops");
        }
        e.source = remap[e.source];
        e.target = remap[e.target];
    }
    g.edges_ = std::move(edges);
    g.self_loops_included_ = self_loops_included;
    g.index();
    return g;
}

void TransitionGraph::index() {
    auto by_source = [](const Edge& a, const Edge& b) {
        return a.source != b.source ? a.source < b.source : a.target < b.target;
    };
    std::sort(edges_.begin(), edges_.end(), by_source);
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (edges_[i].source == edges_[i - 1].source && edges_[i].target == edges_[i - 1].target) {
            fail(ErrorCode::InvalidArgument, "duplicate edge");
        }
    }
    in_edges_ = edges_;
    std::stable_sort(in_edges_.begin(), in_edges_.end(),
                     [](const Edge& a, const Edge& b) { return a.target < b.target; });

    const std::size_t n = nodes_.size();
    out_offsets_.assign(n + 1, 0);
    in_offsets_.assign(n + 1, 0);
    for (const Edge& e : edges_) {
        ++out_offsets_[e.source + 1];
        ++in_offsets_[e.target + 1];
    }
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
}

TransitionGraph build_graph(std::span<const std::string> mnemonics, bool include_self_loops) {
    if (mnemonics.empty()) {
        fail(ErrorCode::EmptyTrace, "cannot build a graph from an empty trace");
    }
    std::unordered_map<std::string_view, NodeId> ids;
    std::vector<std::string> nodes;
    std::vector<NodeId> sequence;
    sequence.reserve(mnemonics.size());
    for (const auto& m : mnemonics) {
        auto [it, inserted] = ids.try_emplace(m, static_cast<NodeId>(nodes.size()));
        if (inserted) {
            nodes.push_back(m);
        }
        sequence.push_back(it->second);
    }

    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    for (std::size_t i = 0; i + 1 < sequence.size(); ++i) {
        const NodeId s = sequence[i];
        const NodeId t = sequence[i + 1];
        if (s == t && !include_self_loops) {
            continue;
        }
        ++counts[(static_cast<std::uint64_t>(s) << 32) | t];
    }
    std::vector<Edge> edges;
    edges.reserve(counts.size());
    for (const auto& [key, visits] : counts) {
        edges.push_back({static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffu), visits});
    }
    return TransitionGraph::from_edges(std::move(nodes), std::move(edges), include_self_loops);
}

TransitionGraph build_graph(const MnemonicTrace& trace, bool include_self_loops) {
    return build_graph(std::span<const std::string>(trace.mnemonics), include_self_loops);
}

void write_edge_list(std::ostream& out, const TransitionGraph& graph) {
    for (const Edge& e : graph.edges()) {
        out << graph.name(e.source) << ' ' << graph.name(e.target) << ' ' << e.visits << '\n';
    }
}

} // namespace mnemorank
