#pragma once

#include "mnemorank/trace.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mnemorank {

using NodeId = std::uint32_t;

struct Edge {
    NodeId source;
    NodeId target;
    std::uint64_t visits;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Link count L(v) and total visits TV(v) over the out-edges of a node.
struct OutStats {
    std::uint64_t links = 0;
    std::uint64_t visits = 0;
};

// Directed graph over mnemonics whose edges are observed 2-grams with their
// occurrence counts. Node ids follow the lexicographic order of the
// mnemonics. Immutable once built.
class TransitionGraph {
public:
    TransitionGraph() = default;

    bool self_loops_included() const noexcept { return self_loops_included_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    std::span<const std::string> nodes() const noexcept { return nodes_; }
    const std::string& name(NodeId id) const { return nodes_.at(id); }
    std::optional<NodeId> find(std::string_view mnemonic) const;

    // Sorted by (source, target).
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::span<const Edge> out_edges(NodeId id) const;
    // Edges whose target is id, sorted by source. These are the backlinks B(x).
    std::span<const Edge> in_edges(NodeId id) const;

    OutStats out_stats(NodeId id) const;
    // Throws UnknownNode for a mnemonic that is not a node.
    OutStats out_stats(std::string_view mnemonic) const;

    // 0 when the edge is absent.
    std::uint64_t visits(std::string_view source, std::string_view target) const;
    std::uint64_t total_visits() const noexcept;

    bool has_self_loop() const noexcept;
    bool is_dangling(NodeId id) const { return out_edges(id).empty(); }
    bool has_dangling_nodes() const noexcept;

    // Builds from explicit parts; edges may be in any order and must not
    // repeat a (source, target) pair.
    static TransitionGraph from_edges(std::vector<std::string> nodes, std::vector<Edge> edges,
                                      bool self_loops_included);

    friend bool operator==(const TransitionGraph&, const TransitionGraph&) = default;

private:
    void index();

    std::vector<std::string> nodes_;
    std::vector<Edge> edges_;
    std::vector<Edge> in_edges_;
    std::vector<std::size_t> out_offsets_;
    std::vector<std::size_t> in_offsets_;
    bool self_loops_included_ = false;
};

// One node per distinct mnemonic; one visit per consecutive pair. When
// self-loops are excluded, pairs of identical mnemonics are not counted.
TransitionGraph build_graph(std::span<const std::string> mnemonics, bool include_self_loops);
TransitionGraph build_graph(const MnemonicTrace& trace, bool include_self_loops);

// Lines "source target visits", sorted by (source, target).
void write_edge_list(std::ostream& out, const TransitionGraph& graph);

} // namespace mnemorank
