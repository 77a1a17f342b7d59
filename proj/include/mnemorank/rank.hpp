#pragma once

#include "mnemorank/graph.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mnemorank {

// PR and VOL rank over graphs without self-visit edges; SPR and SVOL are the
// same equations applied to graphs that keep them. VOL variants split a
// node's rank in proportion to edge visits instead of evenly.
enum class Algorithm { PR, SPR, VOL, SVOL };

std::string_view to_string(Algorithm algorithm) noexcept;
// Case-insensitive "pr", "spr", "vol", "svol".
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

constexpr bool uses_visits(Algorithm a) noexcept { return a == Algorithm::VOL || a == Algorithm::SVOL; }
constexpr bool uses_self_loops(Algorithm a) noexcept { return a == Algorithm::SPR || a == Algorithm::SVOL; }

inline constexpr double kDefaultDamping = 0.85;
inline constexpr double kDefaultEpsilon = 1e-10;
inline constexpr std::size_t kDefaultMaxIters = 1000;
inline constexpr std::size_t kExactSolveMaxNodes = 2000;

struct RankParams {
    Algorithm algorithm = Algorithm::SVOL;
    double d = kDefaultDamping;
    // Stop once the largest per-node change of an update is below epsilon.
    double epsilon = kDefaultEpsilon;
    std::size_t max_iters = kDefaultMaxIters;
};

// Throws InvalidArgument for out-of-range parameters or when the variant's
// self-loop policy does not match the graph's.
void validate(const RankParams& params, const TransitionGraph& graph);

struct RankVector {
    // Parallel arrays, tokens sorted ascending.
    std::vector<std::string> tokens;
    std::vector<double> values;
    Algorithm algorithm = Algorithm::PR;
    double d = 0.0;
    bool converged = false;
    std::size_t iterations_used = 0;

    std::size_t size() const noexcept { return tokens.size(); }
    std::optional<double> rank(std::string_view mnemonic) const;
    double sum() const noexcept;

    friend bool operator==(const RankVector&, const RankVector&) = default;
};

// Rank one in-neighbour passes to a target along an edge: d * rank / L for
// evenly split variants, d * visits * rank / TV for visit-weighted ones.
double link_contribution(Algorithm algorithm, double d, double source_rank,
                         OutStats source_stats, std::uint64_t edge_visits) noexcept;

// One synchronous update: next(x) = (1 - d) + sum of contributions over the
// backlinks of x, all read from `current`. Dangling nodes pass on nothing.
std::vector<double> rank_step(const TransitionGraph& graph, const RankParams& params,
                              std::span<const double> current);

// Fixed-point iteration from all-ones. On graphs that never settle (periodic
// graphs at d = 1) the last iterate is returned with converged = false.
RankVector rank_iterative(const TransitionGraph& graph, const RankParams& params);

// Direct solve of (I - d W^T) r = (1 - d) 1. Requires d < 1 and at most
// kExactSolveMaxNodes nodes.
RankVector rank_exact(const TransitionGraph& graph, const RankParams& params);

} // namespace mnemorank
