#include "mnemorank/rank.hpp"

#include "mnemorank/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace mnemorank {

std::string_view to_string(Algorithm algorithm) noexcept {
    switch (algorithm) {
    case Algorithm::PR: return "pr";
    case Algorithm::SPR: return "spr";
    case Algorithm::VOL: return "vol";
    case Algorithm::SVOL: return "svol";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
    std::string lowered(name);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Algorithm a : {Algorithm::PR, Algorithm::SPR, Algorithm::VOL, Algorithm::SVOL}) {
        if (lowered == to_string(a)) {
            return a;
        }
    }
    return std::nullopt;
}

void validate(const RankParams& params, const TransitionGraph& graph) {
    if (!(params.d >= 0.0 && params.d <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "damping factor must lie in [0, 1]");
    }
    if (!(params.epsilon > 0.0)) {
        fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    }
    if (params.max_iters < 1) {
        fail(ErrorCode::InvalidArgument, "max_iters must be at least 1");
    }
    if (uses_self_loops(params.algorithm) != graph.self_loops_included()) {
        fail(ErrorCode::InvalidArgument,
             std::string(to_string(params.algorithm)) + " requires a graph built " +
                 (uses_self_loops(params.algorithm) ? "with" : "without") + " self-visit edges");
    }
}

std::optional<double> RankVector::rank(std::string_view mnemonic) const {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), mnemonic);
    if (it == tokens.end() || *it != mnemonic) {
        return std::nullopt;
    }
    return values[static_cast<std::size_t>(it - tokens.begin())];
}

double RankVector::sum() const noexcept { return std::accumulate(values.begin(), values.end(), 0.0); }

double link_contribution(Algorithm algorithm, double d, double source_rank, OutStats source_stats,
                         std::uint64_t edge_visits) noexcept {
    if (uses_visits(algorithm)) {
        return d * (static_cast<double>(edge_visits) * source_rank) / static_cast<double>(source_stats.visits);
    }
    return d * source_rank / static_cast<double>(source_stats.links);
}

namespace {

void require_nonempty(const TransitionGraph& graph) {
    if (graph.empty()) {
        fail(ErrorCode::EmptyGraph, "cannot rank an empty graph");
    }
}

RankVector make_result(const TransitionGraph& graph, const RankParams& params, std::vector<double> values) {
    RankVector result;
    result.tokens.assign(graph.nodes().begin(), graph.nodes().end());
    result.values = std::move(values);
    result.algorithm = params.algorithm;
    result.d = params.d;
    return result;
}

std::vector<OutStats> all_out_stats(const TransitionGraph& graph) {
    std::vector<OutStats> stats(graph.node_count());
    for (std::size_t v = 0; v < stats.size(); ++v) {
        stats[v] = graph.out_stats(static_cast<NodeId>(v));
    }
    return stats;
}

void step_into(const TransitionGraph& graph, const RankParams& params, std::span<const OutStats> stats,
               std::span<const double> current, std::span<double> next) {
    const double base = 1.0 - params.d;
    for (std::size_t x = 0; x < next.size(); ++x) {
        double sum = 0.0;
        for (const Edge& e : graph.in_edges(static_cast<NodeId>(x))) {
            sum += link_contribution(params.algorithm, params.d, current[e.source], stats[e.source], e.visits);
        }
        next[x] = base + sum;
    }
}

} // namespace

std::vector<double> rank_step(const TransitionGraph& graph, const RankParams& params,
                              std::span<const double> current) {
    require_nonempty(graph);
    validate(params, graph);
    if (current.size() != graph.node_count()) {
        fail(ErrorCode::DimensionMismatch, "rank vector length differs from node count");
    }
    const auto stats = all_out_stats(graph);
    std::vector<double> next(graph.node_count());
    step_into(graph, params, stats, current, next);
    return next;
}

RankVector rank_iterative(const TransitionGraph& graph, const RankParams& params) {
    require_nonempty(graph);
    validate(params, graph);

    const auto stats = all_out_stats(graph);
    std::vector<double> current(graph.node_count(), 1.0);
    std::vector<double> next(graph.node_count());
    bool converged = false;
    std::size_t iterations = 0;
    while (iterations < params.max_iters) {
        step_into(graph, params, stats, current, next);
        ++iterations;
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            change = std::max(change, std::abs(next[i] - current[i]));
        }
        current.swap(next);
        if (change < params.epsilon) {
            converged = true;
            break;
        }
    }

    RankVector result = make_result(graph, params, std::move(current));
    result.converged = converged;
    result.iterations_used = iterations;
    return result;
}

RankVector rank_exact(const TransitionGraph& graph, const RankParams& params) {
    require_nonempty(graph);
    validate(params, graph);
    if (params.d >= 1.0) {
        fail(ErrorCode::SingularSystem, "the additive rank system is singular at d = 1");
    }
    const std::size_t n = graph.node_count();
    if (n > kExactSolveMaxNodes) {
        fail(ErrorCode::TooLarge, "exact solve is limited to " + std::to_string(kExactSolveMaxNodes) + " nodes");
    }

    const auto stats = all_out_stats(graph);
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(size, size);
    for (const Edge& e : graph.edges()) {
        const double share = uses_visits(params.algorithm)
                                 ? static_cast<double>(e.visits) / static_cast<double>(stats[e.source].visits)
                                 : 1.0 / static_cast<double>(stats[e.source].links);
        system(e.target, e.source) -= params.d * share;
    }
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(size, 1.0 - params.d);
    const Eigen::VectorXd solution = system.partialPivLu().solve(rhs);

    RankVector result = make_result(graph, params, std::vector<double>(solution.data(), solution.data() + n));
    result.converged = true;
    result.iterations_used = 0;
    return result;
}

} // namespace mnemorank
