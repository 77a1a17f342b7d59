// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "mnemorank/dataset.hpp"
#include "mnemorank/ensemble.hpp"
#include "mnemorank/error.hpp"
#include "mnemorank/eval.hpp"
#include "mnemorank/features.hpp"
#include "mnemorank/graph.hpp"
#include "mnemorank/random.hpp"
#include "mnemorank/rank.hpp"
#include "mnemorank/synth.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

using namespace mnemorank;

namespace {

using Clock = std::chrono::steady_clock;

int g_failed = 0;
std::size_t g_cv_runs = 0;
std::size_t g_cv_bad_totals = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    g_failed += ok ? 0 : 1;
}

// Runs a criterion, turning an unexpected exception into a failure line.
void run(int id, const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [ok, detail] = body();
        report(id, ok, what, detail);
    } catch (const std::exception& e) {
        report(id, false, what, std::string("exception: ") + e.what());
    }
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

unsigned worker_threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

// Random graph with self-loop candidates included; `strip` drops them.
struct RandomGraph {
    std::size_t n = 0;
    std::vector<Edge> edges;

    TransitionGraph build(bool self_loops) const {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i) {
            names.push_back("m" + std::to_string(i));
        }
        std::vector<Edge> kept;
        for (const auto& e : edges) {
            if (self_loops || e.source != e.target) {
                kept.push_back(e);
            }
        }
        return TransitionGraph::from_edges(names, kept, self_loops);
    }

    oracle::SmallGraph small(bool self_loops) const {
        oracle::SmallGraph g{n, {}};
        for (const auto& e : edges) {
            if (self_loops || e.source != e.target) {
                g.edges.emplace_back(e.source, e.target, e.visits);
            }
        }
        return g;
    }
};

RandomGraph random_graph(Rng& rng, bool equal_visits_per_node) {
    RandomGraph g;
    g.n = 2 + uniform_index(rng, 7);
    const double density = 0.2 + 0.7 * uniform01(rng);
    std::vector<std::uint64_t> node_visits(g.n);
    for (auto& v : node_visits) {
        v = 1 + uniform_index(rng, 5);
    }
    for (NodeId s = 0; s < g.n; ++s) {
        for (NodeId t = 0; t < g.n; ++t) {
            if (uniform01(rng) < density) {
                const std::uint64_t visits = equal_visits_per_node ? node_visits[s] : 1 + uniform_index(rng, 5);
                g.edges.push_back({s, t, visits});
            }
        }
    }
    return g;
}

RankParams tight(Algorithm a, double d) {
    RankParams p;
    p.algorithm = a;
    p.d = d;
    p.epsilon = 1e-12;
    p.max_iters = 10'000;
    return p;
}

double linf(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

constexpr Algorithm kAlgorithms[] = {Algorithm::PR, Algorithm::SPR, Algorithm::VOL, Algorithm::SVOL};

std::vector<RandomGraph> oracle_graphs() {
    Rng rng(20240601);
    std::vector<RandomGraph> out;
    for (int i = 0; i < 500; ++i) {
        out.push_back(random_graph(rng, false));
    }
    return out;
}

EvalReport checked_cv(const LabeledDataset& data, const LearnerConfig& learner, std::size_t k, std::uint64_t seed) {
    auto r = cross_validate(data, learner, k, seed);
    ++g_cv_runs;
    g_cv_bad_totals += r.total() == data.size() ? 0 : 1;
    return r;
}

LearnerConfig forest_learner() {
    LearnerConfig c;
    c.kind = LearnerKind::RandomForest;
    c.trees_per_forest = 10;
    c.threads = worker_threads();
    return c;
}

SynthSpec separation_spec() {
    SynthSpec s;
    s.n_families = 3;
    s.families_per_type = 2;
    s.samples_per_family = 200;
    s.trace_length = 10'000;
    s.alphabet_size = 30;
    s.noise = 0.05;
    s.seed = 7;
    return s;
}

RankParams rank_at(Algorithm a, double d) {
    RankParams p;
    p.algorithm = a;
    p.d = d;
    return p;
}

} // namespace

int main() {
    const auto graphs = oracle_graphs();
    constexpr double kDampings[] = {0.0, 0.5, 0.85, 0.99};

    run(1, "iterative ranks match the exact solve on 500 random graphs", [&] {
        const auto t0 = Clock::now();
        double worst = 0.0;
        double worst_oracle = 0.0;
        std::size_t cases = 0;
        for (const auto& rg : graphs) {
            for (Algorithm a : kAlgorithms) {
                const auto g = rg.build(uses_self_loops(a));
                const auto small = rg.small(uses_self_loops(a));
                for (double d : kDampings) {
                    const auto it = rank_iterative(g, tight(a, d));
                    const auto ex = rank_exact(g, tight(a, d));
                    const auto ref = oracle::solve_ranks(small, d, uses_visits(a));
                    worst = std::max(worst, linf(it.values, ex.values));
                    worst_oracle = std::max(worst_oracle, linf(it.values, ref));
                    ++cases;
                }
            }
        }
        const double secs = seconds_since(t0);
        const bool ok = worst < 1e-8 && worst_oracle < 1e-8 && secs < 10.0;
        return std::pair{ok, fmt("%zu cases, max Linf vs exact %.3g, vs independent solve %.3g, %.2f s", cases, worst,
                                 worst_oracle, secs)};
    });

    run(2, "rank sum equals N on dangling-free graphs, d = 1 included", [&] {
        double worst = 0.0;
        std::size_t cases = 0;
        for (const auto& rg : graphs) {
            for (Algorithm a : kAlgorithms) {
                const auto g = rg.build(uses_self_loops(a));
                if (g.has_dangling_nodes()) {
                    continue;
                }
                for (double d : {0.0, 0.5, 0.85, 0.99, 1.0}) {
                    const auto r = rank_iterative(g, tight(a, d));
                    worst = std::max(worst, std::abs(r.sum() - static_cast<double>(g.node_count())));
                    ++cases;
                }
            }
        }
        return std::pair{worst < 1e-8 && cases > 0, fmt("%zu cases, max |sum - N| %.3g", cases, worst)};
    });

    run(3, "VOL reduces to PR and SVOL to SPR under equal out-visits", [&] {
        Rng rng(31337);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto rg = random_graph(rng, true);
            for (bool loops : {false, true}) {
                const auto g = rg.build(loops);
                for (double d : kDampings) {
                    const auto pr = rank_iterative(g, tight(loops ? Algorithm::SPR : Algorithm::PR, d));
                    const auto vol = rank_iterative(g, tight(loops ? Algorithm::SVOL : Algorithm::VOL, d));
                    worst = std::max(worst, linf(pr.values, vol.values));
                }
            }
        }
        return std::pair{worst < 1e-10, fmt("100 graphs, max Linf %.3g", worst)};
    });

    run(4, "d = 0 gives exactly 1.0 after one iteration", [&] {
        bool ok = true;
        for (const auto& rg : graphs) {
            for (Algorithm a : kAlgorithms) {
                const auto r = rank_iterative(rg.build(uses_self_loops(a)), tight(a, 0.0));
                ok = ok && r.converged && r.iterations_used == 1;
                for (double v : r.values) {
                    ok = ok && v == 1.0;
                }
            }
        }
        return std::pair{ok, std::string("500 graphs x 4 variants")};
    });

    run(5, "visit-weighted contribution 2 * 100 / 10 = 20", [&] {
        const double direct = link_contribution(Algorithm::VOL, 1.0, 100.0, OutStats{2, 10}, 2);
        // In-neighbour A with TV 10: one edge of 2 visits to D, 8 to E.
        const auto g = TransitionGraph::from_edges({"A", "D", "E"}, {{0, 1, 2}, {0, 2, 8}}, false);
        const auto next = rank_step(g, rank_at(Algorithm::VOL, 1.0), std::vector<double>{100.0, 1.0, 1.0});
        return std::pair{direct == 20.0 && next[1] == 20.0,
                         fmt("contribution %.17g, updated rank %.17g", direct, next[1])};
    });

    run(6, "graph construction agrees with brute-force 2-gram counting on 1000 traces", [&] {
        Rng rng(6006);
        std::size_t mismatches = 0;
        for (int i = 0; i < 1000; ++i) {
            const std::size_t len = 1 + uniform_index(rng, 200);
            const std::size_t alphabet = 1 + uniform_index(rng, 12);
            std::vector<std::string> seq;
            for (std::size_t j = 0; j < len; ++j) {
                seq.push_back("op" + std::to_string(uniform_index(rng, alphabet)));
            }
            std::size_t repeats = 0;
            for (std::size_t j = 1; j < len; ++j) {
                repeats += seq[j] == seq[j - 1] ? 1 : 0;
            }
            for (bool loops : {true, false}) {
                const auto g = build_graph(seq, loops);
                const auto expect = oracle::count_bigrams(seq, loops);
                const std::uint64_t want_total = len - 1 - (loops ? 0 : repeats);
                bool ok = g.total_visits() == want_total && g.edge_count() == expect.size();
                for (const auto& [pair, count] : expect) {
                    ok = ok && g.visits(pair.first, pair.second) == count;
                }
                mismatches += ok ? 0 : 1;
            }
        }
        return std::pair{mismatches == 0, fmt("%zu mismatching graphs out of 2000", mismatches)};
    });

    // Shared by criteria 7 and 9.
    const auto t_synth = Clock::now();
    const auto corpus = generate(separation_spec(), worker_threads());

    run(7, "SVOL d = 1 with a 10-tree forest separates the synthetic families and types", [&] {
        const auto m = featurize_corpus(corpus.traces, rank_at(Algorithm::SVOL, 1.0), worker_threads());
        const auto fam = checked_cv(LabeledDataset::from_matrix(m, LabelTarget::Family), forest_learner(), 10, 42);
        const auto typ = checked_cv(LabeledDataset::from_matrix(m, LabelTarget::Type), forest_learner(), 10, 42);
        const double secs = seconds_since(t_synth);
        const double f_fam = fam.metrics.weighted_f;
        const double f_typ = typ.metrics.weighted_f;
        const bool target = f_fam >= 0.95 && f_typ >= 0.95;
        const bool ok = f_fam >= 0.90 && f_typ >= 0.90 && secs < 120.0;
        return std::pair{ok, fmt("weighted f family %.4f, type %.4f, %s 0.95 target, %.1f s incl. synthesis", f_fam,
                                 f_typ, target ? "meets" : "below", secs)};
    });

    run(8, "self-visit information lifts SVOL above VOL on self-loop-biased family pairs", [&] {
        auto spec = separation_spec();
        spec.n_families = 4;
        spec.paired_self_loops = true;
        spec.self_loop_bias = 0.4;
        const auto paired = generate(spec, worker_threads());
        double f[2][2] = {};
        int i = 0;
        for (Algorithm a : {Algorithm::VOL, Algorithm::SVOL}) {
            const auto m = featurize_corpus(paired.traces, rank_at(a, 1.0), worker_threads());
            f[i][0] = checked_cv(LabeledDataset::from_matrix(m, LabelTarget::Family), forest_learner(), 10, 42)
                          .metrics.weighted_f;
            f[i][1] = checked_cv(LabeledDataset::from_matrix(m, LabelTarget::Type), forest_learner(), 10, 42)
                          .metrics.weighted_f;
            ++i;
        }
        return std::pair{f[1][0] > f[0][0], fmt("family weighted f SVOL %.4f vs VOL %.4f; type SVOL %.4f vs VOL %.4f",
                                                f[1][0], f[0][0], f[1][1], f[0][1])};
    });

    run(9, "d sweep over 0.1..1.0 computes every point", [&] {
        std::vector<double> ds;
        for (int i = 1; i <= 10; ++i) {
            ds.push_back(i / 10.0);
        }
        const auto t0 = Clock::now();
        const auto sweep = sweep_d(corpus.traces, rank_at(Algorithm::SVOL, 0.85), ds, forest_learner(), 10, 42,
                                   worker_threads());
        g_cv_runs += 2 * sweep.points.size();
        std::string curve;
        for (const auto& p : sweep.points) {
            curve += fmt("%s%.1f:%.4f/%.4f", curve.empty() ? "" : " ", p.d, p.weighted_f_type, p.weighted_f_family);
        }
        const double best_t = sweep.best_d(LabelTarget::Type);
        const double best_f = sweep.best_d(LabelTarget::Family);
        std::printf("     d sweep (type/family weighted f): %s\n", curve.c_str());
        std::printf("     best d type %.1f, family %.1f (%s d >= 0.8); Spearman trend type %.3f, family %.3f\n",
                    best_t, best_f, best_t >= 0.8 && best_f >= 0.8 ? "both at" : "not both at",
                    sweep.trend(LabelTarget::Type), sweep.trend(LabelTarget::Family));
        return std::pair{sweep.points.size() == 10, fmt("%zu points, %.1f s", sweep.points.size(), seconds_since(t0))};
    });

    run(10, "boosting weight algebra, MultiBoost T = 1 equivalence, thread-count determinism", [&] {
        // Rank features of a small corpus with duplicated rows carrying a
        // second label, so boosting always sees training error.
        SynthSpec spec = separation_spec();
        spec.samples_per_family = 40;
        spec.trace_length = 2000;
        const auto small = generate(spec, worker_threads());
        auto m = featurize_corpus(small.traces, rank_at(Algorithm::SVOL, 0.85), worker_threads());
        const std::size_t original = m.rows.size();
        for (std::size_t i = 0; i < original; i += 4) {
            auto dup = m.rows[i];
            dup.family_label = dup.family_label == "family00" ? "family01" : "family00";
            m.rows.push_back(std::move(dup));
        }
        const auto data = LabeledDataset::from_matrix(m, LabelTarget::Family);

        LearnerConfig ada = forest_learner();
        ada.kind = LearnerKind::AdaBoostM1;
        ada.meta_iterations = 10;
        ada.seed = 99;
        ada.threads = 1;
        BoostingTrace trace;
        train_meta(data, ada, &trace);
        double worst = 0.0;
        for (const auto& w : trace.weights) {
            worst = std::max(worst, std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0));
        }
        const bool sums_ok = worst < 1e-12 && !trace.weights.empty();

        bool equivalence = true;
        for (std::uint64_t seed : {1, 7, 99}) {
            auto a1 = ada;
            a1.meta_iterations = 1;
            a1.seed = seed;
            auto m1 = a1;
            m1.kind = LearnerKind::MultiBoostAB;
            equivalence = equivalence && train_meta(data, a1).members == train_meta(data, m1).members;
        }

        bool deterministic = true;
        for (auto kind : {LearnerKind::RandomForest, LearnerKind::Bagging, LearnerKind::AdaBoostM1,
                          LearnerKind::MultiBoostAB}) {
            auto one = ada;
            one.kind = kind;
            one.threads = 1;
            auto eight = one;
            eight.threads = 8;
            deterministic = deterministic && train_meta(data, one).members == train_meta(data, eight).members;
            const auto cv1 = checked_cv(data, one, 5, 3);
            const auto cv8 = checked_cv(data, eight, 5, 3);
            deterministic = deterministic && cv1.confusion == cv8.confusion;
        }
        return std::pair{sums_ok && equivalence && deterministic,
                         fmt("%zu boosting iterations, max |sum w - 1| %.3g; T=1 equivalence %s; 1 vs 8 threads %s",
                             trace.weights.size(), worst, equivalence ? "holds" : "broken",
                             deterministic ? "identical" : "differ")};
    });

    run(11, "f-measure identities and pooled confusion totals", [&] {
        const auto h = f_measure(ConfusionMatrix{{1, 0}, {1, 0}});
        const bool harmonic = h.per_class[0].precision == 0.5 && h.per_class[0].recall == 1.0 &&
                              std::abs(h.per_class[0].f_measure - 2.0 / 3.0) < 1e-15;
        const bool zero_column = h.per_class[1].precision == 0.0 && h.per_class[1].recall == 0.0 &&
                                 h.per_class[1].f_measure == 0.0;

        bool diagonal = true;
        Rng rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t k = 2 + uniform_index(rng, 6);
            ConfusionMatrix cm(k, std::vector<std::uint64_t>(k, 0));
            for (std::size_t i = 0; i < k; ++i) {
                cm[i][i] = 1 + uniform_index(rng, 50);
            }
            const auto m = f_measure(cm);
            diagonal = diagonal && m.weighted_f == 1.0 && m.macro_f == 1.0 && m.accuracy == 1.0;
        }
        const bool totals = g_cv_runs > 0 && g_cv_bad_totals == 0;
        return std::pair{harmonic && zero_column && diagonal && totals,
                         fmt("harmonic %s, zero column %s, diagonal %s, pooled total = N on %zu/%zu CV runs",
                             harmonic ? "ok" : "wrong", zero_column ? "ok" : "wrong", diagonal ? "ok" : "wrong",
                             g_cv_runs - g_cv_bad_totals, g_cv_runs)};
    });

    std::printf("%s: %d criterion(s) failed\n", g_failed ? "FAILED" : "ALL PASSED", g_failed);
    return g_failed ? 1 : 0;
}
