// mnemorank command-line front end. Everything below goes through the C API.

#include "mnemorank/mnemorank.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

std::string shortest(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    for (int precision = 1; precision < 17; ++precision) {
        char trial[32];
        std::snprintf(trial, sizeof trial, "%.*g", precision, v);
        if (std::strtod(trial, nullptr) == v) {
            return trial;
        }
    }
    return buf;
}

int exit_code(mr_status status) {
    switch (status) {
    case MR_OK:
        return kOk;
    case MR_ERR_INVALID_ARGUMENT:
        return kUsage;
    case MR_ERR_IO:
    case MR_ERR_EMPTY_TRACE:
    case MR_ERR_MISSING_COLUMN:
    case MR_ERR_DUPLICATE_SAMPLE_ID:
    case MR_ERR_EMPTY_MANIFEST:
    case MR_ERR_EMPTY_CORPUS:
    case MR_ERR_EMPTY_MATRIX:
    case MR_ERR_SINGLE_CLASS_DATA:
    case MR_ERR_TOO_FEW_ROWS:
        return kData;
    default:
        return kInternal;
    }
}

// Thrown to unwind out of a subcommand with a diagnostic.
struct StageFailure {
    std::string stage;
    mr_status status;
};

void check(mr_status status, const char* stage) {
    if (status != MR_OK) {
        throw StageFailure{stage, status};
    }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using CorpusPtr = std::unique_ptr<mr_corpus, Deleter<mr_corpus, mr_corpus_free>>;
using FeaturesPtr = std::unique_ptr<mr_features, Deleter<mr_features, mr_features_free>>;
using ReportPtr = std::unique_ptr<mr_report, Deleter<mr_report, mr_report_free>>;
using SweepPtr = std::unique_ptr<mr_sweep, Deleter<mr_sweep, mr_sweep_free>>;

struct InputOptions {
    std::string manifest = "corpus/manifest.csv";
    std::string corpus;
    std::size_t cap = 5'000'000;
    std::string cache_dir;
};

struct RankOptions {
    std::string algo = "svol";
    double d = 0.85;
    double eps = 1e-10;
    std::size_t max_iter = 1000;
    std::string self_loops = "auto";
};

struct LearnerOptions {
    std::string learner = "rf";
    std::size_t trees = 10;
    std::size_t iterations = 10;
    double bag_percent = 100.0;
    std::size_t feature_subset = 0;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::string label = "type";
};

void add_input(CLI::App* cmd, InputOptions& o) {
    cmd->add_option("--manifest", o.manifest, "Corpus manifest (sample_id,trace_path,type,family)");
    cmd->add_option("--corpus", o.corpus, "Parsed corpus written by 'ingest'; overrides --manifest");
    cmd->add_option("--cap", o.cap, "Maximum mnemonics read per trace")->check(CLI::PositiveNumber);
    cmd->add_option("--cache-dir", o.cache_dir, "Directory for cached rank vectors");
}

void add_rank(CLI::App* cmd, RankOptions& o, bool with_d = true) {
    cmd->add_option("--algo", o.algo, "Rank variant")->check(CLI::IsMember({"pr", "spr", "vol", "svol"}));
    if (with_d) {
        cmd->add_option("--d", o.d, "Damping factor in [0, 1]");
    }
    cmd->add_option("--eps", o.eps, "Convergence tolerance (max absolute change)");
    cmd->add_option("--max-iter", o.max_iter, "Iteration cap");
    cmd->add_option("--self-loops", o.self_loops, "Graph self-visit policy")
        ->check(CLI::IsMember({"auto", "on", "off"}));
}

void add_learner(CLI::App* cmd, LearnerOptions& o) {
    cmd->add_option("--learner", o.learner, "Classifier")
        ->check(CLI::IsMember({"rf", "bagging", "adaboost", "multiboost"}));
    cmd->add_option("--trees", o.trees, "Trees per random forest");
    cmd->add_option("--iterations", o.iterations, "Bagging / boosting iterations");
    cmd->add_option("--bag-percent", o.bag_percent, "Bag size as a percentage of the training set");
    cmd->add_option("--feature-subset", o.feature_subset, "Features drawn per split (0 = log2(F) + 1)");
    cmd->add_option("--folds", o.folds, "Cross-validation folds");
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--label", o.label, "Label to predict")->check(CLI::IsMember({"type", "family"}));
}

mr_rank_options to_c(const RankOptions& o) {
    mr_rank_options r;
    mr_rank_options_init(&r);
    check(mr_parse_algorithm(o.algo.c_str(), &r.algorithm), "options");
    r.d = o.d;
    r.epsilon = o.eps;
    r.max_iters = o.max_iter;
    r.self_loops = o.self_loops == "on" ? MR_SELF_LOOPS_ON : o.self_loops == "off" ? MR_SELF_LOOPS_OFF
                                                                                   : MR_SELF_LOOPS_AUTO;
    check(mr_rank_options_validate(&r), "options");
    return r;
}

mr_learner_options to_c(const LearnerOptions& o, unsigned threads) {
    mr_learner_options l;
    mr_learner_options_init(&l);
    check(mr_parse_learner(o.learner.c_str(), &l.kind), "options");
    l.trees_per_forest = o.trees;
    l.meta_iterations = o.iterations;
    l.bag_percent = o.bag_percent;
    l.feature_subset_size = o.feature_subset;
    l.seed = o.seed;
    l.threads = threads;
    check(mr_learner_options_validate(&l), "options");
    return l;
}

mr_label label_of(const std::string& s) { return s == "family" ? MR_LABEL_FAMILY : MR_LABEL_TYPE; }

CorpusPtr load_input(const InputOptions& o, unsigned threads) {
    mr_corpus* raw = nullptr;
    if (!o.corpus.empty()) {
        check(mr_corpus_load(o.corpus.c_str(), &raw), "ingest");
    } else {
        check(mr_corpus_load_manifest(o.manifest.c_str(), o.cap, threads, &raw), "ingest");
    }
    return CorpusPtr(raw);
}

const char* cache_of(const InputOptions& o) { return o.cache_dir.empty() ? nullptr : o.cache_dir.c_str(); }

// Echo of the global options and the active subcommand, in the config-file
// format accepted by --config.
std::string config_echo(const CLI::App& app, const CLI::App& sub) {
    std::string out = app.config_to_str(true, false);
    // Drop other subcommands' sections; keep top-level "key=value" lines.
    std::string globals;
    std::size_t start = 0;
    while (start < out.size()) {
        auto end = out.find('\n', start);
        if (end == std::string::npos) {
            end = out.size();
        }
        const std::string line = out.substr(start, end - start);
        if (!line.empty() && line.front() == '[') {
            break;
        }
        const auto eq = line.find('=');
        if (!line.empty() && eq != std::string::npos && line.substr(0, eq).find('.') == std::string::npos) {
            globals += line + '\n';
        }
        start = end + 1;
    }
    return globals + "[" + sub.get_name() + "]\n" + sub.config_to_str(true, false);
}

void write_sidecar(const std::string& artifact, const std::string& echo) {
    const std::string path = artifact + ".config";
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) {
        throw StageFailure{"output", MR_ERR_IO};
    }
    std::fwrite(echo.data(), 1, echo.size(), f);
    std::fclose(f);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Instruction-rank malware categorisation toolkit"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "Read options from a key=value file");
    app.fallthrough();
    app.require_subcommand(1, 1);
    unsigned threads = 1;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");
    app.set_version_flag("--version", std::string(mr_version()));

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic labelled trace corpus");
    mr_synth_options synth_opts;
    mr_synth_options_init(&synth_opts);
    std::string synth_out = "corpus";
    bool paired = false;
    synth->add_option("--families", synth_opts.n_families, "Number of families");
    synth->add_option("--samples", synth_opts.samples_per_family, "Samples per family");
    synth->add_option("--len", synth_opts.trace_length, "Instructions per trace");
    synth->add_option("--alphabet", synth_opts.alphabet_size, "Distinct mnemonics");
    synth->add_option("--self-loop-bias", synth_opts.self_loop_bias, "Extra self-transition mass in [0, 1)");
    synth->add_option("--noise", synth_opts.noise, "Probability of a uniform random jump");
    synth->add_option("--families-per-type", synth_opts.families_per_type, "Families grouped into one type");
    synth->add_flag("--paired-self-loops", paired, "Families come in pairs differing only in self-loop bias");
    synth->add_option("--seed", synth_opts.seed, "Random seed");
    synth->add_option("--out", synth_out, "Output directory");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse every trace of a manifest into a corpus file");
    InputOptions ingest_in;
    std::string ingest_out = "corpus.mnc";
    ingest->add_option("--manifest", ingest_in.manifest, "Corpus manifest");
    ingest->add_option("--cap", ingest_in.cap, "Maximum mnemonics read per trace")->check(CLI::PositiveNumber);
    ingest->add_option("--out", ingest_out, "Corpus file to write");

    // rank
    auto* rank = app.add_subcommand("rank", "Compute instruction rank vectors");
    InputOptions rank_in;
    RankOptions rank_opts;
    std::string rank_out = "ranks.txt";
    std::string graphs_dir;
    add_input(rank, rank_in);
    add_rank(rank, rank_opts);
    rank->add_option("--out", rank_out, "Rank vector file");
    rank->add_option("--dump-graphs", graphs_dir, "Also write per-sample edge lists here");

    // featurize
    auto* featurize = app.add_subcommand("featurize", "Write the aligned rank feature matrix");
    InputOptions feat_in;
    RankOptions feat_rank;
    std::string feat_format = "csv";
    std::string feat_label = "type";
    std::string feat_out = "features.csv";
    add_input(featurize, feat_in);
    add_rank(featurize, feat_rank);
    featurize->add_option("--format", feat_format, "Output format")->check(CLI::IsMember({"csv", "arff"}));
    featurize->add_option("--label", feat_label, "Label column")->check(CLI::IsMember({"type", "family"}));
    featurize->add_option("--out", feat_out, "Output file");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Cross-validate a classifier on rank features");
    InputOptions eval_in;
    RankOptions eval_rank;
    LearnerOptions eval_learner;
    std::string eval_out = "eval";
    std::string model_out;
    add_input(evaluate, eval_in);
    add_rank(evaluate, eval_rank);
    add_learner(evaluate, eval_learner);
    evaluate->add_option("--out-dir", eval_out, "Directory for report.txt, summary.txt and confusion.csv");
    evaluate->add_option("--save-model", model_out, "Also train on all samples and save the model here");

    // sweep-d
    auto* sweep = app.add_subcommand("sweep-d", "Cross-validate over a range of damping factors");
    InputOptions sweep_in;
    RankOptions sweep_rank;
    LearnerOptions sweep_learner;
    std::vector<double> d_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::string sweep_out = "sweep.csv";
    add_input(sweep, sweep_in);
    add_rank(sweep, sweep_rank, false);
    add_learner(sweep, sweep_learner);
    sweep->add_option("--d-values", d_values, "Damping factors")->delimiter(',');
    sweep->add_option("--out", sweep_out, "Sweep CSV");

    // report
    auto* report = app.add_subcommand("report", "Pretty-print a stored evaluation summary");
    std::string summary_path = "eval/summary.txt";
    report->add_option("summary", summary_path, "summary.txt written by 'evaluate'");

    // A config echo names its subcommand as a section, so a saved echo alone
    // reruns the stage.
    for (auto* sub : app.get_subcommands({})) {
        sub->configurable();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    const char* stage = "setup";
    try {
        if (synth->parsed()) {
            stage = "synth";
            synth_opts.paired_self_loops = paired ? 1 : 0;
            check(mr_synth_generate(&synth_opts, synth_out.c_str(), threads, nullptr), stage);
            write_sidecar((std::filesystem::path(synth_out) / "manifest.csv").string(), config_echo(app, *synth));
            std::cout << "wrote " << synth_opts.n_families * synth_opts.samples_per_family << " traces to "
                      << synth_out << '\n';
        } else if (ingest->parsed()) {
            auto corpus = load_input(ingest_in, threads);
            stage = "ingest";
            check(mr_corpus_save(corpus.get(), ingest_out.c_str()), stage);
            write_sidecar(ingest_out, config_echo(app, *ingest));
            std::size_t truncated = 0;
            for (std::size_t i = 0; i < mr_corpus_size(corpus.get()); ++i) {
                truncated += static_cast<std::size_t>(mr_corpus_truncated(corpus.get(), i));
            }
            std::cout << "ingested " << mr_corpus_size(corpus.get()) << " samples (" << truncated
                      << " truncated) into " << ingest_out << '\n';
        } else if (rank->parsed()) {
            const auto options = to_c(rank_opts);
            auto corpus = load_input(rank_in, threads);
            stage = "rank";
            const std::string echo = config_echo(app, *rank);
            check(mr_rank_corpus(corpus.get(), &options, cache_of(rank_in), threads, rank_out.c_str(), echo.c_str()),
                  stage);
            if (!graphs_dir.empty()) {
                check(mr_corpus_write_graphs(corpus.get(), &options, graphs_dir.c_str()), stage);
                write_sidecar((std::filesystem::path(graphs_dir) / "graphs").string(), echo);
            }
            std::cout << "ranked " << mr_corpus_size(corpus.get()) << " samples into " << rank_out << '\n';
        } else if (featurize->parsed()) {
            const auto options = to_c(feat_rank);
            auto corpus = load_input(feat_in, threads);
            stage = "featurize";
            mr_features* raw = nullptr;
            check(mr_features_build(corpus.get(), &options, cache_of(feat_in), threads, &raw), stage);
            FeaturesPtr features(raw);
            const std::string echo = config_echo(app, *featurize);
            const auto format = feat_format == "arff" ? MR_FORMAT_ARFF : MR_FORMAT_CSV;
            check(mr_features_export(features.get(), format, label_of(feat_label), feat_out.c_str(), echo.c_str()),
                  stage);
            write_sidecar(feat_out, echo);
            std::cout << "wrote " << mr_features_rows(features.get()) << " x " << mr_features_columns(features.get())
                      << " features to " << feat_out << '\n';
        } else if (evaluate->parsed()) {
            const auto options = to_c(eval_rank);
            const auto learner = to_c(eval_learner, threads);
            auto corpus = load_input(eval_in, threads);
            stage = "featurize";
            mr_features* raw_features = nullptr;
            check(mr_features_build(corpus.get(), &options, cache_of(eval_in), threads, &raw_features), stage);
            FeaturesPtr features(raw_features);
            stage = "evaluate";
            mr_report* raw_report = nullptr;
            check(mr_evaluate(features.get(), label_of(eval_learner.label), &learner, eval_learner.folds, &raw_report),
                  stage);
            ReportPtr rep(raw_report);
            check(mr_report_add_config(rep.get(), "algorithm", eval_rank.algo.c_str()), stage);
            check(mr_report_add_config(rep.get(), "d", shortest(eval_rank.d).c_str()), stage);
            check(mr_report_write(rep.get(), eval_out.c_str(), config_echo(app, *evaluate).c_str()), stage);
            if (!model_out.empty()) {
                stage = "train";
                mr_model* model = nullptr;
                check(mr_model_train(features.get(), label_of(eval_learner.label), &learner, &model), stage);
                const mr_status saved = mr_model_save(model, model_out.c_str());
                mr_model_free(model);
                check(saved, stage);
                write_sidecar(model_out, config_echo(app, *evaluate));
            }
            std::cout << mr_report_text(rep.get());
        } else if (sweep->parsed()) {
            const auto options = to_c(sweep_rank);
            const auto learner = to_c(sweep_learner, threads);
            auto corpus = load_input(sweep_in, threads);
            stage = "sweep-d";
            mr_sweep* raw = nullptr;
            check(mr_sweep_d(corpus.get(), &options, d_values.data(), d_values.size(), &learner, sweep_learner.folds,
                             cache_of(sweep_in), threads, &raw),
                  stage);
            SweepPtr result(raw);
            check(mr_sweep_write_csv(result.get(), sweep_out.c_str()), stage);
            write_sidecar(sweep_out, config_echo(app, *sweep));
            std::cout << "d,weighted_f_type,weighted_f_family\n";
            for (std::size_t i = 0; i < mr_sweep_points(result.get()); ++i) {
                double d = 0;
                double ft = 0;
                double ff = 0;
                check(mr_sweep_point(result.get(), i, &d, &ft, &ff), stage);
                std::printf("%.2f,%.4f,%.4f\n", d, ft, ff);
            }
            std::printf("trend (Spearman): type %.3f, family %.3f; best d: type %.2f, family %.2f\n",
                        mr_sweep_trend(result.get(), MR_LABEL_TYPE), mr_sweep_trend(result.get(), MR_LABEL_FAMILY),
                        mr_sweep_best_d(result.get(), MR_LABEL_TYPE), mr_sweep_best_d(result.get(), MR_LABEL_FAMILY));
        } else if (report->parsed()) {
            stage = "report";
            mr_report* raw = nullptr;
            check(mr_report_load_summary(summary_path.c_str(), &raw), stage);
            ReportPtr rep(raw);
            std::cout << mr_report_text(rep.get());
        }
    } catch (const StageFailure& f) {
        const char* message = mr_last_error();
        std::cerr << "mnemorank: " << f.stage << ": " << (*message ? message : mr_status_name(f.status)) << '\n';
        return exit_code(f.status);
    } catch (const std::exception& e) {
        std::cerr << "mnemorank: " << stage << ": " << e.what() << '\n';
        return kInternal;
    }
    return kOk;
}
