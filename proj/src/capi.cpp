#include "mnemorank/mnemorank.h"

#include "mnemorank/error.hpp"
#include "mnemorank/eval.hpp"
#include "mnemorank/features.hpp"
#include "mnemorank/graph.hpp"
#include "mnemorank/store.hpp"
#include "mnemorank/synth.hpp"

#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>

struct mr_corpus {
    std::vector<mnemorank::MnemonicTrace> traces;
};

struct mr_features {
    mnemorank::FeatureMatrix matrix;
};

struct mr_report {
    mnemorank::EvalReport report;
    std::string text;
};

struct mr_sweep {
    mnemorank::SweepResult result;
};

struct mr_model {
    mnemorank::Model model;
    std::string last_label;
};

namespace {

using namespace mnemorank;

thread_local std::string g_last_error;
thread_local std::string g_token;

mr_status to_status(ErrorCode code) noexcept { return static_cast<mr_status>(static_cast<int>(code)); }

template <typename Fn>
mr_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        return MR_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "Internal: out of memory";
        return MR_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = std::string("Internal: ") + e.what();
        return MR_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "Internal: unknown exception";
        return MR_ERR_INTERNAL;
    }
}

template <typename T>
void require(const T* p, const char* what) {
    if (p == nullptr) {
        fail(ErrorCode::InvalidArgument, std::string(what) + " must not be null");
    }
}

Algorithm algorithm_of(mr_algorithm a) {
    switch (a) {
    case MR_ALGO_PR: return Algorithm::PR;
    case MR_ALGO_SPR: return Algorithm::SPR;
    case MR_ALGO_VOL: return Algorithm::VOL;
    case MR_ALGO_SVOL: return Algorithm::SVOL;
    }
    fail(ErrorCode::InvalidArgument, "unknown rank variant");
}

LearnerKind learner_of(mr_learner k) {
    switch (k) {
    case MR_LEARNER_RF: return LearnerKind::RandomForest;
    case MR_LEARNER_BAGGING: return LearnerKind::Bagging;
    case MR_LEARNER_ADABOOST: return LearnerKind::AdaBoostM1;
    case MR_LEARNER_MULTIBOOST: return LearnerKind::MultiBoostAB;
    }
    fail(ErrorCode::InvalidArgument, "unknown learner kind");
}

LabelTarget label_of(mr_label l) {
    if (l == MR_LABEL_TYPE) {
        return LabelTarget::Type;
    }
    if (l == MR_LABEL_FAMILY) {
        return LabelTarget::Family;
    }
    fail(ErrorCode::InvalidArgument, "unknown label target");
}

// Variant parameters plus the graph policy they imply. An explicit policy
// contradicting the variant is rejected the same way validate() rejects it.
RankParams rank_params_of(const mr_rank_options* o) {
    require(o, "rank options");
    RankParams p;
    p.algorithm = algorithm_of(o->algorithm);
    p.d = o->d;
    p.epsilon = o->epsilon;
    p.max_iters = o->max_iters;
    if (o->self_loops != MR_SELF_LOOPS_AUTO && (o->self_loops == MR_SELF_LOOPS_ON) != uses_self_loops(p.algorithm)) {
        fail(ErrorCode::InvalidArgument,
             std::string(to_string(p.algorithm)) + " cannot rank a graph built " +
                 (o->self_loops == MR_SELF_LOOPS_ON ? "with" : "without") + " self-visit edges");
    }
    // Parameter ranges are checked before any trace is touched.
    validate(p, build_graph(std::vector<std::string>{"x"}, uses_self_loops(p.algorithm)));
    return p;
}

LearnerConfig learner_config_of(const mr_learner_options* o) {
    require(o, "learner options");
    LearnerConfig c;
    c.kind = learner_of(o->kind);
    c.trees_per_forest = o->trees_per_forest;
    c.meta_iterations = o->meta_iterations;
    c.bag_percent = o->bag_percent;
    c.feature_subset_size = o->feature_subset_size;
    c.seed = o->seed;
    c.threads = o->threads;
    validate(c);
    return c;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::Io, "cannot write " + path.string());
    }
    return out;
}

std::optional<RankCache> make_cache(const char* dir) {
    if (dir == nullptr || *dir == '\0') {
        return std::nullopt;
    }
    return std::optional<RankCache>(std::in_place, dir);
}

} // namespace

extern "C" {

const char* mr_version(void) { return "0.1.0"; }

const char* mr_last_error(void) { return g_last_error.c_str(); }

const char* mr_status_name(mr_status status) {
    if (status == MR_OK) {
        return "Ok";
    }
    static thread_local std::string name;
    name = std::string(to_string(static_cast<ErrorCode>(status)));
    return name.c_str();
}

void mr_rank_options_init(mr_rank_options* o) {
    if (o == nullptr) {
        return;
    }
    o->algorithm = MR_ALGO_SVOL;
    o->d = kDefaultDamping;
    o->epsilon = kDefaultEpsilon;
    o->max_iters = kDefaultMaxIters;
    o->self_loops = MR_SELF_LOOPS_AUTO;
}

void mr_learner_options_init(mr_learner_options* o) {
    if (o == nullptr) {
        return;
    }
    const LearnerConfig c;
    o->kind = MR_LEARNER_RF;
    o->trees_per_forest = c.trees_per_forest;
    o->meta_iterations = c.meta_iterations;
    o->bag_percent = c.bag_percent;
    o->feature_subset_size = c.feature_subset_size;
    o->seed = c.seed;
    o->threads = c.threads;
}

void mr_synth_options_init(mr_synth_options* o) {
    if (o == nullptr) {
        return;
    }
    const SynthSpec s;
    o->n_families = s.n_families;
    o->samples_per_family = s.samples_per_family;
    o->trace_length = s.trace_length;
    o->alphabet_size = s.alphabet_size;
    o->self_loop_bias = s.self_loop_bias;
    o->noise = s.noise;
    o->seed = s.seed;
    o->families_per_type = s.families_per_type;
    o->paired_self_loops = s.paired_self_loops ? 1 : 0;
}

mr_status mr_rank_options_validate(const mr_rank_options* options) {
    return guarded([&] { rank_params_of(options); });
}

mr_status mr_learner_options_validate(const mr_learner_options* options) {
    return guarded([&] { learner_config_of(options); });
}

mr_status mr_parse_algorithm(const char* name, mr_algorithm* out) {
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        auto a = parse_algorithm(name);
        if (!a) {
            fail(ErrorCode::InvalidArgument, std::string("unknown rank variant '") + name + "'");
        }
        *out = static_cast<mr_algorithm>(static_cast<int>(*a));
    });
}

mr_status mr_parse_learner(const char* name, mr_learner* out) {
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        auto k = parse_learner_kind(name);
        if (!k) {
            fail(ErrorCode::InvalidArgument, std::string("unknown learner '") + name + "'");
        }
        *out = static_cast<mr_learner>(static_cast<int>(*k));
    });
}

mr_status mr_extract_mnemonic(const char* line, const char** token, int* present) {
    return guarded([&] {
        require(line, "line");
        require(token, "token");
        require(present, "present");
        auto m = extract_mnemonic(line);
        g_token = m.value_or("");
        *token = g_token.c_str();
        *present = m ? 1 : 0;
    });
}

mr_status mr_corpus_load_manifest(const char* manifest_path, size_t cap, unsigned threads, mr_corpus** out) {
    return guarded([&] {
        require(manifest_path, "manifest_path");
        require(out, "out");
        auto corpus = std::make_unique<mr_corpus>();
        corpus->traces = load_corpus(manifest_path, cap == 0 ? kDefaultTraceCap : cap, threads);
        *out = corpus.release();
    });
}

mr_status mr_corpus_load(const char* corpus_path, mr_corpus** out) {
    return guarded([&] {
        require(corpus_path, "corpus_path");
        require(out, "out");
        auto corpus = std::make_unique<mr_corpus>();
        corpus->traces = load_saved_corpus(corpus_path);
        *out = corpus.release();
    });
}

mr_status mr_corpus_save(const mr_corpus* corpus, const char* corpus_path) {
    return guarded([&] {
        require(corpus, "corpus");
        require(corpus_path, "corpus_path");
        save_corpus(corpus_path, corpus->traces);
    });
}

mr_status mr_synth_generate(const mr_synth_options* o, const char* out_dir, unsigned threads, mr_corpus** out) {
    return guarded([&] {
        require(o, "synth options");
        SynthSpec spec;
        spec.n_families = o->n_families;
        spec.samples_per_family = o->samples_per_family;
        spec.trace_length = o->trace_length;
        spec.alphabet_size = o->alphabet_size;
        spec.self_loop_bias = o->self_loop_bias;
        spec.noise = o->noise;
        spec.seed = o->seed;
        spec.families_per_type = o->families_per_type;
        spec.paired_self_loops = o->paired_self_loops != 0;
        SynthCorpus corpus = generate(spec, threads);
        if (out_dir != nullptr && *out_dir != '\0') {
            write_corpus(corpus, out_dir);
        }
        if (out != nullptr) {
            auto handle = std::make_unique<mr_corpus>();
            handle->traces = std::move(corpus.traces);
            *out = handle.release();
        }
    });
}

size_t mr_corpus_size(const mr_corpus* corpus) { return corpus ? corpus->traces.size() : 0; }

const char* mr_corpus_sample_id(const mr_corpus* corpus, size_t index) {
    if (corpus == nullptr || index >= corpus->traces.size()) {
        return nullptr;
    }
    return corpus->traces[index].sample_id.c_str();
}

size_t mr_corpus_trace_length(const mr_corpus* corpus, size_t index) {
    if (corpus == nullptr || index >= corpus->traces.size()) {
        return 0;
    }
    return corpus->traces[index].mnemonics.size();
}

int mr_corpus_truncated(const mr_corpus* corpus, size_t index) {
    if (corpus == nullptr || index >= corpus->traces.size()) {
        return 0;
    }
    return corpus->traces[index].truncated ? 1 : 0;
}

void mr_corpus_free(mr_corpus* corpus) { delete corpus; }

mr_status mr_corpus_write_graphs(const mr_corpus* corpus, const mr_rank_options* options, const char* out_dir) {
    return guarded([&] {
        require(corpus, "corpus");
        require(out_dir, "out_dir");
        const RankParams params = rank_params_of(options);
        std::filesystem::create_directories(out_dir);
        for (const auto& t : corpus->traces) {
            auto out = open_output(std::filesystem::path(out_dir) / (t.sample_id + ".edges"));
            write_edge_list(out, build_graph(t, uses_self_loops(params.algorithm)));
        }
    });
}

mr_status mr_rank_corpus(const mr_corpus* corpus, const mr_rank_options* options, const char* cache_dir,
                         unsigned threads, const char* out_path, const char* config_echo) {
    return guarded([&] {
        require(corpus, "corpus");
        require(out_path, "out_path");
        const RankParams params = rank_params_of(options);
        auto cache = make_cache(cache_dir);
        const auto ranks = rank_corpus(corpus->traces, params, threads, cache ? &*cache : nullptr);
        std::ostringstream buffer;
        write_rank_vectors(buffer, corpus->traces, ranks, config_echo ? config_echo : "");
        auto out = open_output(out_path);
        out << buffer.str();
    });
}

mr_status mr_features_build(const mr_corpus* corpus, const mr_rank_options* options, const char* cache_dir,
                            unsigned threads, mr_features** out) {
    return guarded([&] {
        require(corpus, "corpus");
        require(out, "out");
        const RankParams params = rank_params_of(options);
        auto cache = make_cache(cache_dir);
        auto features = std::make_unique<mr_features>();
        features->matrix = featurize_corpus(corpus->traces, params, threads, cache ? &*cache : nullptr);
        *out = features.release();
    });
}

size_t mr_features_rows(const mr_features* f) { return f ? f->matrix.rows.size() : 0; }

size_t mr_features_columns(const mr_features* f) { return f ? f->matrix.vocabulary.size() : 0; }

double mr_features_value(const mr_features* f, size_t row, size_t column) {
    if (f == nullptr || row >= f->matrix.rows.size() || column >= f->matrix.vocabulary.size()) {
        return 0.0;
    }
    return f->matrix.rows[row].values[column];
}

const char* mr_features_token(const mr_features* f, size_t column) {
    if (f == nullptr || column >= f->matrix.vocabulary.size()) {
        return nullptr;
    }
    return f->matrix.vocabulary.tokens[column].c_str();
}

mr_status mr_features_export(const mr_features* f, mr_format format, mr_label label, const char* path,
                             const char* config_echo) {
    return guarded([&] {
        require(f, "features");
        require(path, "path");
        if (format != MR_FORMAT_CSV && format != MR_FORMAT_ARFF) {
            fail(ErrorCode::InvalidArgument, "unknown export format");
        }
        std::ostringstream buffer;
        export_matrix(buffer, f->matrix, format == MR_FORMAT_CSV ? ExportFormat::Csv : ExportFormat::Arff,
                      label_of(label), config_echo ? config_echo : "");
        auto out = open_output(path);
        out << buffer.str();
    });
}

void mr_features_free(mr_features* f) { delete f; }

mr_status mr_evaluate(const mr_features* f, mr_label label, const mr_learner_options* learner, size_t folds,
                      mr_report** out) {
    return guarded([&] {
        require(f, "features");
        require(out, "out");
        const LearnerConfig config = learner_config_of(learner);
        auto report = std::make_unique<mr_report>();
        report->report = cross_validate(LabeledDataset::from_matrix(f->matrix, label_of(label)), config, folds,
                                        config.seed);
        report->report.config.emplace_back("label", std::string(to_string(label_of(label))));
        *out = report.release();
    });
}

mr_status mr_report_write(const mr_report* report, const char* out_dir, const char* config_echo) {
    return guarded([&] {
        require(report, "report");
        require(out_dir, "out_dir");
        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);

        std::ostringstream echo_comments;
        if (config_echo != nullptr) {
            std::istringstream echo{std::string(config_echo)};
            for (std::string line; std::getline(echo, line);) {
                echo_comments << "# " << line << '\n';
            }
        }
        {
            auto out = open_output(dir / "summary.txt");
            out << echo_comments.str();
            write_summary(out, report->report);
        }
        {
            auto out = open_output(dir / "report.txt");
            write_report_text(out, report->report);
            if (config_echo != nullptr) {
                out << "\nRun configuration\n";
                std::istringstream echo{std::string(config_echo)};
                for (std::string line; std::getline(echo, line);) {
                    out << "  " << line << '\n';
                }
            }
        }
        {
            auto out = open_output(dir / "confusion.csv");
            write_confusion_csv(out, report->report);
        }
        if (config_echo != nullptr) {
            auto out = open_output(dir / "confusion.csv.config");
            out << config_echo;
        }
    });
}

mr_status mr_report_load_summary(const char* summary_path, mr_report** out) {
    return guarded([&] {
        require(summary_path, "summary_path");
        require(out, "out");
        std::ifstream in(summary_path);
        if (!in) {
            fail(ErrorCode::Io, std::string("cannot open ") + summary_path);
        }
        auto report = std::make_unique<mr_report>();
        report->report = read_summary(in);
        *out = report.release();
    });
}

const char* mr_report_text(mr_report* report) {
    if (report == nullptr) {
        return "";
    }
    std::ostringstream out;
    write_report_text(out, report->report);
    report->text = out.str();
    return report->text.c_str();
}

double mr_report_weighted_f(const mr_report* report) { return report ? report->report.metrics.weighted_f : 0.0; }

double mr_report_macro_f(const mr_report* report) { return report ? report->report.metrics.macro_f : 0.0; }

uint64_t mr_report_total(const mr_report* report) { return report ? report->report.total() : 0; }

size_t mr_report_class_count(const mr_report* report) { return report ? report->report.class_names.size() : 0; }

uint64_t mr_report_confusion(const mr_report* report, size_t actual, size_t predicted) {
    if (report == nullptr || actual >= report->report.confusion.size() ||
        predicted >= report->report.confusion.size()) {
        return 0;
    }
    return report->report.confusion[actual][predicted];
}

mr_status mr_report_add_config(mr_report* report, const char* key, const char* value) {
    return guarded([&] {
        require(report, "report");
        require(key, "key");
        require(value, "value");
        report->report.config.emplace_back(key, value);
    });
}

void mr_report_free(mr_report* report) { delete report; }

mr_status mr_sweep_d(const mr_corpus* corpus, const mr_rank_options* base, const double* d_values, size_t d_count,
                     const mr_learner_options* learner, size_t folds, const char* cache_dir, unsigned threads,
                     mr_sweep** out) {
    return guarded([&] {
        require(corpus, "corpus");
        require(d_values, "d_values");
        require(out, "out");
        const RankParams params = rank_params_of(base);
        const LearnerConfig config = learner_config_of(learner);
        auto cache = make_cache(cache_dir);
        auto sweep = std::make_unique<mr_sweep>();
        sweep->result = sweep_d(corpus->traces, params, std::span<const double>(d_values, d_count), config, folds,
                                config.seed, threads, cache ? &*cache : nullptr);
        *out = sweep.release();
    });
}

size_t mr_sweep_points(const mr_sweep* sweep) { return sweep ? sweep->result.points.size() : 0; }

mr_status mr_sweep_point(const mr_sweep* sweep, size_t index, double* d, double* f_type, double* f_family) {
    return guarded([&] {
        require(sweep, "sweep");
        if (index >= sweep->result.points.size()) {
            fail(ErrorCode::InvalidArgument, "sweep point index out of range");
        }
        const auto& p = sweep->result.points[index];
        if (d) {
            *d = p.d;
        }
        if (f_type) {
            *f_type = p.weighted_f_type;
        }
        if (f_family) {
            *f_family = p.weighted_f_family;
        }
    });
}

double mr_sweep_trend(const mr_sweep* sweep, mr_label label) {
    if (sweep == nullptr) {
        return 0.0;
    }
    return sweep->result.trend(label == MR_LABEL_TYPE ? LabelTarget::Type : LabelTarget::Family);
}

double mr_sweep_best_d(const mr_sweep* sweep, mr_label label) {
    if (sweep == nullptr || sweep->result.points.empty()) {
        return 0.0;
    }
    return sweep->result.best_d(label == MR_LABEL_TYPE ? LabelTarget::Type : LabelTarget::Family);
}

mr_status mr_sweep_write_csv(const mr_sweep* sweep, const char* path) {
    return guarded([&] {
        require(sweep, "sweep");
        require(path, "path");
        std::ostringstream buffer;
        write_sweep_csv(buffer, sweep->result);
        auto out = open_output(path);
        out << buffer.str();
    });
}

void mr_sweep_free(mr_sweep* sweep) { delete sweep; }

mr_status mr_model_train(const mr_features* f, mr_label label, const mr_learner_options* learner, mr_model** out) {
    return guarded([&] {
        require(f, "features");
        require(out, "out");
        const LearnerConfig config = learner_config_of(learner);
        auto model = std::make_unique<mr_model>();
        model->model = train_meta(LabeledDataset::from_matrix(f->matrix, label_of(label)), config);
        *out = model.release();
    });
}

mr_status mr_model_save(const mr_model* model, const char* path) {
    return guarded([&] {
        require(model, "model");
        require(path, "path");
        std::ostringstream buffer;
        save_model(buffer, model->model);
        auto out = open_output(path);
        out << buffer.str();
    });
}

mr_status mr_model_load(const char* path, mr_model** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        std::ifstream in(path);
        if (!in) {
            fail(ErrorCode::Io, std::string("cannot open ") + path);
        }
        auto model = std::make_unique<mr_model>();
        model->model = load_model(in);
        *out = model.release();
    });
}

size_t mr_model_feature_count(const mr_model* model) { return model ? model->model.feature_count : 0; }

size_t mr_model_member_count(const mr_model* model) { return model ? model->model.members.size() : 0; }

mr_status mr_model_predict(mr_model* model, const double* features, size_t count, const char** label) {
    return guarded([&] {
        require(model, "model");
        require(features, "features");
        require(label, "label");
        model->last_label = predict(model->model, std::span<const double>(features, count)).label;
        *label = model->last_label.c_str();
    });
}

void mr_model_free(mr_model* model) { delete model; }

} // extern "C"
