/*
 * mnemorank C API.
 *
 * Opaque handles own their data and are released with the matching *_free
 * function. Every fallible call returns an mr_status; on failure a one-line
 * description is available from mr_last_error() on the same thread until
 * the next failing call.
 */
#ifndef MNEMORANK_H
#define MNEMORANK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MNEMORANK_BUILDING_LIBRARY)
#    define MR_API __declspec(dllexport)
#  else
#    define MR_API __declspec(dllimport)
#  endif
#else
#  define MR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mr_status {
    MR_OK = 0,
    MR_ERR_INVALID_ARGUMENT = 1,
    MR_ERR_IO = 2,
    MR_ERR_EMPTY_TRACE = 3,
    MR_ERR_MISSING_COLUMN = 4,
    MR_ERR_DUPLICATE_SAMPLE_ID = 5,
    MR_ERR_EMPTY_MANIFEST = 6,
    MR_ERR_UNKNOWN_NODE = 7,
    MR_ERR_EMPTY_GRAPH = 8,
    MR_ERR_SINGULAR_SYSTEM = 9,
    MR_ERR_TOO_LARGE = 10,
    MR_ERR_EMPTY_CORPUS = 11,
    MR_ERR_EMPTY_MATRIX = 12,
    MR_ERR_DEGENERATE_WEIGHTS = 13,
    MR_ERR_SINGLE_CLASS_DATA = 14,
    MR_ERR_DIMENSION_MISMATCH = 15,
    MR_ERR_TOO_FEW_ROWS = 16,
    MR_ERR_NON_SQUARE = 17,
    MR_ERR_INTERNAL = 18
} mr_status;

typedef enum mr_algorithm { MR_ALGO_PR = 0, MR_ALGO_SPR = 1, MR_ALGO_VOL = 2, MR_ALGO_SVOL = 3 } mr_algorithm;
typedef enum mr_learner { MR_LEARNER_RF = 0, MR_LEARNER_BAGGING = 1, MR_LEARNER_ADABOOST = 2, MR_LEARNER_MULTIBOOST = 3 } mr_learner;
typedef enum mr_label { MR_LABEL_TYPE = 0, MR_LABEL_FAMILY = 1 } mr_label;
typedef enum mr_format { MR_FORMAT_CSV = 0, MR_FORMAT_ARFF = 1 } mr_format;

/* Self-loop policy for graph construction. AUTO follows the variant. */
typedef enum mr_self_loops { MR_SELF_LOOPS_AUTO = -1, MR_SELF_LOOPS_OFF = 0, MR_SELF_LOOPS_ON = 1 } mr_self_loops;

typedef struct mr_rank_options {
    mr_algorithm algorithm;
    double d;
    double epsilon;
    size_t max_iters;
    mr_self_loops self_loops;
} mr_rank_options;

typedef struct mr_learner_options {
    mr_learner kind;
    size_t trees_per_forest;
    size_t meta_iterations;
    double bag_percent;
    size_t feature_subset_size; /* 0 = floor(log2 F) + 1 */
    uint64_t seed;
    unsigned threads;
} mr_learner_options;

typedef struct mr_synth_options {
    size_t n_families;
    size_t samples_per_family;
    size_t trace_length;
    size_t alphabet_size;
    double self_loop_bias;
    double noise;
    uint64_t seed;
    size_t families_per_type;
    int paired_self_loops;
} mr_synth_options;

typedef struct mr_corpus mr_corpus;
typedef struct mr_features mr_features;
typedef struct mr_report mr_report;
typedef struct mr_sweep mr_sweep;
typedef struct mr_model mr_model;

MR_API const char* mr_version(void);
MR_API const char* mr_last_error(void);
MR_API const char* mr_status_name(mr_status status);

MR_API void mr_rank_options_init(mr_rank_options* options);
MR_API void mr_learner_options_init(mr_learner_options* options);
MR_API void mr_synth_options_init(mr_synth_options* options);

/* Range and consistency checks without touching any data. */
MR_API mr_status mr_rank_options_validate(const mr_rank_options* options);
MR_API mr_status mr_learner_options_validate(const mr_learner_options* options);

MR_API mr_status mr_parse_algorithm(const char* name, mr_algorithm* out);
MR_API mr_status mr_parse_learner(const char* name, mr_learner* out);

/* Single-line helpers. The returned token stays valid until the next call on
 * the same thread. `*present` is 0 for lines without a mnemonic. */
MR_API mr_status mr_extract_mnemonic(const char* line, const char** token, int* present);

/* Corpora: from a manifest (parsing every trace), from a file written by
 * mr_corpus_save, or freshly generated (and written to out_dir when non-null). */
MR_API mr_status mr_corpus_load_manifest(const char* manifest_path, size_t cap, unsigned threads, mr_corpus** out);
MR_API mr_status mr_corpus_load(const char* corpus_path, mr_corpus** out);
MR_API mr_status mr_corpus_save(const mr_corpus* corpus, const char* corpus_path);
MR_API mr_status mr_synth_generate(const mr_synth_options* options, const char* out_dir, unsigned threads,
                                   mr_corpus** out);
MR_API size_t mr_corpus_size(const mr_corpus* corpus);
MR_API const char* mr_corpus_sample_id(const mr_corpus* corpus, size_t index);
MR_API size_t mr_corpus_trace_length(const mr_corpus* corpus, size_t index);
MR_API int mr_corpus_truncated(const mr_corpus* corpus, size_t index);
MR_API void mr_corpus_free(mr_corpus* corpus);

/* Writes "source target visits" edge lists, one file per sample. */
MR_API mr_status mr_corpus_write_graphs(const mr_corpus* corpus, const mr_rank_options* options, const char* out_dir);

/* Rank vectors for each sample, one line per sample. `cache_dir` (nullable)
 * enables the content-addressed rank cache; `config_echo` (nullable) is
 * written as leading '#' lines. */
MR_API mr_status mr_rank_corpus(const mr_corpus* corpus, const mr_rank_options* options, const char* cache_dir,
                                unsigned threads, const char* out_path, const char* config_echo);

MR_API mr_status mr_features_build(const mr_corpus* corpus, const mr_rank_options* options, const char* cache_dir,
                                   unsigned threads, mr_features** out);
MR_API size_t mr_features_rows(const mr_features* features);
MR_API size_t mr_features_columns(const mr_features* features);
MR_API double mr_features_value(const mr_features* features, size_t row, size_t column);
MR_API const char* mr_features_token(const mr_features* features, size_t column);
MR_API mr_status mr_features_export(const mr_features* features, mr_format format, mr_label label, const char* path,
                                    const char* config_echo);
MR_API void mr_features_free(mr_features* features);

MR_API mr_status mr_evaluate(const mr_features* features, mr_label label, const mr_learner_options* learner,
                             size_t folds, mr_report** out);
/* Writes report.txt, summary.txt and confusion.csv into out_dir. A non-null
 * config_echo is embedded in the first two and stored beside the CSV as
 * confusion.csv.config. */
MR_API mr_status mr_report_write(const mr_report* report, const char* out_dir, const char* config_echo);
MR_API mr_status mr_report_load_summary(const char* summary_path, mr_report** out);
/* Human-readable report, owned by the handle. */
MR_API const char* mr_report_text(mr_report* report);
MR_API double mr_report_weighted_f(const mr_report* report);
MR_API double mr_report_macro_f(const mr_report* report);
MR_API uint64_t mr_report_total(const mr_report* report);
MR_API size_t mr_report_class_count(const mr_report* report);
MR_API uint64_t mr_report_confusion(const mr_report* report, size_t actual, size_t predicted);
/* Appends a key/value pair to the report's configuration echo. */
MR_API mr_status mr_report_add_config(mr_report* report, const char* key, const char* value);
MR_API void mr_report_free(mr_report* report);

MR_API mr_status mr_sweep_d(const mr_corpus* corpus, const mr_rank_options* base, const double* d_values,
                            size_t d_count, const mr_learner_options* learner, size_t folds, const char* cache_dir,
                            unsigned threads, mr_sweep** out);
MR_API size_t mr_sweep_points(const mr_sweep* sweep);
MR_API mr_status mr_sweep_point(const mr_sweep* sweep, size_t index, double* d, double* f_type, double* f_family);
MR_API double mr_sweep_trend(const mr_sweep* sweep, mr_label label);
MR_API double mr_sweep_best_d(const mr_sweep* sweep, mr_label label);
MR_API mr_status mr_sweep_write_csv(const mr_sweep* sweep, const char* path);
MR_API void mr_sweep_free(mr_sweep* sweep);

/* Train on the full feature matrix; models serialize to versioned JSON. */
MR_API mr_status mr_model_train(const mr_features* features, mr_label label, const mr_learner_options* learner,
                                mr_model** out);
MR_API mr_status mr_model_save(const mr_model* model, const char* path);
MR_API mr_status mr_model_load(const char* path, mr_model** out);
MR_API size_t mr_model_feature_count(const mr_model* model);
MR_API size_t mr_model_member_count(const mr_model* model);
/* Label string is owned by the model and valid until the next predict call. */
MR_API mr_status mr_model_predict(mr_model* model, const double* features, size_t count, const char** label);
MR_API void mr_model_free(mr_model* model);

#ifdef __cplusplus
}
#endif

#endif /* MNEMORANK_H */
