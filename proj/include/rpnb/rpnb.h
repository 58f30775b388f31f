/*
 * rpnb — streaming random-projection naive Bayes ensemble, C API.
 *
 * Conventions:
 *   - Every function returns a status code; RPNB_OK is 0. On failure,
 *     rpnb_last_error() returns a thread-local description of what went
 *     wrong, valid until the next failing call on the same thread.
 *   - Objects are opaque handles released with their matching _free call.
 *   - Strings produced by the library (reports, snapshots) are heap
 *     allocations released with rpnb_string_free().
 *   - Structured inputs and outputs (model specs, experiment configs,
 *     reports, comparisons) are JSON text.
 */

#ifndef RPNB_RPNB_H
#define RPNB_RPNB_H

#include <stdint.h>

#if defined(_WIN32)
#define RPNB_API __declspec(dllexport)
#else
#define RPNB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rpnb_status {
  RPNB_OK = 0,
  RPNB_E_INVALID_ARGUMENT = 1,
  RPNB_E_DIMENSION = 2,
  RPNB_E_CLASS = 3,
  RPNB_E_BATCH = 4,
  RPNB_E_DATASET = 5,
  RPNB_E_PARSE = 6,
  RPNB_E_IO = 7,
  RPNB_E_INSUFFICIENT_DATA = 8,
  RPNB_E_STATE = 9,
  RPNB_E_INTERNAL = 99
} rpnb_status;

typedef struct rpnb_dataset rpnb_dataset; /* dense labeled instances */
typedef struct rpnb_model rpnb_model;     /* an online learner */

RPNB_API const char* rpnb_version(void);

/* Message for the most recent failure on this thread ("" if none). */
RPNB_API const char* rpnb_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

/* CSV with the last column as label; has_header skips one leading row. */
RPNB_API rpnb_status rpnb_dataset_load_csv(const char* path, int has_header, rpnb_dataset** out);

/* As above, treating the first row as a header when any feature cell of it
 * fails numeric parsing. */
RPNB_API rpnb_status rpnb_dataset_load_csv_auto(const char* path, rpnb_dataset** out);

/* Built-in synthetic Gaussian mixture (1000 x 1000, 3 classes). */
RPNB_API rpnb_status rpnb_dataset_generate_gm(uint64_t seed, rpnb_dataset** out);

RPNB_API rpnb_status rpnb_dataset_save_csv(const rpnb_dataset* dataset, const char* path);

/* Any output pointer may be NULL. */
RPNB_API rpnb_status rpnb_dataset_info(const rpnb_dataset* dataset, uint64_t* n_rows,
                                       uint64_t* n_features, uint32_t* n_classes);

RPNB_API void rpnb_dataset_free(rpnb_dataset* dataset);

/* ---- models ------------------------------------------------------------ */

/*
 * spec_json selects and configures the learner:
 *   {"learner":"rpnb", "k":200, "q":..., "scheme":"gaussian|bernoulli|achlioptas",
 *    "combiner":"sum|vote", "mode":"1b1|minibatch", "batch_size":...,
 *    "seed":..., "mu0":..., "sigma2_0":..., "prior_mode":"uniform|empirical",
 *    "variance_floor":...}
 *   {"learner":"perceptron"} | {"learner":"pa"} | {"learner":"ogd","eta0":...}
 * Omitted keys take defaults; rpnb's q defaults to the down-space heuristic
 * applied to n_features.
 */
RPNB_API rpnb_status rpnb_model_create(const char* spec_json, uint64_t n_features,
                                       uint32_t n_classes, rpnb_model** out);

/* Pure scoring; scores_out (length n_classes) may be NULL. */
RPNB_API rpnb_status rpnb_model_predict(const rpnb_model* model, const double* x,
                                        uint64_t n_features, int32_t* label_out,
                                        double* scores_out);

/* Test-then-train on one observation; the returned prediction is made before
 * the label is consumed. predicted_out may be NULL. */
RPNB_API rpnb_status rpnb_model_learn_one(rpnb_model* model, const double* x, uint64_t n_features,
                                          int32_t label, int32_t* predicted_out);

/* Test-then-train on a row-major chunk (rpnb minibatch models only).
 * predicted_out (length n_rows) may be NULL. */
RPNB_API rpnb_status rpnb_model_learn_batch(rpnb_model* model, const double* x, uint64_t n_rows,
                                            uint64_t n_features, const int32_t* labels,
                                            int32_t* predicted_out);

/* Either output may be NULL. */
RPNB_API rpnb_status rpnb_model_counts(const rpnb_model* model, uint64_t* update_count,
                                       uint64_t* seen_count);

/* JSON snapshot; rpnb models only. Projection matrices are regenerated from
 * the seed on load, so snapshots stay compact. */
RPNB_API rpnb_status rpnb_model_save_json(const rpnb_model* model, char** json_out);
RPNB_API rpnb_status rpnb_model_load_json(const char* json, rpnb_model** out);

RPNB_API void rpnb_model_free(rpnb_model* model);

/* ---- experiments ------------------------------------------------------- */

/*
 * config_json is the flat experiment config:
 *   {"dataset": "path.csv" | "gm" | [...], "learner": "rpnb" | [...],
 *    "perms":10, "seed":0, "k":200, "scheme":"gaussian", "combiner":"sum",
 *    "mode":"1b1", "batch_size":1, "eta0":1.0}
 * The report is deterministic in the config: no timestamps, stable key and
 * row ordering.
 */
RPNB_API rpnb_status rpnb_experiment_run(const char* config_json, char** report_json_out);

/* Long-format CSV rendering of a JSON report (one line per permutation). */
RPNB_API rpnb_status rpnb_report_to_csv(const char* report_json, char** csv_out);

/*
 * Wilcoxon signed-rank comparison of two learners across the datasets of two
 * reports. report_b_json may be NULL to compare two learners inside
 * report_a_json; learner_a/learner_b may be NULL when the respective report
 * contains exactly one learner.
 */
RPNB_API rpnb_status rpnb_compare_reports(const char* report_a_json, const char* report_b_json,
                                          const char* learner_a, const char* learner_b,
                                          double alpha, char** result_json_out);

RPNB_API void rpnb_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RPNB_RPNB_H */
