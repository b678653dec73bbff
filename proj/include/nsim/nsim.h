/*
 * C interface to the nonlinear single index model (NSIM) regression toolkit.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return an nsim_status; on failure the
 * calling thread's last error (stable code + message) describes the cause.
 * Strings and arrays returned through out-parameters are malloc()ed and must
 * be released with nsim_string_free / nsim_array_free.
 */
#ifndef NSIM_NSIM_H_
#define NSIM_NSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NSIM_API __declspec(dllexport)
#else
#define NSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum nsim_status {
  NSIM_OK = 0,
  NSIM_ERR_USAGE = 1,
  NSIM_ERR_DATA = 2,
  NSIM_ERR_INFEASIBLE = 3,
  NSIM_ERR_INTERNAL = 4
} nsim_status;

typedef enum nsim_partition_kind {
  NSIM_PARTITION_DYADIC = 0,
  NSIM_PARTITION_EQUIBLOCK = 1
} nsim_partition_kind;

typedef enum nsim_curve_kind {
  NSIM_CURVE_LINE = 0,
  NSIM_CURVE_S_CURVE = 1,
  NSIM_CURVE_HELIX = 2
} nsim_curve_kind;

/* Restricting radius: unbounded != 0 means eta = infinity and value is ignored. */
typedef struct nsim_radius {
  int unbounded;
  double value;
} nsim_radius;

typedef struct nsim_dataset nsim_dataset;
typedef struct nsim_model nsim_model;

/* ---- errors and memory ------------------------------------------------- */

NSIM_API const char* nsim_version(void);
/* Message and stable code of the last failure on this thread ("" if none). */
NSIM_API const char* nsim_last_error_message(void);
NSIM_API const char* nsim_last_error_code(void);
NSIM_API void nsim_string_free(char* s);
NSIM_API void nsim_array_free(double* a);

/* ---- datasets ---------------------------------------------------------- */

typedef struct nsim_ingest_options {
  int standardize;  /* z-score features, drop constant columns */
  int log_response; /* replace y by log(y) */
} nsim_ingest_options;

/* features: n*d values, row-major. */
NSIM_API nsim_status nsim_dataset_create(const double* features, const double* responses, size_t n, size_t d,
                                         nsim_dataset** out);
NSIM_API nsim_status nsim_dataset_load_csv(const char* path, const nsim_ingest_options* options,
                                           nsim_dataset** out);
NSIM_API nsim_status nsim_dataset_save_csv(const nsim_dataset* dataset, const char* path);
NSIM_API size_t nsim_dataset_size(const nsim_dataset* dataset);
NSIM_API size_t nsim_dataset_dim(const nsim_dataset* dataset);
/* Copies n*d row-major features / n responses into caller buffers. */
NSIM_API nsim_status nsim_dataset_copy_features(const nsim_dataset* dataset, double* out);
NSIM_API nsim_status nsim_dataset_copy_responses(const nsim_dataset* dataset, double* out);
/* Ingestion warnings (e.g. dropped constant columns). */
NSIM_API size_t nsim_dataset_warning_count(const nsim_dataset* dataset);
NSIM_API const char* nsim_dataset_warning(const nsim_dataset* dataset, size_t i);
NSIM_API void nsim_dataset_free(nsim_dataset* dataset);

/* ---- estimator --------------------------------------------------------- */

typedef struct nsim_fit_options {
  size_t J;
  size_t k;
  nsim_radius eta;
  nsim_partition_kind partition;
  double rank_tol; /* <= 0 selects the default relative threshold */
} nsim_fit_options;

NSIM_API nsim_status nsim_fit(const nsim_dataset* data, const nsim_fit_options* options, nsim_model** out);
/* Tangents from `geometry`; neighbors and responses from `prediction`. */
NSIM_API nsim_status nsim_fit_split(const nsim_dataset* geometry, const nsim_dataset* prediction,
                                    const nsim_fit_options* options, nsim_model** out);

/* Rows are in the raw input space; the model's preprocessing is applied. */
NSIM_API nsim_status nsim_model_predict(const nsim_model* model, const double* rows, size_t n, size_t d,
                                        double* out);
/* Predicts every row of a CSV file with raw_dim or raw_dim + 1 columns. */
NSIM_API nsim_status nsim_model_predict_csv(const nsim_model* model, const char* path, double** out,
                                            size_t* n);

NSIM_API size_t nsim_model_num_level_sets(const nsim_model* model);
NSIM_API size_t nsim_model_dim(const nsim_model* model);
/* Raw input dimension expected by predict (before preprocessing). */
NSIM_API size_t nsim_model_input_dim(const nsim_model* model);
/* J*D row-major unit index vectors. */
NSIM_API nsim_status nsim_model_tangents(const nsim_model* model, double* out);
/* J*J Grammian of the index vectors. */
NSIM_API nsim_status nsim_model_grammian(const nsim_model* model, double* out);

NSIM_API nsim_status nsim_model_to_json(const nsim_model* model, char** json);
NSIM_API nsim_status nsim_model_from_json(const char* json, nsim_model** out);
NSIM_API nsim_status nsim_model_save(const nsim_model* model, const char* path);
NSIM_API nsim_status nsim_model_load(const char* path, nsim_model** out);
NSIM_API void nsim_model_free(nsim_model* model);

/* ---- cross-validation -------------------------------------------------- */

typedef struct nsim_cv_options {
  const size_t* J_grid;
  size_t J_count;
  const size_t* k_grid; /* ignored when k_two_thirds != 0 */
  size_t k_count;
  int k_two_thirds; /* k = ceil(0.5 * n_train^(2/3)) per fold */
  nsim_radius eta;
  size_t folds;
  uint64_t seed;
  nsim_partition_kind partition;
} nsim_cv_options;

/* Writes the cross-validation report as a JSON document. */
NSIM_API nsim_status nsim_cross_validate(const nsim_dataset* data, const nsim_cv_options* options,
                                         char** report_json);

/* ---- synthetic data ---------------------------------------------------- */

typedef struct nsim_synth_options {
  nsim_curve_kind curve;
  size_t ambient_dim;
  double tube_radius;
  double noise_factor;
  size_t n_samples;
  uint64_t seed;
} nsim_synth_options;

NSIM_API nsim_status nsim_synth_generate(const nsim_synth_options* options, nsim_dataset** out,
                                         char** truth_json);

/* ---- experiments ------------------------------------------------------- */

typedef struct nsim_schedule_options {
  nsim_curve_kind curve;
  const size_t* D_values;
  size_t D_count;
  const double* noise_factors;
  size_t noise_count;
  const size_t* n_grid;
  size_t n_count;
  size_t repetitions;
  uint64_t seed;
  double tube_radius;
  nsim_radius eta;
  const size_t* cv_J_grid;
  size_t cv_J_count;
  size_t cv_folds;
  size_t test_points;
} nsim_schedule_options;

/* Fills `out` with a named preset; arrays point to static storage. */
NSIM_API nsim_status nsim_schedule_profile(const char* name, uint64_t seed, nsim_schedule_options* out);
/* Per-run CSV and JSON summary (means, stds, decay slopes). */
NSIM_API nsim_status nsim_run_schedule(const nsim_schedule_options* options, char** records_csv,
                                       char** summary_json);

typedef struct nsim_holdout_options {
  size_t splits;
  double test_fraction;
  size_t folds;
  const size_t* J_grid;
  size_t J_count;
  const size_t* k_grid;
  size_t k_count;
  nsim_radius eta;
  uint64_t seed;
} nsim_holdout_options;

/* Repeated random hold-out splits with cross-validated NSIM (dyadic and
 * equiblock), linear regression and kNN. */
NSIM_API nsim_status nsim_run_holdout(const nsim_dataset* data, const nsim_holdout_options* options,
                                      char** rows_csv, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* NSIM_NSIM_H_ */
