#ifndef LRSM_LRSM_H
#define LRSM_LRSM_H

/* C interface to the low-rank-plus-sparse estimation library.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Functions return an lrsm_status; on failure lrsm_last_error() gives a
 * message for the calling thread. Matrices are passed row-major. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LRSM_EXPORT __declspec(dllexport)
#define LRSM_IMPORT __declspec(dllimport)
#else
#define LRSM_EXPORT __attribute__((visibility("default")))
#define LRSM_IMPORT
#endif

#ifdef LRSM_BUILDING_LIBRARY
#define LRSM_API LRSM_EXPORT
#else
#define LRSM_API LRSM_IMPORT
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrsm_status {
  LRSM_OK = 0,
  LRSM_ERR_ARGUMENT = 1,
  LRSM_ERR_NUMERIC = 2,
  LRSM_ERR_STRUCTURE = 3,
  LRSM_ERR_IO = 4,
  LRSM_ERR_INTERNAL = 5
} lrsm_status;

typedef struct lrsm_matrix lrsm_matrix;
typedef struct lrsm_sparse lrsm_sparse;
typedef struct lrsm_lowrank lrsm_lowrank;
typedef struct lrsm_report lrsm_report;
typedef struct lrsm_trajectory lrsm_trajectory;

typedef enum lrsm_projection { LRSM_PROJECT_GLOBAL = 0, LRSM_PROJECT_ROWWISE = 1 } lrsm_projection;

LRSM_API const char* lrsm_last_error(void);
LRSM_API const char* lrsm_status_name(lrsm_status status);
LRSM_API const char* lrsm_version(void);

/* Strings returned through char** outputs are released with this. */
LRSM_API void lrsm_string_free(char* s);

/* Dense matrices. */
LRSM_API lrsm_status lrsm_matrix_create(size_t rows, size_t cols, const double* data, lrsm_matrix** out);
LRSM_API lrsm_status lrsm_matrix_load_csv(const char* path, lrsm_matrix** out);
LRSM_API lrsm_status lrsm_matrix_save_csv(const lrsm_matrix* m, const char* path);
LRSM_API size_t lrsm_matrix_rows(const lrsm_matrix* m);
LRSM_API size_t lrsm_matrix_cols(const lrsm_matrix* m);
/* Copies rows*cols values row-major into buffer (capacity in doubles). */
LRSM_API lrsm_status lrsm_matrix_copy_data(const lrsm_matrix* m, double* buffer, size_t capacity);
LRSM_API void lrsm_matrix_free(lrsm_matrix* m);

/* Sparse components. */
LRSM_API size_t lrsm_sparse_nnz(const lrsm_sparse* s);
LRSM_API lrsm_status lrsm_sparse_entry(const lrsm_sparse* s, size_t k, size_t* row, size_t* col, double* value);
LRSM_API lrsm_status lrsm_sparse_save_csv(const lrsm_sparse* s, const char* path);
LRSM_API void lrsm_sparse_free(lrsm_sparse* s);

/* Factored low-rank components. */
LRSM_API size_t lrsm_lowrank_rank(const lrsm_lowrank* l);
LRSM_API lrsm_status lrsm_lowrank_sigma(const lrsm_lowrank* l, double* buffer, size_t capacity);
LRSM_API lrsm_status lrsm_lowrank_to_dense(const lrsm_lowrank* l, lrsm_matrix** out);
LRSM_API void lrsm_lowrank_free(lrsm_lowrank* l);

/* Solver reports serialize to JSON. */
LRSM_API lrsm_status lrsm_report_to_json(const lrsm_report* r, char** out_json);
LRSM_API void lrsm_report_free(lrsm_report* r);

/* Y = L + S + W. config_json carries the solver fields (rank_bound and
 * sparsity_bound required). Any output pointer may be NULL. */
LRSM_API lrsm_status lrsm_solve(const lrsm_matrix* y, const char* config_json, lrsm_lowrank** low_rank,
                                lrsm_sparse** sparse, lrsm_report** report);

/* Markov chains. init_state < 0 starts from the stationary distribution. */
LRSM_API lrsm_status lrsm_markov_simulate(const lrsm_matrix* transition, size_t n, int64_t init_state,
                                          uint64_t seed, lrsm_trajectory** out);
LRSM_API lrsm_status lrsm_trajectory_create(const int64_t* states, size_t length, lrsm_trajectory** out);
LRSM_API lrsm_status lrsm_trajectory_load(const char* path, lrsm_trajectory** out);
LRSM_API lrsm_status lrsm_trajectory_save(const lrsm_trajectory* t, const char* path);
LRSM_API size_t lrsm_trajectory_length(const lrsm_trajectory* t);
LRSM_API lrsm_status lrsm_trajectory_states(const lrsm_trajectory* t, int64_t* buffer, size_t capacity);
LRSM_API void lrsm_trajectory_free(lrsm_trajectory* t);

LRSM_API lrsm_status lrsm_markov_estimate(const lrsm_trajectory* t, size_t states, const char* config_json,
                                          lrsm_projection mode, lrsm_matrix** frequency,
                                          lrsm_matrix** transition, lrsm_report** report);
LRSM_API lrsm_status lrsm_markov_stationary(const lrsm_matrix* transition, lrsm_matrix** out);
LRSM_API lrsm_status lrsm_markov_mixing_time(const lrsm_matrix* transition, double eps, size_t* out);

/* Experiment sweep; writes the CSV named by output_path in spec_json (or
 * out_path when non-NULL) and returns the row count. jobs = 0 uses all
 * hardware threads. */
LRSM_API lrsm_status lrsm_experiment_run(const char* name, const char* spec_json, const char* out_path,
                                         unsigned jobs, size_t* rows);

/* Runs "lemma" (lemma_check) or "certificate" and returns a JSON summary
 * of the verdicts. spec_json may be NULL for defaults. */
LRSM_API lrsm_status lrsm_check_run(const char* which, const char* spec_json, const char* out_path,
                                    unsigned jobs, char** summary_json);

/* Structured covariance; tau <= 0 selects sqrt(n). */
LRSM_API lrsm_status lrsm_covariance(const lrsm_matrix* data, const char* config_json, double tau1,
                                     double tau2, lrsm_matrix** pilot, lrsm_lowrank** low_rank,
                                     lrsm_sparse** sparse, lrsm_report** report);

LRSM_API lrsm_status lrsm_multitask(const lrsm_matrix* x, const lrsm_matrix* y, const char* config_json,
                                    lrsm_lowrank** low_rank, lrsm_sparse** sparse, lrsm_report** report);

#ifdef __cplusplus
}
#endif

#endif
