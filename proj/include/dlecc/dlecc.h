/* C interface to the dlecc library.
 *
 * Objects are opaque handles created by dlecc_*_create/from/... functions and
 * released with the matching *_free. Functions return a dlecc_status; on
 * failure dlecc_last_error() describes the problem (per thread, valid until
 * the next failing call on that thread). Strings returned through char**
 * are owned by the caller and released with dlecc_string_free.
 *
 * Received words and codewords are stream-major arrays of 3k doubles.
 * Posterior arrays hold P(U_i = 1 | y).
 */
#ifndef DLECC_H
#define DLECC_H

#include <stddef.h>
#include <stdint.h>

#if defined(DLECC_BUILDING_LIBRARY)
#define DLECC_API __attribute__((visibility("default")))
#else
#define DLECC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dlecc_status {
  DLECC_OK = 0,
  DLECC_INVALID_ARGUMENT = 1,
  DLECC_PARSE = 2,
  DLECC_NUMERICAL = 3,
  DLECC_VERIFICATION = 4,
  DLECC_IO = 5,
  DLECC_INTERNAL = 6
} dlecc_status;

DLECC_API const char* dlecc_last_error(void);
DLECC_API const char* dlecc_status_name(dlecc_status status);
DLECC_API const char* dlecc_version(void);
DLECC_API void dlecc_string_free(char* s);

/* ---------------------------------------------------------------- boolfn */

typedef struct dlecc_table dlecc_table;
typedef struct dlecc_spectrum dlecc_spectrum;

DLECC_API dlecc_status dlecc_table_from_values(int arity, const double* values, size_t count, dlecc_table** out);
DLECC_API dlecc_status dlecc_table_from_json(const char* json, dlecc_table** out);
/* Named fixtures: block1, block2, block3, *_affine*, bent4, majority3. */
DLECC_API dlecc_status dlecc_table_fixture(const char* name, dlecc_table** out);
/* Newline-separated fixture names. */
DLECC_API dlecc_status dlecc_fixture_names(char** out);
DLECC_API dlecc_status dlecc_table_to_json(const dlecc_table* table, char** out);
DLECC_API int dlecc_table_arity(const dlecc_table* table);
DLECC_API void dlecc_table_free(dlecc_table* table);

DLECC_API dlecc_status dlecc_wht_forward(const dlecc_table* table, dlecc_spectrum** out);
DLECC_API dlecc_status dlecc_wht_inverse(const dlecc_spectrum* spectrum, dlecc_table** out);
DLECC_API dlecc_status dlecc_spectrum_from_json(const char* json, dlecc_spectrum** out);
DLECC_API dlecc_status dlecc_spectrum_to_json(const dlecc_spectrum* spectrum, char** out);
/* Copies up to `capacity` coefficients; *count receives 2^arity. */
DLECC_API dlecc_status dlecc_spectrum_coeffs(const dlecc_spectrum* spectrum, double* buffer, size_t capacity,
                                             size_t* count);
/* Energy profile as CSV; *entries receives its row count. */
DLECC_API dlecc_status dlecc_energy_profile_csv(const dlecc_spectrum* spectrum, double threshold, char** csv,
                                                size_t* entries);
DLECC_API void dlecc_spectrum_free(dlecc_spectrum* spectrum);

/* -------------------------------------------------------- goldreich-levin */

typedef struct dlecc_query dlecc_query;
typedef struct dlecc_gl_result dlecc_gl_result;

/* Table variable j reads input coordinate position + j - 1 (position 0-based). */
DLECC_API dlecc_status dlecc_query_from_table(const dlecc_table* table, size_t n, size_t position,
                                              dlecc_query** out);
/* Line-oriented subprocess oracle, see the README. */
DLECC_API dlecc_status dlecc_query_from_process(const char* command, size_t n, dlecc_query** out);
DLECC_API uint64_t dlecc_query_evaluations(const dlecc_query* query);
DLECC_API void dlecc_query_free(dlecc_query* query);

typedef struct dlecc_gl_config {
  double gamma;
  double delta;
  uint64_t queries_per_estimate;
  uint64_t seed;
} dlecc_gl_config;

DLECC_API void dlecc_gl_config_default(dlecc_gl_config* cfg);
DLECC_API dlecc_status dlecc_goldreich_levin(const dlecc_query* query, const dlecc_gl_config* cfg,
                                             dlecc_gl_result** out);
/* Threshold search; *gamma receives the chosen threshold. */
DLECC_API dlecc_status dlecc_gamma_search(const dlecc_query* query, size_t runs_per_gamma, uint64_t queries,
                                          uint64_t seed, double* gamma, dlecc_gl_result** out, char** report_json);
DLECC_API size_t dlecc_gl_result_size(const dlecc_gl_result* result);
/* 1-based variable indices of set i, copied like dlecc_spectrum_coeffs. */
DLECC_API dlecc_status dlecc_gl_result_set(const dlecc_gl_result* result, size_t i, size_t* variables,
                                           size_t capacity, size_t* count, double* weight);
DLECC_API uint64_t dlecc_gl_result_total_queries(const dlecc_gl_result* result);
DLECC_API int dlecc_gl_result_same_sets(const dlecc_gl_result* a, const dlecc_gl_result* b);
DLECC_API dlecc_status dlecc_gl_result_to_json(const dlecc_gl_result* result, char** out);
DLECC_API void dlecc_gl_result_free(dlecc_gl_result* result);

DLECC_API dlecc_status dlecc_gl_sweep_csv(const dlecc_query* query, double gamma, const uint64_t* query_grid,
                                          size_t grid_size, size_t runs, uint64_t seed, char** csv);

/* ----------------------------------------------------------------- codec */

typedef struct dlecc_encoder dlecc_encoder;
typedef struct dlecc_interleaver dlecc_interleaver;

DLECC_API double dlecc_snr_db_to_sigma(double snr_db);

DLECC_API dlecc_status dlecc_encoder_from_tables(const dlecc_table* h1, const dlecc_table* h2,
                                                 const dlecc_table* h3, dlecc_encoder** out);
DLECC_API dlecc_status dlecc_encoder_from_json(const char* json, dlecc_encoder** out);
DLECC_API dlecc_status dlecc_encoder_to_json(const dlecc_encoder* encoder, char** out);
DLECC_API int dlecc_encoder_window(const dlecc_encoder* encoder);
DLECC_API dlecc_status dlecc_encoder_table(const dlecc_encoder* encoder, int stream, dlecc_table** out);
DLECC_API dlecc_status dlecc_analytic_power(const dlecc_encoder* encoder, size_t k, double* power);
DLECC_API dlecc_status dlecc_constrain_power(const dlecc_encoder* encoder, size_t k, dlecc_encoder** out);
DLECC_API void dlecc_encoder_free(dlecc_encoder* encoder);

DLECC_API dlecc_status dlecc_interleaver_from_perm(const size_t* perm, size_t k, dlecc_interleaver** out);
DLECC_API dlecc_status dlecc_interleaver_random(size_t k, uint64_t seed, dlecc_interleaver** out);
DLECC_API dlecc_status dlecc_interleaver_from_json(const char* json, dlecc_interleaver** out);
DLECC_API dlecc_status dlecc_interleaver_to_json(const dlecc_interleaver* interleaver, char** out);
DLECC_API size_t dlecc_interleaver_size(const dlecc_interleaver* interleaver);
DLECC_API void dlecc_interleaver_free(dlecc_interleaver* interleaver);

/* codeword receives 3k values. */
DLECC_API dlecc_status dlecc_encode(const dlecc_encoder* encoder, const dlecc_interleaver* interleaver,
                                    const uint8_t* bits, size_t k, double* codeword);
DLECC_API dlecc_status dlecc_turbo_decode(const dlecc_encoder* encoder, const dlecc_interleaver* interleaver,
                                          const double* received, size_t k, double sigma, int iterations,
                                          double* posteriors);
DLECC_API dlecc_status dlecc_brute_force_map(const dlecc_encoder* encoder, const dlecc_interleaver* interleaver,
                                             const double* received, size_t k, double sigma, double* posteriors);

/* --------------------------------------------------------------- metrics */

DLECC_API dlecc_status dlecc_bce(const uint8_t* truth, const double* posteriors, size_t k, double* out);
DLECC_API dlecc_status dlecc_ber(const uint8_t* truth, const double* posteriors, size_t k, double* out);
/* Closed-form BCE and BER of the one-bit encoder 0 -> symbol0, 1 -> symbol1
 * (0-based input symbols) on a channel given as JSON. */
DLECC_API dlecc_status dlecc_discrete_bce_ber(const char* channel_json, size_t symbol0, size_t symbol1,
                                              double* bce, double* ber);
/* Six-row table on the built-in counterexample channel. *disjoint is 1 when
 * no encoder minimizes both BER and BCE. */
DLECC_API dlecc_status dlecc_counterexample(char** csv, int* disjoint);
DLECC_API dlecc_status dlecc_bounds(size_t points, char** csv, double* max_upper_gap, double* max_lower_gap);

/* ------------------------------------------------------------- landscape */

typedef struct dlecc_theta dlecc_theta;

DLECC_API dlecc_status dlecc_theta_parity(const uint32_t masks[3], dlecc_theta** out);
DLECC_API dlecc_status dlecc_theta_bent(dlecc_theta** out);
/* Same supports as dlecc_theta_bent with the variable pairs regrouped. */
DLECC_API dlecc_status dlecc_theta_bent_partner(dlecc_theta** out);
DLECC_API dlecc_status dlecc_theta_from_json(const char* json, dlecc_theta** out);
DLECC_API dlecc_status dlecc_theta_to_json(const dlecc_theta* theta, char** out);
DLECC_API void dlecc_theta_free(dlecc_theta* theta);

typedef struct dlecc_loss_options {
  size_t k;
  double snr_db;
  size_t blocks;
  int iterations;
  uint64_t seed;
  unsigned threads;
} dlecc_loss_options;

DLECC_API void dlecc_loss_options_default(dlecc_loss_options* options);

/* Loss along the mixed line; the three output arrays (each `count` long) may
 * be NULL. csv may be NULL. Degenerate points have NaN loss. */
DLECC_API dlecc_status dlecc_line_probe(const dlecc_theta* a, const dlecc_theta* b, const double* lambdas,
                                        size_t count, const dlecc_loss_options* options, double* losses,
                                        double* std_errors, int* degenerate, char** csv);

/* ----------------------------------------------------------------- train */

typedef enum dlecc_init { DLECC_INIT_NORMAL = 0, DLECC_INIT_PARITY = 1 } dlecc_init;

typedef struct dlecc_train_config {
  size_t k_enc;
  int window;
  size_t steps;
  size_t batch_size;
  double learning_rate;
  double snr_db;
  uint64_t seed;
  dlecc_init init;
  size_t snapshot_every;
  unsigned threads;
} dlecc_train_config;

typedef struct dlecc_train_result dlecc_train_result;

DLECC_API void dlecc_train_config_default(dlecc_train_config* cfg);
/* Returns DLECC_OK even when the run stopped early; check
 * dlecc_train_result_aborted. */
DLECC_API dlecc_status dlecc_train_encoder(const dlecc_train_config* cfg, dlecc_train_result** out);
DLECC_API dlecc_status dlecc_train_result_encoder(const dlecc_train_result* result, dlecc_encoder** out);
DLECC_API dlecc_status dlecc_train_result_fc_csv(const dlecc_train_result* result, char** csv);
DLECC_API dlecc_status dlecc_train_result_curve_csv(const dlecc_train_result* result, char** csv);
/* NULL when the run completed. */
DLECC_API const char* dlecc_train_result_aborted(const dlecc_train_result* result);
DLECC_API void dlecc_train_result_free(dlecc_train_result* result);

DLECC_API dlecc_status dlecc_conditional_entropy(const dlecc_encoder* encoder, size_t k, double snr_db,
                                                 size_t samples, uint64_t seed, unsigned threads, double* mean,
                                                 double* std_error);

typedef struct dlecc_eval_options {
  size_t k_eval;
  size_t blocks;
  int iterations;
  uint64_t seed;
  unsigned threads;
} dlecc_eval_options;

DLECC_API void dlecc_eval_options_default(dlecc_eval_options* options);
/* BER/BCE table over the SNR grid. reprojected may be NULL. */
DLECC_API dlecc_status dlecc_evaluate(const dlecc_encoder* encoder, const double* snr_grid, size_t count,
                                      const dlecc_eval_options* options, char** csv, dlecc_encoder** reprojected);

#ifdef __cplusplus
}
#endif

#endif /* DLECC_H */
