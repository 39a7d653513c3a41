#ifndef GROOMSIM_GROOMSIM_H
#define GROOMSIM_GROOMSIM_H

/*
 * C interface to the groomsim library: evolution of social grooming
 * strategies (s, q) under a grooming / cooperation game, parameter sweeps and
 * post-hoc analysis.
 *
 * Conventions
 *   - Every fallible call returns a gs_status. On failure a description is
 *     available from gs_last_error() on the calling thread until the next
 *     failing call on that thread.
 *   - Objects are opaque handles created by the library and released with the
 *     matching *_free function. Passing NULL to a *_free function is a no-op.
 *   - metadata_json arguments are JSON objects written at the head of every
 *     emitted file; NULL means an empty object.
 *   - Strings returned through char** are released with gs_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GS_API __declspec(dllexport)
#else
#define GS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gs_status {
  GS_OK = 0,
  GS_ERR_INVALID_ARGUMENT = 1, /* bad parameter, malformed spec or config */
  GS_ERR_DOMAIN = 2,           /* input outside an operation's domain */
  GS_ERR_IO = 3,               /* reading or writing files failed */
  GS_ERR_INTERNAL = 4
} gs_status;

typedef enum gs_kernel_scope {
  GS_KERNEL_ALL_GROOMEES = 0,     /* kernel normalized over all M groomees */
  GS_KERNEL_EXISTING_PARTNERS = 1 /* kernel normalized over partners with w > 0 */
} gs_kernel_scope;

typedef struct gs_environment {
  uint32_t n_groomers;    /* N */
  uint32_t n_groomees;    /* M */
  uint32_t r_c;           /* cooperation slots per groomee */
  uint32_t r_g;           /* grooming actions per groomer per generation */
  uint32_t t_generations; /* T */
  int32_t kernel_scope;   /* gs_kernel_scope */
} gs_environment;

typedef struct gs_generation_record {
  uint32_t generation;
  double mean_s, median_s, var_s;
  double mean_q, median_q, var_q;
  uint64_t total_fitness;
  uint32_t max_fitness;
} gs_generation_record;

typedef struct gs_trend_thresholds {
  double s_high;  /* median s >= s_high -> trend 1 */
  double s_low;   /* median s <  s_low  -> trend 4 */
  double q_split; /* otherwise q >= q_split -> trend 2, else trend 3 */
} gs_trend_thresholds;

typedef struct gs_range {
  double low, high, step;
} gs_range;

typedef struct gs_gradient_cell {
  double s, q;   /* lattice point */
  double ds, dq; /* mean one-generation change of mean s and mean q */
  uint32_t replicates;
} gs_gradient_cell;

typedef struct gs_strength_summary {
  uint64_t n_relationships;
  uint32_t max_w;
  double median_w;
  double powerlaw_slope;
  double powerlaw_r2;
} gs_strength_summary;

typedef struct gs_result gs_result;
typedef struct gs_gradient_field gs_gradient_field;
typedef struct gs_orbit gs_orbit;

/* ---- library ---------------------------------------------------------- */

GS_API const char* gs_version(void);
GS_API const char* gs_last_error(void);
GS_API void gs_string_free(char* s);

/* N = 100, M = 1, R_c = 1, R_g = 300, T = 200, all-groomee kernel. */
GS_API void gs_environment_defaults(gs_environment* env);
GS_API gs_status gs_environment_validate(const gs_environment* env);

/* ---- single simulation ----------------------------------------------- */

/* Deterministic in (env, seed). capture_event_log != 0 records the final
 * generation's partner-selection tallies for strategy profiles. */
GS_API gs_status gs_simulate(const gs_environment* env, uint64_t seed, int capture_event_log,
                             gs_result** out);
/* Loads a result.json written by gs_result_write. */
GS_API gs_status gs_result_load(const char* path, gs_result** out);
GS_API void gs_result_free(gs_result* result);

GS_API gs_status gs_result_environment(const gs_result* result, gs_environment* out);
GS_API uint64_t gs_result_seed(const gs_result* result);
GS_API size_t gs_result_record_count(const gs_result* result);
GS_API gs_status gs_result_record(const gs_result* result, size_t index, gs_generation_record* out);
GS_API size_t gs_result_population_size(const gs_result* result);
GS_API gs_status gs_result_member(const gs_result* result, size_t index, double* s, double* q);
GS_API gs_status gs_result_final_medians(const gs_result* result, double* median_s,
                                         double* median_q);
/* Entry (i, j) of the final generation's relationship matrix. */
GS_API gs_status gs_result_final_w(const gs_result* result, size_t i, size_t j, uint32_t* out);
GS_API int gs_result_has_event_log(const gs_result* result);

/* Writes <out_dir>/result.json and <out_dir>/records.jsonl. */
GS_API gs_status gs_result_write(const gs_result* result, const char* out_dir,
                                 const char* metadata_json);
GS_API gs_status gs_result_to_json(const gs_result* result, const char* metadata_json,
                                   char** out_json);

/* ---- trend classification -------------------------------------------- */

GS_API void gs_trend_thresholds_defaults(gs_trend_thresholds* thresholds);
/* *trend receives 1..4. thresholds may be NULL for the defaults (2, 0, 0.5). */
GS_API gs_status gs_classify_trend(double median_s, double median_q,
                                   const gs_trend_thresholds* thresholds, int* trend);

/* ---- sweeps ----------------------------------------------------------- */

GS_API uint64_t gs_derive_seed(uint64_t base_seed, uint32_t r_c, uint32_t m, uint32_t r_g,
                               uint32_t replicate);
/* Runs (or resumes) the sweep described by spec_json into out_dir.
 * max_new_runs > 0 stops after that many new simulations; *complete is set
 * to 1 once every job of the grid has finished and results.csv exists.
 * complete and total_finished may be NULL. */
GS_API gs_status gs_sweep_run(const char* spec_json, const char* out_dir,
                              const char* metadata_json, unsigned parallelism,
                              uint64_t max_new_runs, const gs_trend_thresholds* thresholds,
                              int* complete, uint64_t* total_finished);

/* ---- selection gradients and orbits ----------------------------------- */

/* sample_sigma is the spread of sampled s and q around the point (0.2 by
 * convention; 0 gives clone populations). */
GS_API gs_status gs_agos_cell(const gs_environment* env, double s, double q, uint32_t replicates,
                              double sample_sigma, uint64_t seed, gs_gradient_cell* out);
GS_API gs_status gs_agos_grid(const gs_environment* env, const gs_range* s_range,
                              const gs_range* q_range, uint32_t replicates, double sample_sigma,
                              uint64_t seed, unsigned parallelism, gs_gradient_field** out);
GS_API size_t gs_gradient_field_size(const gs_gradient_field* field);
GS_API gs_status gs_gradient_field_cell(const gs_gradient_field* field, size_t index,
                                        gs_gradient_cell* out);
GS_API gs_status gs_gradient_field_write_csv(const gs_gradient_field* field, const char* path,
                                             const char* metadata_json);
GS_API void gs_gradient_field_free(gs_gradient_field* field);

GS_API gs_status gs_orbit_integrate(const gs_environment* env, double s0, double q0,
                                    uint32_t steps, double noise_sigma,
                                    uint32_t replicates_per_step, uint64_t seed, gs_orbit** out);
GS_API size_t gs_orbit_size(const gs_orbit* orbit);
GS_API gs_status gs_orbit_point(const gs_orbit* orbit, size_t index, double* s, double* q);
GS_API gs_status gs_orbit_write_csv(const gs_orbit* orbit, const char* path,
                                    const char* metadata_json);
GS_API void gs_orbit_free(gs_orbit* orbit);

/* ---- analysis --------------------------------------------------------- */

GS_API gs_status gs_strength_summary_of(const gs_result* result, gs_strength_summary* out);
/* Writes trend.csv, strength_histogram.csv, strength_ccdf.csv,
 * strength_fit.json and, when the result carries an event log, profile.csv. */
GS_API gs_status gs_analyze_result(const gs_result* result, const char* out_dir,
                                   const char* metadata_json,
                                   const gs_trend_thresholds* thresholds);
/* Reads a sweep results.csv and writes trend_frequencies.csv and
 * transition.csv (for r_g) into out_dir. */
GS_API gs_status gs_analyze_sweep(const char* results_csv, uint32_t r_g, const char* out_dir,
                                  const char* metadata_json);

#ifdef __cplusplus
}
#endif

#endif /* GROOMSIM_GROOMSIM_H */
