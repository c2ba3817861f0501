#ifndef QPDE_H
#define QPDE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum QpdeStatus {
  QPDE_STATUS_OK = 0,
  QPDE_STATUS_NULL_POINTER = 1,
  QPDE_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Rejected configuration or malformed input text.
   */
  QPDE_STATUS_CONFIG = 3,
  /**
   * Singular system, non-finite objective or similar.
   */
  QPDE_STATUS_NUMERICAL = 4,
  /**
   * Too many binary variables to enumerate or simulate.
   */
  QPDE_STATUS_CAPACITY = 5,
  QPDE_STATUS_IO = 6,
  QPDE_STATUS_PANIC = 7,
} QpdeStatus;

typedef enum QpdeSolverMode {
  QPDE_SOLVER_MODE_CLASSICAL = 0,
  QPDE_SOLVER_MODE_QAOA = 1,
  QPDE_SOLVER_MODE_BRUTE_FORCE = 2,
} QpdeSolverMode;

/**
 * Which temperature field of a run to read.
 */
typedef enum QpdeField {
  /**
   * Field produced by the configured solver.
   */
  QPDE_FIELD_SOLVER = 0,
  QPDE_FIELD_CLASSICAL = 1,
} QpdeField;

/**
 * Run configuration.
 */
typedef struct QpdeConfig QpdeConfig;

/**
 * Binarized least-squares objective.
 */
typedef struct QpdeQubo QpdeQubo;

/**
 * Finished run: both fields and the comparison report.
 */
typedef struct QpdeRun QpdeRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qpde_version(void);

/**
 * Message of the last failed call on this thread, or NULL after a
 * successful call. Valid until the next call into this library on the same
 * thread.
 */
const char *qpde_last_error_message(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void qpde_string_free(char *s);

/**
 * Default configuration: 5×5 channel, 5 integer bits, brute-force route.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum QpdeStatus qpde_config_default(struct QpdeConfig **out);

/**
 * Parses and validates a JSON configuration; omitted keys take defaults.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` valid for a pointer write.
 */
enum QpdeStatus qpde_config_from_json(const char *json, struct QpdeConfig **out);

/**
 * # Safety
 * `config` must be a live configuration handle.
 */
enum QpdeStatus qpde_config_set_mode(struct QpdeConfig *config, enum QpdeSolverMode mode);

/**
 * # Safety
 * `config` must be a live configuration handle.
 */
enum QpdeStatus qpde_config_set_seed(struct QpdeConfig *config, uint64_t seed);

/**
 * Releases a configuration. NULL is ignored.
 *
 * # Safety
 * `config` must come from this library and not be freed twice.
 */
void qpde_config_free(struct QpdeConfig *config);

/**
 * Marches the configured problem and compares it with the classical field.
 *
 * # Safety
 * `config` must be a live configuration handle; `out` valid for a pointer
 * write.
 */
enum QpdeStatus qpde_run(const struct QpdeConfig *config, struct QpdeRun **out);

/**
 * Mesh size of a run: `x_nodes` columns of `y_nodes` values.
 *
 * # Safety
 * `run` must be a live run handle; outputs valid for writes.
 */
enum QpdeStatus qpde_run_dims(const struct QpdeRun *run, uintptr_t *x_nodes, uintptr_t *y_nodes);

/**
 * Copies a field into `buffer`, x-major: `buffer[i * y_nodes + j]` is the
 * temperature at column `i`, node `j`. `len` must equal
 * `x_nodes * y_nodes`.
 *
 * # Safety
 * `run` must be a live run handle; `buffer` valid for `len` writes.
 */
enum QpdeStatus qpde_run_field(const struct QpdeRun *run,
                               enum QpdeField which,
                               double *buffer,
                               uintptr_t len);

/**
 * Largest `|solver − classical|` over the whole field.
 *
 * # Safety
 * `run` must be a live run handle; `out` valid for a write.
 */
enum QpdeStatus qpde_run_max_deviation(const struct QpdeRun *run, double *out);

/**
 * Releases a run. NULL is ignored.
 *
 * # Safety
 * `run` must come from this library and not be freed twice.
 */
void qpde_run_free(struct QpdeRun *run);

/**
 * Binarizes `‖A·s − b‖²` with `s_i = Σ_r 2^exponents[r] q_{i,r}`.
 *
 * `a` is row-major `n × n`, `b` has `n` entries, `exponents` has `r`
 * strictly increasing entries.
 *
 * # Safety
 * Arrays must be valid for the stated lengths; `out` valid for a pointer
 * write.
 */
enum QpdeStatus qpde_qubo_encode(const double *a,
                                 const double *b,
                                 uintptr_t n,
                                 const int32_t *exponents,
                                 uintptr_t r,
                                 struct QpdeQubo **out);

/**
 * Builds a QUBO from its text form (`n offset` header, `i i c` and
 * `i j c` lines).
 *
 * # Safety
 * `text` must be NUL-terminated; `out` valid for a pointer write.
 */
enum QpdeStatus qpde_qubo_from_text(const char *text, struct QpdeQubo **out);

/**
 * # Safety
 * `qubo` must be a live handle; `out` valid for a write.
 */
enum QpdeStatus qpde_qubo_num_vars(const struct QpdeQubo *qubo, uintptr_t *out);

/**
 * Energy of one assignment; `bits` holds `len == num_vars` bytes of 0 or 1.
 *
 * # Safety
 * `qubo` must be a live handle; `bits` valid for `len` reads; `out` valid
 * for a write.
 */
enum QpdeStatus qpde_qubo_energy(const struct QpdeQubo *qubo,
                                 const uint8_t *bits,
                                 uintptr_t len,
                                 double *out);

/**
 * Exhaustive minimum. Writes the lowest-index minimizing assignment into
 * `bits` (`len == num_vars` bytes) and its energy into `energy`.
 *
 * # Safety
 * `qubo` must be a live handle; `bits` valid for `len` writes; `energy`
 * valid for a write.
 */
enum QpdeStatus qpde_qubo_ground_state(const struct QpdeQubo *qubo,
                                       uint8_t *bits,
                                       uintptr_t len,
                                       double *energy);

/**
 * Text form of the QUBO; release with [`qpde_string_free`].
 *
 * # Safety
 * `qubo` must be a live handle; `out` valid for a pointer write.
 */
enum QpdeStatus qpde_qubo_to_text(const struct QpdeQubo *qubo, char **out);

/**
 * Releases a QUBO. NULL is ignored.
 *
 * # Safety
 * `qubo` must come from this library and not be freed twice.
 */
void qpde_qubo_free(struct QpdeQubo *qubo);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QPDE_H */
