#ifndef QDISCORD_H
#define QDISCORD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QdStatus {
  QD_STATUS_OK = 0,
  QD_STATUS_NULL_POINTER = 1,
  QD_STATUS_PARSE = 2,
  QD_STATUS_INVALID = 3,
  QD_STATUS_NUMERICAL = 4,
  QD_STATUS_PANIC = 5,
} QdStatus;

typedef enum QdSide {
  QD_SIDE_A = 0,
  QD_SIDE_B = 1,
} QdSide;

// Opaque bipartite density matrix.
typedef struct QdState QdState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *qd_last_error(void);

// Library version as a static NUL-terminated string.
const char *qd_version(void);

// Parses a state in the JSON file format (`dims` plus `matrix` or `amplitudes`).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum QdStatus qd_state_from_json(const char *json, struct QdState **out);

// Builds a state from `(dim_a*dim_b)^2` complex entries, row-major, stored as
// interleaved (re, im) doubles.
//
// # Safety
// `entries` must point to `2*(dim_a*dim_b)^2` readable doubles; `out` must be writable.
enum QdStatus qd_state_from_matrix(const double *entries,
                                   size_t dim_a,
                                   size_t dim_b,
                                   struct QdState **out);

// Releases a handle; NULL is ignored.
//
// # Safety
// `state` must come from a `qd_state_from_*` call and not be freed twice.
void qd_state_free(struct QdState *state);

// # Safety
// `state` must be a live handle; `dim_a` and `dim_b` must be writable.
enum QdStatus qd_state_dims(const struct QdState *state, size_t *dim_a, size_t *dim_b);

// Von Neumann entropy of the whole state, in bits.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum QdStatus qd_entropy(const struct QdState *state, double *out);

// # Safety
// `state` must be a live handle; `out` must be writable.
enum QdStatus qd_mutual_information(const struct QdState *state, double *out);

// One-sided discord with a qubit measured on `side`, plus the optimal Bloch
// angles. `theta` and `phi` may be NULL.
//
// # Safety
// `state` must be a live handle; `value` must be writable.
enum QdStatus qd_discord(const struct QdState *state,
                         enum QdSide side,
                         double grid_deg,
                         double *value,
                         double *theta,
                         double *phi);

// Symmetric two-way discord (smaller of the two one-sided values).
//
// # Safety
// `state` must be a live handle; `value` must be writable.
enum QdStatus qd_discord_sym(const struct QdState *state, double grid_deg, double *value);

// # Safety
// `state` must be a live handle; `out` must be writable.
enum QdStatus qd_is_zero_discord(const struct QdState *state,
                                 enum QdSide side,
                                 double tol,
                                 bool *out);

// Positive-partial-transpose test; conclusive only up to total dimension 6.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum QdStatus qd_is_ppt(const struct QdState *state, bool *out);

// Runs a command-line invocation in process, e.g. `{"gate-check", "--mode",
// "lemma2", "--input", "table1:a", "--input", "table1:c"}` (no program name).
// On success `*out_json` receives the JSON envelope, to be released with
// `qd_string_free`.
//
// # Safety
// `argv` must hold `argc` NUL-terminated strings; `out_json` must be writable.
enum QdStatus qd_run(size_t argc, const char *const *argv, char **out_json);

// Lemma 1 or 2 check (`mode` is 1 or 2) for CNOT on inputs given as
// `table1:<a-d>`, `maximally-mixed`, or state file paths.
//
// # Safety
// `inputs` must hold `n_inputs` NUL-terminated strings; `out_json` must be writable.
enum QdStatus qd_gate_check_cnot(int mode,
                                 const char *const *inputs,
                                 size_t n_inputs,
                                 char **out_json);

// The CNOT discrimination example. `sampler` is `uniform-consistent` or
// `deterministic-XY`; `true_input` is one of `a`..`d`.
//
// # Safety
// String arguments must be NUL-terminated; `out_json` must be writable.
enum QdStatus qd_cnot_example(size_t runs,
                              uint64_t seed,
                              const char *sampler,
                              const char *true_input,
                              size_t max_rounds,
                              char **out_json);

// Frees a string returned by this library; NULL is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void qd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDISCORD_H */
