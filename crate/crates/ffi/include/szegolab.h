#ifndef SZEGOLAB_H
#define SZEGOLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>
#include <stddef.h>

typedef enum SzStatus {
  SZ_STATUS_OK = 0,
  SZ_STATUS_NULL_POINTER = 1,
  SZ_STATUS_INVALID_UTF8 = 2,
  SZ_STATUS_PARSE = 3,
  SZ_STATUS_DOMAIN = 4,
  SZ_STATUS_RANGE = 5,
  SZ_STATUS_POSITIVITY_LOSS = 6,
  SZ_STATUS_SINGULAR = 7,
  SZ_STATUS_TRUNCATION = 8,
  SZ_STATUS_UNSUPPORTED_ORDER = 9,
  SZ_STATUS_RESOLUTION = 10,
  SZ_STATUS_IO = 11,
  SZ_STATUS_ASSERTION = 12,
  SZ_STATUS_PANIC = 13,
} SzStatus;

// Experiment configuration.
typedef struct SzConfig SzConfig;

// Finished experiment report.
typedef struct SzReport SzReport;

typedef struct SzComplex {
  double re;
  double im;
} SzComplex;

// One row of a convergence table.
typedef struct SzRow {
  size_t n;
  struct SzComplex psi;
  struct SzComplex predicted;
  double abs_error;
  double route_disagreement;
} SzRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the next failing call.
const char *szegolab_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void szegolab_string_free(char *s);

// Creates a configuration. `n_list` is a comma-separated, strictly increasing list.
//
// # Safety
// String arguments must be valid NUL-terminated strings; `out` must be writable.
enum SzStatus szegolab_config_new(const char *experiment,
                                  const char *measure,
                                  const char *h,
                                  const char *n_list,
                                  struct SzConfig **out);

// # Safety
// `cfg` must be null or a handle from [`szegolab_config_new`].
void szegolab_config_free(struct SzConfig *cfg);

// Second source for `compare`; null clears it.
//
// # Safety
// `cfg` must be a live handle; `other` null or a valid string.
enum SzStatus szegolab_config_set_other(struct SzConfig *cfg, const char *other);

// Extra CMV rows; 0 restores the default.
//
// # Safety
// `cfg` must be a live handle.
enum SzStatus szegolab_config_set_pad(struct SzConfig *cfg, size_t pad);

// Bound on the final row's error; a negative value removes it.
//
// # Safety
// `cfg` must be a live handle.
enum SzStatus szegolab_config_set_tol(struct SzConfig *cfg, double tol);

// # Safety
// `cfg` must be a live handle.
enum SzStatus szegolab_config_set_t(struct SzConfig *cfg, double t);

// # Safety
// `cfg` must be a live handle.
enum SzStatus szegolab_config_set_order(struct SzConfig *cfg, size_t order);

// Subsequence for `right_limit`, comma-separated.
//
// # Safety
// `cfg` must be a live handle; `subseq` a valid string.
enum SzStatus szegolab_config_set_subseq(struct SzConfig *cfg, const char *subseq);

// Quadrature resolution for catalog measures; 0 restores the default.
//
// # Safety
// `cfg` must be a live handle.
enum SzStatus szegolab_config_set_quad_points(struct SzConfig *cfg, size_t m);

// Runs the experiment. Failed assertions still produce a report; see [`szegolab_report_passed`].
//
// # Safety
// `cfg` must be a live handle; `out` must be writable.
enum SzStatus szegolab_run(const struct SzConfig *cfg, struct SzReport **out);

// # Safety
// `report` must be null or a handle from [`szegolab_run`].
void szegolab_report_free(struct SzReport *report);

// Number of rows, or 0 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
size_t szegolab_report_row_count(const struct SzReport *report);

// # Safety
// `report` must be a live handle; `out` must be writable.
enum SzStatus szegolab_report_row(const struct SzReport *report, size_t index, struct SzRow *out);

// 1 when every assertion passed, 0 otherwise (or for a null handle).
//
// # Safety
// `report` must be null or a live handle.
int szegolab_report_passed(const struct SzReport *report);

// Summary of the first failing assertion, or null when all passed. Free with [`szegolab_string_free`].
//
// # Safety
// `report` must be null or a live handle.
char *szegolab_report_first_failure(const struct SzReport *report);

// CSV text of the table. Free with [`szegolab_string_free`]; null on failure.
//
// # Safety
// `report` must be a live handle.
char *szegolab_report_csv(const struct SzReport *report);

// JSON report including metadata and assertions. Free with [`szegolab_string_free`]; null on failure.
//
// # Safety
// `report` must be a live handle.
char *szegolab_report_json(const struct SzReport *report);

// `Q_α(h)` for a symbol spec `h`.
//
// # Safety
// `h` must be a valid string; `out` must be writable.
enum SzStatus szegolab_q_alpha(struct SzComplex alpha, const char *h, struct SzComplex *out);

// `Ψ_n` along the Fredholm route for a measure or sequence spec; `pad = 0` picks the default.
//
// # Safety
// String arguments must be valid; `out` must be writable.
enum SzStatus szegolab_psi(const char *source,
                           const char *h,
                           size_t n,
                           size_t pad,
                           struct SzComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SZEGOLAB_H */
