/* C interface to the fdv fire/plume tracking pipeline. */

#ifndef FDV_H
#define FDV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Distribution family selector for [`fdv_fit`].
typedef enum FdvFamily {
  FDV_FAMILY_EXPONENTIAL = 0,
  FDV_FAMILY_ERLANG = 1,
} FdvFamily;

// Fit method selector for [`fdv_fit`].
typedef enum FdvFitMethod {
  FDV_FIT_METHOD_MOMENT_MATCHING = 0,
  FDV_FIT_METHOD_MCMC = 1,
} FdvFitMethod;

// Status codes; nonzero values match the CLI exit codes where possible.
typedef enum FdvStatus {
  FDV_STATUS_OK = 0,
  // Invalid configuration, parameters, or preconditions.
  FDV_STATUS_VALIDATION_ERROR = 2,
  // File system or decode failure.
  FDV_STATUS_IO_ERROR = 3,
  // Numeric failure (degenerate geometry, non-convergence, domain).
  FDV_STATUS_NUMERIC_ERROR = 4,
  FDV_STATUS_NULL_POINTER = 5,
  FDV_STATUS_INVALID_UTF8 = 6,
  // A panic was caught at the boundary; state may be stale.
  FDV_STATUS_PANIC = 7,
} FdvStatus;

// Opaque pipeline configuration handle.
typedef struct FdvConfig FdvConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string; do not free.
const char *fdv_version(void);

// Message of the last failure on this thread; valid until the next
// failing call from the same thread. Do not free.
const char *fdv_last_error(void);

// Release a string returned through an out-parameter.
//
// # Safety
// `s` must have been returned by this library and not freed before.
void fdv_string_free(char *s);

// New handle holding the default configuration. Never fails.
struct FdvConfig *fdv_config_default(void);

// Parse and validate a configuration from JSON.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be a valid pointer.
enum FdvStatus fdv_config_from_json(const char *json, struct FdvConfig **out);

// Serialize a configuration to pretty JSON (free with [`fdv_string_free`]).
//
// # Safety
// `cfg` must be a live handle from this library.
char *fdv_config_to_json(const struct FdvConfig *cfg);

// Release a configuration handle.
//
// # Safety
// `cfg` must come from this library and not be freed twice.
void fdv_config_free(struct FdvConfig *cfg);

// Override the seed of a configuration handle.
//
// # Safety
// `cfg` must be a live handle from this library.
enum FdvStatus fdv_config_set_seed(struct FdvConfig *cfg, uint64_t seed);

// Run the full pipeline: frames in `input_dir`, bundle to `out_dir`.
//
// `threads == 0` uses all cores. When `report_json_out` is non-null it
// receives the run report as JSON (free with [`fdv_string_free`]).
//
// # Safety
// Pointer arguments must satisfy the conventions in the module docs.
enum FdvStatus fdv_run(const struct FdvConfig *cfg,
                       const char *input_dir,
                       const char *out_dir,
                       uint32_t threads,
                       char **report_json_out);

// Nyquist sampling advisor over candidate rates (Hz). The report JSON
// lands in `report_json_out` (free with [`fdv_string_free`]).
//
// # Safety
// `rates` must point to `rates_len` doubles; other pointers as in
// [`fdv_run`].
enum FdvStatus fdv_advise(const struct FdvConfig *cfg,
                          const char *input_dir,
                          const double *rates,
                          uintptr_t rates_len,
                          uint32_t threads,
                          char **report_json_out);

// Render a synthetic scenario (JSON document) plus ground truth into
// `out_dir`, in the layout the pipeline consumes.
//
// # Safety
// Both arguments must be NUL-terminated strings.
enum FdvStatus fdv_synth(const char *scenario_json, const char *out_dir);

// Fit a distribution to `len` samples. The fit result JSON lands in
// `result_json_out` (free with [`fdv_string_free`]).
//
// # Safety
// `values` must point to `len` doubles; `result_json_out` must be valid.
enum FdvStatus fdv_fit(const double *values,
                       uintptr_t len,
                       enum FdvFamily family,
                       enum FdvFitMethod method,
                       uint64_t seed,
                       char **result_json_out);

// Fill occlusions across a sequence; writes filled frames to `out_dir`.
//
// # Safety
// Pointer arguments must satisfy the conventions in the module docs.
enum FdvStatus fdv_inpaint_sequence(const struct FdvConfig *cfg,
                                    const char *input_dir,
                                    const char *out_dir,
                                    uint32_t threads);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FDV_H */
