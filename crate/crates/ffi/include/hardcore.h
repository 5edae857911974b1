#ifndef HARDCORE_H
#define HARDCORE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  /**
   * An argument lies outside the domain of the function.
   */
  HC_STATUS_DOMAIN = 2,
  HC_STATUS_INPUT = 3,
  HC_STATUS_CONFIG = 4,
  /**
   * Quadrature did not reach the requested tolerance.
   */
  HC_STATUS_TOLERANCE = 5,
  HC_STATUS_UNSUPPORTED = 6,
  HC_STATUS_SIMULATION = 7,
  /**
   * A Rust panic was caught at the boundary.
   */
  HC_STATUS_PANIC = 99,
} HcStatus;

typedef enum HcProcess {
  HC_PROCESS_MATERN_I = 0,
  HC_PROCESS_MATERN_II = 1,
  HC_PROCESS_POISSON_HOLE = 2,
} HcProcess;

typedef enum HcEirMethod {
  HC_EIR_METHOD_QUADRATURE = 0,
  HC_EIR_METHOD_UPPER_BOUND = 1,
  HC_EIR_METHOD_APPROXIMATION = 2,
} HcEirMethod;

/**
 * Opaque model: process parameters, power-law path loss and quadrature
 * settings.
 */
typedef struct HcModel HcModel;

typedef struct HcEirReport {
  double mean_hardcore;
  double mean_poisson_hole;
  double eir_linear;
  double eir_db;
} HcEirReport;

typedef struct HcInterferenceEstimate {
  double mean;
  double std_error;
  double ci_low;
  double ci_high;
  uint64_t replicates;
  double tail_correction;
} HcInterferenceEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a model with power-law path loss `max(r0, r)^-alpha`.
 *
 * On success `*out` owns the model and must be released with
 * [`hc_model_free`]. On failure `*out` is set to null.
 */
enum HcStatus hc_model_new(double lambda_p,
                           double delta,
                           enum HcProcess process,
                           double alpha,
                           double r0,
                           struct HcModel **out);

/**
 * Releases a model. Null is ignored.
 */
void hc_model_free(struct HcModel *model);

/**
 * Overrides the relative tolerance and panel budget used by quadrature.
 */
enum HcStatus hc_model_set_quadrature(struct HcModel *model,
                                      double rel_tol,
                                      uint32_t max_subdivisions);

enum HcStatus hc_intensity(const struct HcModel *model, double *out);

/**
 * Ripley's K function of the model's process at distance `r`.
 */
enum HcStatus hc_k_function(const struct HcModel *model, double r, double *out);

/**
 * Mean interference at the typical point, by quadrature.
 */
enum HcStatus hc_mean_interference(const struct HcModel *model, double *out);

/**
 * Mean interference of the Poisson process with a hole of radius δ and the
 * same intensity as the model.
 */
enum HcStatus hc_mean_interference_poisson_hole(const struct HcModel *model, double *out);

enum HcStatus hc_eir(const struct HcModel *model, enum HcEirMethod method, struct HcEirReport *out);

/**
 * Upper bound on the type II excess interference ratio. Pass NaN for
 * `alpha` to get the bound that holds for every path loss.
 */
enum HcStatus hc_eir_type2_bound(double alpha, double *out);

enum HcStatus hc_h_integral(double v, double x, double alpha, double *out);

/**
 * Γ(s, x) for real `s` (negative orders included) and `x > 0`.
 */
enum HcStatus hc_upper_incomplete_gamma(double s, double x, double *out);

/**
 * Monte Carlo estimate of the mean interference at the typical point,
 * without fading and with the analytic tail beyond the window added.
 *
 * A `window_radius` of zero or less selects the default window.
 */
enum HcStatus hc_estimate_mean_interference(const struct HcModel *model,
                                            uint64_t replicates,
                                            uint64_t seed,
                                            double window_radius,
                                            struct HcInterferenceEstimate *out);

/**
 * Length in bytes of the last error message on this thread, excluding the
 * terminating NUL. Zero when the last call succeeded.
 */
uintptr_t hc_last_error_length(void);

/**
 * Copies the last error message into `buf` as a NUL-terminated string.
 *
 * Returns the number of bytes written excluding the NUL, 0 when there is no
 * message, or -1 when `buf` is null or too small.
 */
int32_t hc_last_error_message(char *buf, uintptr_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARDCORE_H */
