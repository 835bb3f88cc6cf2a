#ifndef COJAM_H
#define COJAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CojamStatus {
  COJAM_STATUS_OK = 0,
  COJAM_STATUS_NULL_POINTER = 1,
  COJAM_STATUS_INVALID_ARGUMENT = 2,
  COJAM_STATUS_CONFIG = 3,
  COJAM_STATUS_GEOMETRY = 4,
  COJAM_STATUS_DEGENERATE_CHANNEL = 5,
  COJAM_STATUS_COLLISION = 6,
  COJAM_STATUS_PROBE_INFEASIBLE = 7,
  COJAM_STATUS_PLACEMENT = 8,
  COJAM_STATUS_IO = 9,
  COJAM_STATUS_PANIC = 10,
} CojamStatus;

/**
 * Opaque simulation handle.
 */
typedef struct CojamScenario CojamScenario;

/**
 * Secrecy-rate breakdown in bits per channel use.
 */
typedef struct CojamRateReport {
  /**
   * Signed rate; negative when Eve's channel is better than Bob's.
   */
  double secrecy_rate;
  double rate_supremum;
  double bob_snr;
  double eve_sinr;
  double total_leakage;
} CojamRateReport;

typedef struct CojamComplex {
  double re;
  double im;
} CojamComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or "" after a success.
 * The pointer stays valid until the next cojam call on the same thread.
 */
const char *cojam_last_error_message(void);

/**
 * Builds a scenario from a TOML config (NULL for the reference scenario).
 * `helper_count` 0 keeps the config's count. On success `*out` owns a new handle.
 *
 * # Safety
 * `config_toml` is NULL or a NUL-terminated UTF-8 string; `out` is a valid pointer.
 */
enum CojamStatus cojam_scenario_new(const char *config_toml,
                                    uint64_t seed,
                                    size_t helper_count,
                                    struct CojamScenario **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `handle` is NULL or was returned by `cojam_scenario_new` and not yet freed.
 */
void cojam_scenario_free(struct CojamScenario *handle);

/**
 * Runs `n_steps` controller steps. On error the handle keeps its last good state.
 *
 * # Safety
 * `handle` is a live handle.
 */
enum CojamStatus cojam_scenario_advance(struct CojamScenario *handle, size_t n_steps);

/**
 * Secrecy rate of the current helper positions.
 *
 * # Safety
 * `handle` is a live handle; `out` is a valid pointer.
 */
enum CojamStatus cojam_scenario_rate(const struct CojamScenario *handle,
                                     struct CojamRateReport *out);

/**
 * Number of helpers and number of steps taken so far.
 *
 * # Safety
 * `handle` is a live handle; each output pointer is valid or NULL.
 */
enum CojamStatus cojam_scenario_info(const struct CojamScenario *handle,
                                     size_t *helper_count,
                                     size_t *steps_taken);

/**
 * Center of helper `index` in meters.
 *
 * # Safety
 * `handle` is a live handle; `x` and `y` are valid pointers.
 */
enum CojamStatus cojam_scenario_helper_position(const struct CojamScenario *handle,
                                                size_t index,
                                                double *x,
                                                double *y);

/**
 * Eve-side jamming gain `φ` of a helper with channels `h` (to Bob) and `g` (to Eve).
 *
 * # Safety
 * `h` and `g` point to `n_antennas` elements each; `out` is a valid pointer.
 */
enum CojamStatus cojam_leakage_phi(const struct CojamComplex *h,
                                   const struct CojamComplex *g,
                                   size_t n_antennas,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COJAM_H */
