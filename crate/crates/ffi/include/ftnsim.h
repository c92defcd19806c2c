#ifndef FTNSIM_H
#define FTNSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FtnStatus {
  FTN_STATUS_OK = 0,
  FTN_STATUS_NULL_ARGUMENT = 1,
  FTN_STATUS_INVALID_UTF8 = 2,
  FTN_STATUS_CONFIG = 3,
  FTN_STATUS_INVALID_PARAMETER = 4,
  FTN_STATUS_NO_CROSSING = 5,
  FTN_STATUS_IO = 6,
  FTN_STATUS_SIMULATION = 7,
  FTN_STATUS_PANIC = 8,
} FtnStatus;

typedef enum FtnSweep {
  FTN_SWEEP_BER_VS_OSNR = 0,
  FTN_SWEEP_REQUIRED_OSNR = 1,
  FTN_SWEEP_DGD = 2,
  FTN_SWEEP_DGD_WITH_REQUIRED_OSNR = 3,
  FTN_SWEEP_LINEWIDTH = 4,
} FtnSweep;

/**
 * Experiment configuration.
 */
typedef struct FtnConfig FtnConfig;

/**
 * Result table of a finished sweep.
 */
typedef struct FtnResult FtnResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 */
const char *ftn_last_error(void);

/**
 * Library version as a static string.
 */
const char *ftn_version(void);

/**
 * Default configuration.
 */
enum FtnStatus ftn_config_default(struct FtnConfig **out);

/**
 * Parses a JSON configuration; missing keys take defaults.
 */
enum FtnStatus ftn_config_from_json(const char *json, struct FtnConfig **out);

enum FtnStatus ftn_config_set_seed(struct FtnConfig *config, uint64_t seed);

enum FtnStatus ftn_config_set_trials(struct FtnConfig *config, size_t trials);

/**
 * Writes the resolved configuration as JSON into `buf`. `needed` receives
 * the size including the terminator; a short buffer yields
 * `FTN_STATUS_INVALID_PARAMETER` with nothing written.
 */
enum FtnStatus ftn_config_to_json(const struct FtnConfig *config,
                                  char *buf,
                                  size_t len,
                                  size_t *needed);

void ftn_config_free(struct FtnConfig *config);

/**
 * Runs a sweep. A `jobs_hint` of 0 uses every available core; the output does
 * not depend on it.
 */
enum FtnStatus ftn_run(const struct FtnConfig *config,
                       enum FtnSweep sweep,
                       uint32_t jobs_hint,
                       struct FtnResult **out);

/**
 * OSNR in dB at which the BER reaches the configured target.
 */
enum FtnStatus ftn_required_osnr(const struct FtnConfig *config,
                                 double dgd_ps,
                                 double linewidth_hz,
                                 uint32_t jobs_hint,
                                 double *osnr_db);

const char *ftn_result_csv(const struct FtnResult *result);

const char *ftn_result_json(const struct FtnResult *result);

size_t ftn_result_rows(const struct FtnResult *result);

void ftn_result_free(struct FtnResult *result);

/**
 * Runs the built-in invariant checks; `failed` receives the failure count.
 */
enum FtnStatus ftn_selftest(uint32_t *failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FTNSIM_H */
