#ifndef PHASEFACTOR_H
#define PHASEFACTOR_H

/* Generated with cbindgen:0.27.0 */

/* Auto-generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Backend selector for [`pf_config_set_backend`].
 */
typedef enum PfBackend {
  PF_BACKEND_SIMULATOR = 0,
  PF_BACKEND_INJECTOR = 1,
} PfBackend;

/**
 * Stopping policy selector for [`pf_config_set_policy`].
 */
typedef enum PfPolicy {
  PF_POLICY_FIRST_NONTRIVIAL = 0,
  /**
   * Stop after `count` distinct nontrivial divisors.
   */
  PF_POLICY_TARGET_COUNT = 1,
  PF_POLICY_EXHAUST = 2,
} PfPolicy;

/**
 * Status code returned by every fallible entry point.
 */
typedef enum PfStatus {
  PF_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PF_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PF_STATUS_UTF8 = 2,
  /**
   * Arguments parsed but were rejected (bad integer, even modulus, ...).
   */
  PF_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The instance needs more qubits than the simulator cap allows.
   */
  PF_STATUS_CAP_EXCEEDED = 4,
  /**
   * The run itself failed; see pf_last_error().
   */
  PF_STATUS_RUN_FAILED = 5,
  /**
   * An index argument was out of range.
   */
  PF_STATUS_INDEX_OUT_OF_RANGE = 6,
} PfStatus;

/**
 * Opaque factoring configuration; create with [`pf_config_new`].
 */
typedef struct PfConfig PfConfig;

/**
 * Opaque factoring result; create with [`pf_factor`].
 */
typedef struct PfReport PfReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for the current thread, or null if none was set.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *pf_last_error(void);

/**
 * Library version as a static string; never freed by the caller.
 */
const char *pf_version(void);

/**
 * Create a configuration for factoring the decimal integer `n`.
 * Defaults: random base per run, 150 shots, 1 run, seed 0, policy
 * first-nontrivial, simulator backend, gcd shortcut off.
 *
 * # Safety
 * `n_decimal` must point to a NUL-terminated string and `out` to a
 * writable pointer slot; both must stay valid for the duration of the
 * call.
 */
enum PfStatus pf_config_new(const char *n_decimal, struct PfConfig **out);

/**
 * Pin the base instead of drawing one per run.
 *
 * # Safety
 * `config` must be a live handle from [`pf_config_new`]; `a_decimal`
 * must be a NUL-terminated string.
 */
enum PfStatus pf_config_set_base(struct PfConfig *config, const char *a_decimal);

/**
 * # Safety
 * `config` must be a live handle from [`pf_config_new`].
 */
enum PfStatus pf_config_set_shots(struct PfConfig *config, uint64_t shots);

/**
 * # Safety
 * `config` must be a live handle from [`pf_config_new`].
 */
enum PfStatus pf_config_set_runs(struct PfConfig *config, uint32_t runs);

/**
 * # Safety
 * `config` must be a live handle from [`pf_config_new`].
 */
enum PfStatus pf_config_set_seed(struct PfConfig *config, uint64_t seed);

/**
 * # Safety
 * `config` must be a live handle from [`pf_config_new`].
 */
enum PfStatus pf_config_set_backend(struct PfConfig *config, enum PfBackend backend);

/**
 * Set the stopping policy; `count` is read only for `TargetCount`.
 *
 * # Safety
 * `config` must be a live handle from [`pf_config_new`].
 */
enum PfStatus pf_config_set_policy(struct PfConfig *config, enum PfPolicy policy, uint64_t count);

/**
 * Override the lower-register width; 0 restores the minimal default.
 *
 * # Safety
 * `config` must be a live handle from [`pf_config_new`].
 */
enum PfStatus pf_config_set_lower_bits(struct PfConfig *config, uint32_t lower_bits);

/**
 * # Safety
 * `config` must be a live handle from [`pf_config_new`].
 */
enum PfStatus pf_config_set_gcd_shortcut(struct PfConfig *config, bool enabled);

/**
 * Release a configuration handle. Null is ignored.
 *
 * # Safety
 * `config` must be null or a handle from [`pf_config_new`] not yet freed.
 */
void pf_config_free(struct PfConfig *config);

/**
 * Run the factoring loop and hand back a report handle.
 *
 * # Safety
 * `config` must be a live handle from [`pf_config_new`]; `out` must
 * point to a writable pointer slot.
 */
enum PfStatus pf_factor(const struct PfConfig *config, struct PfReport **out);

/**
 * True when the aggregated divisor set contains a divisor other than
 * 1 and n.
 *
 * # Safety
 * `report` must be a live handle from [`pf_factor`].
 */
bool pf_report_found_nontrivial(const struct PfReport *report);

/**
 * Number of entries in the aggregated divisor set (trivial included).
 *
 * # Safety
 * `report` must be a live handle from [`pf_factor`].
 */
uintptr_t pf_report_divisor_count(const struct PfReport *report);

/**
 * Fetch divisor `index` (ascending order) as a decimal string.
 *
 * # Safety
 * `report` must be a live handle from [`pf_factor`]; `out` must point
 * to a writable pointer slot. Free the result with [`pf_string_free`].
 */
enum PfStatus pf_report_divisor(const struct PfReport *report, uintptr_t index, char **out);

/**
 * Serialize the full report document as JSON.
 *
 * # Safety
 * `report` must be a live handle from [`pf_factor`]; `out` must point
 * to a writable pointer slot. Free the result with [`pf_string_free`].
 */
enum PfStatus pf_report_to_json(const struct PfReport *report, char **out);

/**
 * Release a report handle. Null is ignored.
 *
 * # Safety
 * `report` must be null or a handle from [`pf_factor`] not yet freed.
 */
void pf_report_free(struct PfReport *report);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned through one of this library's
 * out-pointers, not yet freed.
 */
void pf_string_free(char *s);

/**
 * Convert a sampled phase to the candidate order round(phase·n),
 * returned as a decimal string.
 *
 * # Safety
 * `n_decimal` must be a NUL-terminated string; `out` must point to a
 * writable pointer slot. Free the result with [`pf_string_free`].
 */
enum PfStatus pf_phase_to_l(double phase, const char *n_decimal, char **out);

/**
 * Extract divisors of `n` from candidate order `l` with base `a`;
 * the result is a semicolon-separated ascending list of decimals.
 *
 * # Safety
 * The three input strings must be NUL-terminated; `out` must point to
 * a writable pointer slot. Free the result with [`pf_string_free`].
 */
enum PfStatus pf_postprocess(const char *l_decimal,
                             const char *a_decimal,
                             const char *n_decimal,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHASEFACTOR_H */
