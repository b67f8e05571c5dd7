#ifndef STEINLAB_H
#define STEINLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Most terms any bound reports.
 */
#define SL_MAX_TERMS 5

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_INVALID_ARGUMENT = 1,
  SL_STATUS_NULL_POINTER = 2,
  SL_STATUS_ZERO_MEAN = 3,
  SL_STATUS_GAPPED_SUPPORT = 4,
  SL_STATUS_CAP_EXCEEDED = 5,
  SL_STATUS_SINGULAR = 6,
  SL_STATUS_INTERNAL = 7,
} SlStatus;

/**
 * A probability mass function on `0..len`.
 */
typedef struct SlPmf SlPmf;

/**
 * A bound with its additive terms in reporting order.
 */
typedef struct SlBound {
  double total;
  double lambda_used;
  double p_used;
  /**
   * The total exceeds 1, so the bound says nothing.
   */
  bool vacuous;
  size_t n_terms;
  double terms[SL_MAX_TERMS];
} SlBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sl_version(void);

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *sl_last_error(void);

/**
 * Builds a law from `len` non-negative weights.
 *
 * # Safety
 * `weights` must point to `len` readable doubles; `out` must be writable.
 */
enum SlStatus sl_pmf_from_weights(const double *weights, size_t len, struct SlPmf **out);

/**
 * Poisson law truncated once the tail drops to `tail_epsilon`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_pmf_poisson(double lambda, double tail_epsilon, struct SlPmf **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_pmf_binomial(uint64_t n, double q, struct SlPmf **out);

/**
 * Zero-inflated Poisson `I_p Z`, `Z ~ Po(lambda)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_pmf_zip(double p, double lambda, double tail_epsilon, struct SlPmf **out);

/**
 * # Safety
 * `pmf` must be a live handle or null; `out` must be writable.
 */
enum SlStatus sl_pmf_size_bias(const struct SlPmf *pmf, struct SlPmf **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `pmf` must come from an `sl_pmf_*` constructor and not be freed twice.
 */
void sl_pmf_free(struct SlPmf *pmf);

/**
 * Number of stored masses (support `0..len`); 0 for null.
 *
 * # Safety
 * `pmf` must be a live handle or null.
 */
size_t sl_pmf_len(const struct SlPmf *pmf);

/**
 * Tail mass dropped by truncation; NaN for null.
 *
 * # Safety
 * `pmf` must be a live handle or null.
 */
double sl_pmf_omitted_mass(const struct SlPmf *pmf);

/**
 * Copies the masses into `buf`, which must hold at least `sl_pmf_len`
 * doubles.
 *
 * # Safety
 * `pmf` must be a live handle; `buf` must point to `cap` writable doubles.
 */
enum SlStatus sl_pmf_probs(const struct SlPmf *pmf, double *buf, size_t cap);

/**
 * # Safety
 * `pmf` must be a live handle; `mean` and `var` must be writable.
 */
enum SlStatus sl_pmf_moments(const struct SlPmf *pmf, double *mean, double *var);

/**
 * Total variation distance; `error` receives the omitted tail mass of both
 * laws, which bounds the effect of truncation.
 *
 * # Safety
 * `a` and `b` must be live handles; `value` and `error` must be writable.
 */
enum SlStatus sl_tv_distance(const struct SlPmf *a,
                             const struct SlPmf *b,
                             double *value,
                             double *error);

/**
 * Kolmogorov distance of `(Y - mu) / sigma` to the standard normal.
 *
 * # Safety
 * `pmf` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_kolmogorov_to_std_normal(const struct SlPmf *pmf,
                                          double mu,
                                          double sigma,
                                          double *out);

/**
 * Poincaré constant on the support of the law (infinite when the support
 * has a gap).
 *
 * # Safety
 * `pmf` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_poincare_oracle(const struct SlPmf *pmf, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_poincare_bound(double mu, double p, double h_star, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_zip_poincare_bound(double p, double lambda, double *out);

/**
 * Terms: base, variance_deficit.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_classic_bound(double mu, double var, struct SlBound *out);

/**
 * Terms: base, mean, coupling_penalty.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_bound_negative(double mu,
                                double var,
                                double p,
                                double lambda,
                                struct SlBound *out);

/**
 * Terms: slack, size_bias_mean, coupling_penalty.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_bound_positive(double mu,
                                double var,
                                double p,
                                double lambda,
                                double mean_z,
                                struct SlBound *out);

/**
 * Terms: base, mean, coupling_penalty.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_neg_assoc_bound(double mu, double var, double p, struct SlBound *out);

/**
 * Terms: catastrophe, variance_deficit.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_epidemic_bound(double capital_lambda, double var_w, double q, struct SlBound *out);

/**
 * Bound for the sum of `m` values drawn without replacement from
 * `values[0..len]`.
 *
 * # Safety
 * `values` must point to `len` readable integers; `out` must be writable.
 */
enum SlStatus sl_sampling_bound(const uint64_t *values, size_t len, size_t m, struct SlBound *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEINLAB_H */
