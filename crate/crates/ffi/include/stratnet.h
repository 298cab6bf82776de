#ifndef STRATNET_H
#define STRATNET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum StnStatus {
  STN_STATUS_OK = 0,
  STN_STATUS_NULL_POINTER = 1,
  STN_STATUS_INVALID_INPUT = 2,
  STN_STATUS_PARSE = 3,
  STN_STATUS_IO = 4,
  STN_STATUS_ENUMERATION_CAP = 5,
  STN_STATUS_SEPARATION = 6,
  STN_STATUS_NO_CONVERGENCE = 7,
  STN_STATUS_FROZEN_CHAIN = 8,
  STN_STATUS_NO_FIXED_POINT = 9,
  STN_STATUS_UNSUPPORTED = 10,
  STN_STATUS_INTERNAL = 11,
} StnStatus;

typedef enum StnStatistic {
  STN_STATISTIC_LOCALLY_BEST = 0,
  STN_STATISTIC_TRANSITIVITY_INDEX = 1,
  STN_STATISTIC_RECIPROCITY_INDEX = 2,
} StnStatistic;

typedef enum StnSpec {
  STN_SPEC_RECIPROCITY = 0,
  STN_SPEC_TRANSITIVITY = 1,
  STN_SPEC_CUSTOMER_PRODUCT = 2,
} StnSpec;

typedef enum StnReference {
  STN_REFERENCE_DENSITY_ONLY = 0,
  STN_REFERENCE_DEGREE_ONLY = 1,
  STN_REFERENCE_DEGREE_AND_CROSSLINK = 2,
  STN_REFERENCE_ENUMERATED = 3,
} StnReference;

/**
 * A directed network with its node groups.
 */
typedef struct StnNetwork StnNetwork;

/**
 * Nuisance parameters of the null model.
 */
typedef struct StnParams StnParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *stn_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *stn_version(void);

/**
 * Builds a network from `n_edges` arcs `sources[e] -> targets[e]` over
 * `n_nodes` zero-based nodes. `groups` may be NULL (one group) or hold
 * `n_nodes` entries below `n_groups`.
 *
 * # Safety
 * Array arguments must point to at least the stated number of elements.
 */
enum StnStatus stn_network_new(uintptr_t n_nodes,
                               const uint32_t *sources,
                               const uint32_t *targets,
                               uintptr_t n_edges,
                               const uint32_t *groups,
                               uintptr_t n_groups,
                               struct StnNetwork **out);

/**
 * # Safety
 * `net` must be NULL or a handle from this library that is not used again.
 */
void stn_network_free(struct StnNetwork *net);

/**
 * # Safety
 * `net` must be a valid handle.
 */
uintptr_t stn_network_n_nodes(const struct StnNetwork *net);

/**
 * # Safety
 * `net` must be a valid handle.
 */
uintptr_t stn_network_arc_count(const struct StnNetwork *net);

/**
 * Copies up to `capacity` arcs in row-major order and stores the total
 * arc count in `n_written`.
 *
 * # Safety
 * `sources` and `targets` must hold `capacity` elements.
 */
enum StnStatus stn_network_edges(const struct StnNetwork *net,
                                 uint32_t *sources,
                                 uint32_t *targets,
                                 uintptr_t capacity,
                                 uintptr_t *n_written);

/**
 * # Safety
 * `out_degrees` and `in_degrees` must hold `n_nodes` elements.
 */
enum StnStatus stn_network_degrees(const struct StnNetwork *net,
                                   uint32_t *out_degrees,
                                   uint32_t *in_degrees);

/**
 * Reciprocity or transitivity index; NaN when undefined.
 *
 * # Safety
 * `net` must be a valid handle and `out` writable.
 */
enum StnStatus stn_network_index(const struct StnNetwork *net,
                                 enum StnStatistic statistic,
                                 double *out);

/**
 * Parameters from `lambda` (row-major `n_groups` x `n_groups`), `a` and
 * `b` (`n_nodes` each).
 *
 * # Safety
 * Arrays must hold the stated number of elements.
 */
enum StnStatus stn_params_new(uintptr_t n_nodes,
                              uintptr_t n_groups,
                              const double *lambda,
                              const double *a,
                              const double *b,
                              struct StnParams **out);

/**
 * # Safety
 * `params` must be NULL or a handle from this library that is not used again.
 */
void stn_params_free(struct StnParams *params);

/**
 * Copies the parameters out; each array may be NULL to skip it.
 *
 * # Safety
 * Non-NULL arrays must hold `n_groups * n_groups`, `n_nodes` and
 * `n_nodes` elements respectively.
 */
enum StnStatus stn_params_get(const struct StnParams *params, double *lambda, double *a, double *b);

/**
 * Null-model maximum likelihood estimate.
 *
 * # Safety
 * `net` must be a valid handle and `out` writable.
 */
enum StnStatus stn_fit_null(const struct StnNetwork *net, struct StnParams **out);

/**
 * # Safety
 * Handles must be valid and `out` writable.
 */
enum StnStatus stn_locally_best(const struct StnNetwork *net,
                                const struct StnParams *params,
                                enum StnSpec spec,
                                double *out);

/**
 * One draw from the degree-preserving chain after `tau` steps.
 * `reference` must be `DegreeOnly` or `DegreeAndCrosslink`.
 *
 * # Safety
 * `net` must be a valid handle and `out` writable.
 */
enum StnStatus stn_sample(const struct StnNetwork *net,
                          enum StnReference reference,
                          uintptr_t tau,
                          double q,
                          uint64_t seed,
                          struct StnNetwork **out);

/**
 * Least dense pure-strategy equilibrium for the groups of `like`.
 *
 * # Safety
 * Handles must be valid and `out` writable.
 */
enum StnStatus stn_simulate(const struct StnParams *params,
                            const struct StnNetwork *like,
                            double gamma,
                            enum StnSpec spec,
                            uint64_t seed,
                            struct StnNetwork **out);

/**
 * Conditional test. `params` may be NULL to fit the null model;
 * `tau == 0` chooses the chain length from a pilot run.
 *
 * # Safety
 * `net` must be a valid handle, `params` NULL or valid, outputs writable.
 */
enum StnStatus stn_test(const struct StnNetwork *net,
                        enum StnStatistic statistic,
                        enum StnSpec spec,
                        const struct StnParams *params,
                        enum StnReference reference,
                        uintptr_t draws,
                        uintptr_t tau,
                        double q,
                        uint64_t seed,
                        double *observed,
                        double *p_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRATNET_H */
