#ifndef QHD_H
#define QHD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Values 1 to 16 mirror the library error kinds.
 */
typedef enum QhdStatus {
  QHD_STATUS_OK = 0,
  QHD_STATUS_INVALID_PARAMETER = 1,
  QHD_STATUS_INVALID_INPUT = 2,
  QHD_STATUS_REPRESENTATION = 3,
  QHD_STATUS_GRID_MISMATCH = 4,
  QHD_STATUS_DOMAIN = 5,
  QHD_STATUS_RESOLUTION = 6,
  QHD_STATUS_GEOMETRY = 7,
  QHD_STATUS_NUMERIC = 8,
  QHD_STATUS_UNSUPPORTED_SCHEDULE = 9,
  QHD_STATUS_UNREACHABLE = 10,
  QHD_STATUS_HYPOTHESIS = 11,
  QHD_STATUS_UNKNOWN_NAME = 12,
  QHD_STATUS_STEP_BUDGET = 13,
  QHD_STATUS_INSTABILITY = 14,
  QHD_STATUS_CONFIG = 15,
  QHD_STATUS_IO = 16,
  QHD_STATUS_NULL_POINTER = 100,
  QHD_STATUS_INVALID_UTF8 = 101,
  QHD_STATUS_PANIC = 102,
} QhdStatus;

/**
 * Opaque objective function.
 */
typedef struct QhdPotential QhdPotential;

/**
 * Opaque schedule.
 */
typedef struct QhdSchedule QhdSchedule;

/**
 * Opaque wavefunction on a grid.
 */
typedef struct QhdState QhdState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread. The pointer stays valid
 * until the next failing call; an empty string means no error yet.
 */
const char *qhd_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qhd_version(void);

/**
 * Creates a registry potential (`quadratic`, `abs_l1`, `max_abs`, `huber`,
 * `rosenbrock_convexified`) with default parameters, its constants computed
 * on the box of half-width `radius` around `center[0..d]`.
 *
 * # Safety
 * `name` must be a NUL-terminated string, `center` must hold `d` values and
 * `out` must be valid for one write.
 */
enum QhdStatus qhd_potential_new(const char *name,
                                 size_t d,
                                 const double *center,
                                 double radius,
                                 struct QhdPotential **out);

/**
 * Evaluates the potential at `x[0..d]`.
 *
 * # Safety
 * `pot` must be a live handle, `x` must hold `d` values and `out` must be
 * valid for one write.
 */
enum QhdStatus qhd_potential_eval(const struct QhdPotential *pot, const double *x, double *out);

/**
 * Declared Lipschitz constant of the potential.
 *
 * # Safety
 * `pot` must be a live handle and `out` valid for one write.
 */
enum QhdStatus qhd_potential_lipschitz(const struct QhdPotential *pot, double *out);

/**
 * # Safety
 * `pot` must be null or a handle from [`qhd_potential_new`] not yet freed.
 */
void qhd_potential_free(struct QhdPotential *pot);

/**
 * Exponential schedule `c_t = c`, `m_t = m0 e^{λct}`, `ω_t = ω0 e^{λct/2}`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum QhdStatus qhd_schedule_exponential(double c,
                                        double m0,
                                        double omega0,
                                        double lambda,
                                        struct QhdSchedule **out);

/**
 * Polynomial schedule of degree `k` starting at `t0`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum QhdStatus qhd_schedule_polynomial(double k,
                                       double t0,
                                       double m0,
                                       double omega0,
                                       double lambda,
                                       struct QhdSchedule **out);

/**
 * `‖b‖_{L1[0,t]}` of the potential coefficient.
 *
 * # Safety
 * `s` must be a live handle and `out` valid for one write.
 */
enum QhdStatus qhd_schedule_b_l1(const struct QhdSchedule *s, double t, double *out);

/**
 * # Safety
 * `s` must be null or a schedule handle not yet freed.
 */
void qhd_schedule_free(struct QhdSchedule *s);

/**
 * Normalized Gaussian of width `sigma` at `x0[0..d]` on the grid with
 * `(2n)^d` points covering the box of half-width `radius` around
 * `center[0..d]`.
 *
 * # Safety
 * `center` and `x0` must hold `d` values and `out` must be valid for one
 * write.
 */
enum QhdStatus qhd_state_gaussian(size_t d,
                                  size_t n,
                                  const double *center,
                                  double radius,
                                  const double *x0,
                                  double sigma,
                                  struct QhdState **out);

/**
 * Number of grid points `(2n)^d`.
 *
 * # Safety
 * `s` must be a live handle and `out` valid for one write.
 */
enum QhdStatus qhd_state_len(const struct QhdState *s, size_t *out);

/**
 * Discrete `ℓ²` norm of the amplitudes.
 *
 * # Safety
 * `s` must be a live handle and `out` valid for one write.
 */
enum QhdStatus qhd_state_norm(const struct QhdState *s, double *out);

/**
 * Copies the position amplitudes into `re` and `im`, which must hold `len`
 * values with `len` equal to the state length. Storage is row-major with the
 * last axis fastest; along an axis, slot `k` holds grid index `k` for
 * `k < n` and `k - 2n` otherwise.
 *
 * # Safety
 * `s` must be a live handle; `re` and `im` must be valid for `len` writes.
 */
enum QhdStatus qhd_state_amplitudes(const struct QhdState *s, double *re, double *im, size_t len);

/**
 * Expected value of the potential in the state.
 *
 * # Safety
 * `s` and `pot` must be live handles and `out` valid for one write.
 */
enum QhdStatus qhd_state_expected_f(const struct QhdState *s,
                                    const struct QhdPotential *pot,
                                    double *out);

/**
 * Evolves the state in place from `t0` to `t1` with adaptive steps at
 * local tolerance `tol`. Writes the norm drift to `norm_drift` if non-null.
 *
 * # Safety
 * `s` must be a live handle with no other references in use; `sched` and
 * `pot` must be live handles; `norm_drift` must be null or valid for one
 * write.
 */
enum QhdStatus qhd_state_evolve(struct QhdState *s,
                                const struct QhdSchedule *sched,
                                const struct QhdPotential *pot,
                                double t0,
                                double t1,
                                double tol,
                                double *norm_drift);

/**
 * # Safety
 * `s` must be null or a state handle not yet freed.
 */
void qhd_state_free(struct QhdState *s);

/**
 * Runs the optimizer with an exact oracle and writes the best candidate to
 * `candidate[0..d]` and its value to `f_candidate`. `grid_n = 0` selects
 * the grid size automatically; `tol_step` is the local error tolerance per
 * unit time of the adaptive integrator.
 *
 * # Safety
 * `pot` must be a live handle, `x0` must hold `d` values, `candidate` must
 * be valid for `d` writes and `f_candidate` for one write.
 */
enum QhdStatus qhd_optimize(const struct QhdPotential *pot,
                            const double *x0,
                            double r,
                            double eps,
                            size_t repeats,
                            size_t grid_n,
                            double tol_step,
                            uint64_t seed,
                            double *candidate,
                            double *f_candidate);

/**
 * Admissible oracle error for simulation accuracy `eps`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum QhdStatus qhd_eps_f_budget(double eps, double lambda, double b_l1, double *out);

/**
 * Binary-oracle query count of the simulation.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum QhdStatus qhd_queries_binary(double lambda, double b_l1, double eps, double *out);

/**
 * Logical qubit count of the simulation.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum QhdStatus qhd_qubit_count(size_t d,
                               size_t n,
                               double a_l1,
                               double lambda,
                               double b_l1,
                               double eps,
                               double *out);

/**
 * Query count of a classical baseline (`belloni`, `risteski_li`,
 * `li_zhang`, `subgradient`).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` valid for one write.
 */
enum QhdStatus qhd_baseline_queries(const char *name,
                                    size_t d,
                                    double g,
                                    double r,
                                    double eps,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHD_H */
