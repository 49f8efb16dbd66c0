#ifndef RYDBERG_H
#define RYDBERG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RydbergStatus {
  RYDBERG_STATUS_OK = 0,
  RYDBERG_STATUS_NULL_POINTER = 1,
  RYDBERG_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Resource cap (basis size, grid cells) exceeded.
   */
  RYDBERG_STATUS_SIZE = 3,
  RYDBERG_STATUS_NON_CONVERGENCE = 4,
  RYDBERG_STATUS_DEGENERATE_DATA = 5,
  RYDBERG_STATUS_EMPTY_ENSEMBLE = 6,
  RYDBERG_STATUS_PANIC = 7,
} RydbergStatus;

typedef enum RydbergModel {
  RYDBERG_MODEL_SIMPLE = 0,
  RYDBERG_MODEL_COLLECTIVE = 1,
} RydbergModel;

/**
 * Opaque superatom ensemble.
 */
typedef struct RydbergEnsemble RydbergEnsemble;

/**
 * Opaque exact Hamiltonian.
 */
typedef struct RydbergExact RydbergExact;

/**
 * Physical parameters, SI units; `omega0` in rad/s and `c6` in J·m⁶.
 */
typedef struct RydbergParams {
  double omega0;
  double c6;
  double gamma_dephase;
  double kappa;
} RydbergParams;

typedef struct RydbergFit {
  double n_sat;
  double rate;
  double n_sat_err;
  double rate_err;
  double residual_rms;
  uint32_t iterations;
  bool converged;
  bool n_sat_identifiable;
} RydbergFit;

typedef struct RydbergPowerLaw {
  double exponent;
  double prefactor;
  double std_error;
} RydbergPowerLaw;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t rydberg_last_error(char *buf, size_t len);

/**
 * Parameters with `γ = 0` and `κ = 1`.
 */
struct RydbergParams rydberg_params_default(double omega0, double c6);

/**
 * `Ω₁Ω₂/(2Δ)`, all in rad/s.
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
enum RydbergStatus rydberg_two_photon_rabi(double omega1,
                                           double omega2,
                                           double delta,
                                           double *result);

/**
 * Converts a `C₆` in atomic units to J·m⁶ (magnitude).
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
enum RydbergStatus rydberg_convert_c6_au(double c6_au, double *result);

/**
 * # Safety
 * `params` must be null or point to a valid struct; `radius` null or writable.
 */
enum RydbergStatus rydberg_blockade_radius_simple(const struct RydbergParams *params,
                                                  double *radius);

/**
 * Self-consistent radius and atom number for the collective linewidth.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum RydbergStatus rydberg_blockade_radius_collective(const struct RydbergParams *params,
                                                      double local_density,
                                                      double *radius,
                                                      double *n_atoms);

/**
 * Partitions a Gaussian cloud of `n_atoms` with widths `sigma[3]` (m).
 * On success `*ensemble` owns a new handle.
 *
 * # Safety
 * `sigma` must point to 3 doubles; other pointers null or valid.
 */
enum RydbergStatus rydberg_ensemble_partition(double n_atoms,
                                              const double *sigma,
                                              const struct RydbergParams *params,
                                              enum RydbergModel model,
                                              double n_min,
                                              struct RydbergEnsemble **ensemble);

/**
 * # Safety
 * `ensemble` must be null or a handle from `rydberg_ensemble_partition`, not yet freed.
 */
void rydberg_ensemble_free(struct RydbergEnsemble *ensemble);

/**
 * Number of entries, total superatoms `Σw` and covered atoms `Σw·N`.
 *
 * # Safety
 * `ensemble` must be a live handle; out-pointers null or valid.
 */
enum RydbergStatus rydberg_ensemble_summary(const struct RydbergEnsemble *ensemble,
                                            size_t *entries,
                                            double *superatoms,
                                            double *atoms_covered);

/**
 * Rydberg number of the ensemble at each of `len` times, written to `values`.
 *
 * # Safety
 * `times` and `values` must each hold `len` doubles.
 */
enum RydbergStatus rydberg_ensemble_simulate(const struct RydbergEnsemble *ensemble,
                                             const struct RydbergParams *params,
                                             const double *times,
                                             size_t len,
                                             double *values);

/**
 * Fits `N_sat(1 − e^{−Rt/N_sat})`. A fit that stops at the iteration limit
 * still fills `fit` and returns `NonConvergence`.
 *
 * # Safety
 * `times` and `values` must each hold `len` doubles; `fit` null or writable.
 */
enum RydbergStatus rydberg_fit_saturation(const double *times,
                                          const double *values,
                                          size_t len,
                                          struct RydbergFit *fit);

/**
 * Ordinary least squares of `ln y` on `ln x`.
 *
 * # Safety
 * `xs` and `ys` must each hold `len` doubles; `fit` null or writable.
 */
enum RydbergStatus rydberg_fit_power_law(const double *xs,
                                         const double *ys,
                                         size_t len,
                                         struct RydbergPowerLaw *fit);

/**
 * Builds the exact Hamiltonian of `count` atoms at `positions` (`3·count`
 * doubles, m, row-major). With `restricted`, pairs closer than
 * `restricted_radius` (or the simple blockade radius when it is ≤ 0) are
 * never both excited. Default basis caps apply.
 *
 * # Safety
 * `positions` must hold `3·count` doubles; `exact` null or writable.
 */
enum RydbergStatus rydberg_exact_new(const double *positions,
                                     size_t count,
                                     const struct RydbergParams *params,
                                     bool restricted,
                                     double restricted_radius,
                                     struct RydbergExact **exact);

/**
 * # Safety
 * `exact` must be null or a handle from `rydberg_exact_new`, not yet freed.
 */
void rydberg_exact_free(struct RydbergExact *exact);

/**
 * Dimension of the Hilbert-space basis.
 *
 * # Safety
 * `exact` must be a live handle; `dim` null or writable.
 */
enum RydbergStatus rydberg_exact_dim(const struct RydbergExact *exact, size_t *dim);

/**
 * Evolves the all-ground state over `len` ascending times and writes
 * `⟨N_R⟩` and the W-state fidelity at each. `w_fidelity` may be null.
 *
 * # Safety
 * `times` and `n_rydberg` (and `w_fidelity` if not null) must hold `len` doubles.
 */
enum RydbergStatus rydberg_exact_evolve(const struct RydbergExact *exact,
                                        const double *times,
                                        size_t len,
                                        double *n_rydberg,
                                        double *w_fidelity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RYDBERG_H */
