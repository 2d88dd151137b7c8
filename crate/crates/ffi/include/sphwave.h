#ifndef SPHWAVE_H
#define SPHWAVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SphwStatus {
  SPHW_STATUS_OK = 0,
  SPHW_STATUS_NULL_POINTER = 1,
  SPHW_STATUS_INVALID_ARGUMENT = 2,
  SPHW_STATUS_DOMAIN = 3,
  SPHW_STATUS_RESOLUTION = 4,
  SPHW_STATUS_NON_CONVERGENCE = 5,
  SPHW_STATUS_SINGULAR_SPECTRUM = 6,
  SPHW_STATUS_BAND_LIMIT = 7,
  SPHW_STATUS_DEGENERATE = 8,
  SPHW_STATUS_TAIL_UNBOUNDED = 9,
  SPHW_STATUS_IO = 10,
  SPHW_STATUS_INTERNAL = 11,
} SphwStatus;

typedef enum SphwVerdict {
  SPHW_VERDICT_ADMISSIBLE_CANDIDATE = 0,
  SPHW_VERDICT_FAILS_UPPER = 1,
  SPHW_VERDICT_FAILS_LOWER = 2,
} SphwVerdict;

/**
 * Opaque frame spectrum handle.
 */
typedef struct SphwSpectrum SphwSpectrum;

/**
 * Opaque wavelet handle.
 */
typedef struct SphwWavelet SphwWavelet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next failure.
 */
const char *sphw_last_error_message(void);

/**
 * Releases a string returned by this library.
 */
void sphw_string_free(char *s);

/**
 * One of `seed`, `canonical`, `constant`, `cosphi`, `zero`.
 */
enum SphwStatus sphw_wavelet_builtin(const char *name, struct SphwWavelet **out);

/**
 * Axisymmetric wavelet `f(theta)` from an expression; `decay` may be null.
 */
enum SphwStatus sphw_wavelet_from_expr(const char *expr,
                                       const char *decay,
                                       struct SphwWavelet **out);

void sphw_wavelet_free(struct SphwWavelet *w);

/**
 * Admissibility verdict, and optionally the full report as a JSON string
 * (release with [`sphw_string_free`]).
 */
enum SphwStatus sphw_wavelet_check(const struct SphwWavelet *w,
                                   enum SphwVerdict *verdict,
                                   char **json);

/**
 * `G_0..G_lmax` on the log-scale grid `[b_min, b_max]` with `b_nodes` nodes.
 */
enum SphwStatus sphw_spectrum_compute(const struct SphwWavelet *w,
                                      uintptr_t l_max,
                                      double b_min,
                                      double b_max,
                                      uintptr_t b_nodes,
                                      struct SphwSpectrum **out);

/**
 * Number of degrees in the spectrum (`l_max + 1`), 0 for null.
 */
uintptr_t sphw_spectrum_len(const struct SphwSpectrum *s);

/**
 * `G_l` and its error estimate; `error` may be null.
 */
enum SphwStatus sphw_spectrum_value(const struct SphwSpectrum *s,
                                    uintptr_t l,
                                    double *value,
                                    double *error);

/**
 * Frame bounds `c = 8 pi^2 min G_l` and `C = 8 pi^2 max G_l`.
 */
enum SphwStatus sphw_spectrum_bounds(const struct SphwSpectrum *s, double *lower, double *upper);

void sphw_spectrum_free(struct SphwSpectrum *s);

/**
 * Legendre polynomial `P_l(x)` for `|x| <= 1`.
 */
enum SphwStatus sphw_legendre_p(uintptr_t l, double x, double *out);

/**
 * Kernel `Q_l(x)` for `|x| <= 1`.
 */
enum SphwStatus sphw_q_ell(uintptr_t l, double x, double *out);

double sphw_bessel_j0(double x);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHWAVE_H */
