#ifndef ENTIRE_DYNAMICS_H
#define ENTIRE_DYNAMICS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EdStatus {
  ED_STATUS_OK = 0,
  ED_STATUS_NULL_POINTER = 1,
  ED_STATUS_INVALID_ARGUMENT = 2,
  ED_STATUS_PARSE = 3,
  ED_STATUS_OVERFLOW = 4,
  ED_STATUS_NON_ESCALATING = 5,
  ED_STATUS_DOMAIN = 6,
  ED_STATUS_NO_CONVERGENCE = 7,
  ED_STATUS_PRECISION_EXHAUSTED = 8,
  ED_STATUS_IO = 9,
  ED_STATUS_PANIC = 10,
} EdStatus;

typedef enum EdRegionKind {
  ED_REGION_KIND_RECTANGLE = 0,
  ED_REGION_KIND_DISK = 1,
} EdRegionKind;

// Opaque function handle.
typedef struct EdFunction EdFunction;

typedef struct EdComplex {
  double re;
  double im;
} EdComplex;

// `exp^depth(base)`.
typedef struct EdTower {
  uint32_t depth;
  double base;
} EdTower;

// Rectangle `center ± (half_width, half_height)` or disk of `radius`.
typedef struct EdRegion {
  enum EdRegionKind kind;
  struct EdComplex center;
  double half_width;
  double half_height;
  double radius;
} EdRegion;

// Quadrature settings; pass NULL for the defaults (32, 24, 1e-3).
typedef struct EdGrid {
  size_t base_resolution;
  size_t max_refinements;
  double rel_tol;
} EdGrid;

typedef struct EdAreaResult {
  double value;
  double log_value;
  double error_estimate;
  int converged;
} EdAreaResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// Valid until the next call on the same thread.
const char *ed_last_error(void);

// Parses a descriptor such as `{"variant":"exp_affine","lambda":[1,0]}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum EdStatus ed_function_from_json(const char *json, struct EdFunction **out);

// # Safety
// `f` must come from [`ed_function_from_json`] and not be used afterwards.
void ed_function_free(struct EdFunction *f);

// # Safety
// `f` must be a live handle; `out` writable.
enum EdStatus ed_eval(const struct EdFunction *f, struct EdComplex z, struct EdComplex *out);

// # Safety
// `f` must be a live handle; `out` writable.
enum EdStatus ed_derivative(const struct EdFunction *f, struct EdComplex z, struct EdComplex *out);

// `log M(r, f)`.
//
// # Safety
// `f` must be a live handle; `out` writable.
enum EdStatus ed_log_max_modulus(const struct EdFunction *f, double r, double *out);

// Writes `Mᵏ(r0, f)` for `k = 0..len` into `out`.
//
// # Safety
// `f` must be a live handle; `out` must hold `len` elements.
enum EdStatus ed_iterated_max_modulus(const struct EdFunction *f,
                                      double r0,
                                      size_t len,
                                      struct EdTower *out);

// `-1`, `0` or `1` as `a` is below, equal to (within rounding) or above `b`.
int ed_tower_compare(struct EdTower a, struct EdTower b);

// Finite-horizon upper and lower Lyapunov exponents.
//
// # Safety
// `f` must be a live handle; `upper` and `lower` writable.
enum EdStatus ed_lyapunov(const struct EdFunction *f,
                          struct EdComplex z,
                          size_t horizon,
                          double *upper,
                          double *lower);

// Fast-escaping test; `l` receives the smallest shift or `-1`.
//
// # Safety
// `f` must be a live handle; `member` and `l` writable.
enum EdStatus ed_fast_escaping(const struct EdFunction *f,
                               struct EdComplex z,
                               double r,
                               size_t l_max,
                               size_t n_max,
                               int *member,
                               int *l);

// Normalized spherical area `S(U, fⁿ)`.
//
// # Safety
// `f` must be a live handle; `u` readable; `g` NULL or readable; `out` writable.
enum EdStatus ed_spherical_area(const struct EdFunction *f,
                                const struct EdRegion *u,
                                size_t n,
                                const struct EdGrid *g,
                                struct EdAreaResult *out);

// `log μ(U, fⁿ)`.
//
// # Safety
// `f` must be a live handle; `u` readable; `g` NULL or readable; `out` writable.
enum EdStatus ed_mu_sup(const struct EdFunction *f,
                        const struct EdRegion *u,
                        size_t n,
                        const struct EdGrid *g,
                        double *out);

// Nevanlinna characteristic `T(r, f)`.
//
// # Safety
// `f` must be a live handle; `out` writable.
enum EdStatus ed_nevanlinna_t(const struct EdFunction *f, double r, double *out);

// Library version, NUL-terminated and static.
const char *ed_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTIRE_DYNAMICS_H */
