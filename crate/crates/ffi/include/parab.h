#ifndef PARAB_H
#define PARAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum ParabStatus {
  PARAB_STATUS_OK = 0,
  PARAB_STATUS_NULL_POINTER = 1,
  PARAB_STATUS_INVALID_PARAMETER = 2,
  PARAB_STATUS_INDEX_OUT_OF_RANGE = 3,
  PARAB_STATUS_POINT_OUTSIDE_DOMAIN = 4,
  PARAB_STATUS_UNSUPPORTED_DIMENSION = 5,
  PARAB_STATUS_INVALID_CONFIG = 6,
  PARAB_STATUS_NO_CONVERGENCE = 7,
  PARAB_STATUS_INVALID_UTF8 = 8,
  PARAB_STATUS_IO = 9,
  PARAB_STATUS_PANIC = 10,
} ParabStatus;

// Harness configuration for one command on one domain.
typedef struct ParabConfig ParabConfig;

// Rows produced by [`parab_run`].
typedef struct ParabReport ParabReport;

// Weight `w_{a,b}` on the parabolic domain 𝕌.
typedef struct ParabWeightU ParabWeightU;

// Weight `W_{β,γ,μ}` on the solid paraboloid.
typedef struct ParabWeightV ParabWeightV;

// Weight `ϖ_{β,γ}` on the paraboloid surface.
typedef struct ParabWeightV0 ParabWeightV0;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of the calling thread into `buf` as a
// NUL-terminated string, truncating to `len - 1` bytes. Returns the full
// message length without the terminator; `buf` may be null to query it.
size_t parab_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *parab_version(void);

enum ParabStatus parab_weight_u_new(double a, double b, struct ParabWeightU **out);

void parab_weight_u_free(struct ParabWeightU *w);

// Orthogonal polynomial `P_{k,n}` (not normalized) at `(x1, x2)`, `0 ≤ k ≤ n`.
enum ParabStatus parab_u_basis(const struct ParabWeightU *w,
                               size_t k,
                               size_t n,
                               double x1,
                               double x2,
                               double *out);

// Reproducing kernel of the degree-`n` component at `(x, y)`.
enum ParabStatus parab_u_kernel(const struct ParabWeightU *w,
                                size_t n,
                                double x1,
                                double x2,
                                double y1,
                                double y2,
                                double *out);

// `(C, δ)` kernel of order `n` at `(x, y)`.
enum ParabStatus parab_u_cesaro_kernel(const struct ParabWeightU *w,
                                       size_t n,
                                       double delta,
                                       double x1,
                                       double x2,
                                       double y1,
                                       double y2,
                                       double *out);

enum ParabStatus parab_weight_v0_new(size_t d,
                                     double beta,
                                     double gamma,
                                     struct ParabWeightV0 **out);

void parab_weight_v0_free(struct ParabWeightV0 *w);

// Basis element `Q_{m,ℓ}^n` at the surface point `(√t ξ, t)`; `xi` is a unit
// vector of length `d`.
enum ParabStatus parab_v0_basis(const struct ParabWeightV0 *w,
                                size_t n,
                                size_t m,
                                size_t ell,
                                const double *xi,
                                double t,
                                double *out);

// Reproducing kernel of the degree-`n` component at surface points.
enum ParabStatus parab_v0_kernel(const struct ParabWeightV0 *w,
                                 size_t n,
                                 const double *xi,
                                 double t,
                                 const double *eta,
                                 double s,
                                 double *out);

// `(C, δ)` kernel with one point on the rim `t = 1`; requires `β = -1/2`.
// `xi` is the rim point.
enum ParabStatus parab_v0_cesaro_kernel_rim(const struct ParabWeightV0 *w,
                                            size_t n,
                                            double delta,
                                            const double *xi,
                                            const double *eta,
                                            double s,
                                            double *out);

enum ParabStatus parab_weight_v_new(size_t d,
                                    double beta,
                                    double gamma,
                                    double mu,
                                    struct ParabWeightV **out);

void parab_weight_v_free(struct ParabWeightV *w);

// Basis element `𝐐_{m,(j,ℓ)}^n` at `(x, t)` with `|x|² ≤ t ≤ 1`.
enum ParabStatus parab_v_basis(const struct ParabWeightV *w,
                               size_t n,
                               size_t m,
                               size_t j,
                               size_t ell,
                               const double *x,
                               double t,
                               double *out);

// Reproducing kernel of the degree-`n` component; requires `β ≥ 0`, `μ ≥ 0`.
enum ParabStatus parab_v_kernel(const struct ParabWeightV *w,
                                size_t n,
                                const double *x,
                                double t,
                                const double *y,
                                double s,
                                double *out);

// `(C, δ)` kernel with one point `(x, 1)` on the top; requires `β = 0`.
enum ParabStatus parab_v_cesaro_kernel_top(const struct ParabWeightV *w,
                                           size_t n,
                                           double delta,
                                           const double *x,
                                           const double *y,
                                           double s,
                                           double *out);

// New configuration with defaults; `command` is a CLI command name such as
// `"ortho-check"` and `domain` one of `"U"`, `"V0"`, `"V"`.
enum ParabStatus parab_config_new(const char *command,
                                  const char *domain,
                                  struct ParabConfig **out);

void parab_config_free(struct ParabConfig *c);

// Sets one key with the same names and syntax as a config file line.
enum ParabStatus parab_config_set(struct ParabConfig *c, const char *key, const char *value);

// Runs the configured command. Check failures are not an error: inspect
// [`parab_report_all_pass`].
enum ParabStatus parab_run(const struct ParabConfig *c, struct ParabReport **out);

void parab_report_free(struct ParabReport *r);

// Number of rows, or 0 for a null handle.
size_t parab_report_len(const struct ParabReport *r);

// 1 if every row passes, 0 otherwise or for a null handle.
int32_t parab_report_all_pass(const struct ParabReport *r);

// Measured value, tolerance and pass flag of row `i`.
enum ParabStatus parab_report_row(const struct ParabReport *r,
                                  size_t i,
                                  double *measured,
                                  double *tolerance,
                                  int32_t *pass);

// Writes the report as CSV to `path`.
enum ParabStatus parab_report_write_csv(const struct ParabReport *r, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARAB_H */
