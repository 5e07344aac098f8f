#ifndef NONLOCAL_GRAPHS_H
#define NONLOCAL_GRAPHS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NlgBoundary {
  NLG_BOUNDARY_LEFT = 0,
  NLG_BOUNDARY_RIGHT = 1,
} NlgBoundary;

typedef enum NlgMethod {
  NLG_METHOD_DAMPED_NEWTON = 0,
  NLG_METHOD_PRECONDITIONED_GRADIENT = 1,
} NlgMethod;

// Status of a call. `NLG_STATUS_OK` is zero.
typedef enum NlgStatus {
  NLG_STATUS_OK = 0,
  NLG_STATUS_NULL_POINTER = 1,
  NLG_STATUS_INVALID_ORDER = 2,
  NLG_STATUS_INVALID_GRID = 3,
  NLG_STATUS_INVALID_DATUM = 4,
  NLG_STATUS_INVALID_CONFIG = 5,
  NLG_STATUS_NOT_CONVERGED = 6,
  NLG_STATUS_QUADRATURE = 7,
  NLG_STATUS_IO = 8,
  // The computation failed for another reason; see the message.
  NLG_STATUS_FAILED = 9,
  NLG_STATUS_PANIC = 10,
} NlgStatus;

// Exterior datum `u₀` on `ℝ ∖ (0, 1)`.
typedef struct NlgDatum NlgDatum;

// Minimizer on one grid with its diagnostics.
typedef struct NlgSolution NlgSolution;

// Solver settings; zero fields select the defaults.
typedef struct NlgSolveParams {
  double s;
  // Grid spacing is `1 / cells_per_unit`.
  size_t cells_per_unit;
  double truncation;
  double tolerance;
  size_t max_iterations;
  enum NlgMethod method;
} NlgSolveParams;

// Planar curvature sample. `value` is `±inf` at a corner.
typedef struct NlgCurvature {
  double value;
  double estimated_error;
} NlgCurvature;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *nlg_version(void);

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *nlg_last_error_message(void);

// Solver defaults: `s = 0.5`, `h = 1/64`, `L = 4`, tolerance `1e-9`.
struct NlgSolveParams nlg_solve_params_default(void);

// `slope · x + intercept`.
//
// # Safety
// `out` must be a valid pointer.
enum NlgStatus nlg_datum_linear(double slope, double intercept, struct NlgDatum **out);

// Two symmetric bumps of the given height and half-width touching the walls from outside.
//
// # Safety
// `out` must be a valid pointer.
enum NlgStatus nlg_datum_two_bump(double height, double width, struct NlgDatum **out);

// Linear base plus `count` bumps `height·(1 - ((x - center)/width)²)³`.
//
// # Safety
// `out` must be valid; the three arrays must hold `count` values each.
enum NlgStatus nlg_datum_bumps(double slope,
                               double intercept,
                               const double *centers,
                               const double *widths,
                               const double *heights,
                               size_t count,
                               struct NlgDatum **out);

// # Safety
// `datum` must come from an `nlg_datum_*` constructor, or be null.
void nlg_datum_free(struct NlgDatum *datum);

// Minimizes for `datum`. A solution is stored even when the iteration did
// not converge, in which case `NLG_STATUS_NOT_CONVERGED` is returned.
//
// # Safety
// `datum` and `params` must be valid handles, `out` a valid pointer.
enum NlgStatus nlg_solve(const struct NlgDatum *datum,
                         const struct NlgSolveParams *params,
                         struct NlgSolution **out);

// # Safety
// `solution` must come from [`nlg_solve`], or be null.
void nlg_solution_free(struct NlgSolution *solution);

// Number of grid nodes, exterior included. Zero for a null handle.
//
// # Safety
// `solution` must be a valid handle or null.
size_t nlg_solution_len(const struct NlgSolution *solution);

// Copies node positions and values into `x` and `u` (either may be null).
//
// # Safety
// Non-null buffers must hold `len` values; `len` must equal [`nlg_solution_len`].
enum NlgStatus nlg_solution_copy(const struct NlgSolution *solution,
                                 double *x,
                                 double *u,
                                 size_t len);

// # Safety
// `solution` must be a valid handle.
size_t nlg_solution_iterations(const struct NlgSolution *solution);

// Sup-norm of the final energy gradient; NaN for a null handle.
//
// # Safety
// `solution` must be a valid handle.
double nlg_solution_gradient_norm(const struct NlgSolution *solution);

// # Safety
// `solution` must be a valid handle.
bool nlg_solution_converged(const struct NlgSolution *solution);

// `u(first interior node) - u₀(wall)`; NaN for a null handle.
//
// # Safety
// `solution` must be a valid handle.
double nlg_solution_wall_jump(const struct NlgSolution *solution, enum NlgBoundary side);

// Nonlocal curvature of the disk of the given radius at the boundary point
// with polar angle `angle`.
//
// # Safety
// `out` must be a valid pointer.
enum NlgStatus nlg_disk_curvature(double s,
                                  double radius,
                                  double angle,
                                  double tolerance,
                                  struct NlgCurvature *out);

// Runs a TOML scenario document. `output_dir` may be null to skip file
// output. On success `*report_json` receives the JSON report without
// timings; release it with [`nlg_string_free`].
//
// # Safety
// String arguments must be NUL-terminated; `report_json` must be valid.
enum NlgStatus nlg_run_scenario(const char *config_toml,
                                const char *output_dir,
                                char **report_json);

// # Safety
// `text` must come from this library, or be null.
void nlg_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NONLOCAL_GRAPHS_H */
