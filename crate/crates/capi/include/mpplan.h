#ifndef MPPLAN_H
#define MPPLAN_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes for every fallible entry point.
typedef enum MppCode {
  MPP_OK = 0,
  MPP_ERR_NULL_ARGUMENT = 1,
  MPP_ERR_INVALID_ARGUMENT = 2,
  MPP_ERR_UTF8 = 3,
  MPP_ERR_DATA = 4,
  MPP_ERR_SOLVE = 5,
  MPP_ERR_NO_SOLUTION = 6,
  MPP_ERR_PANIC = 7,
} MppCode;

// Solver outcome, mirrored as a stable C enum.
typedef enum MppStatus {
  MPP_STATUS_OPTIMAL = 0,
  MPP_STATUS_FEASIBLE = 1,
  MPP_STATUS_INFEASIBLE = 2,
  MPP_STATUS_UNBOUNDED = 3,
  MPP_STATUS_TIME_LIMIT = 4,
  MPP_STATUS_NO_SOLUTION = 5,
  MPP_STATUS_NUMERICAL_FAILURE = 6,
} MppStatus;

// An immutable master-planning instance.
typedef struct MppInstance MppInstance;

// A finished solve: status, bounds and (for integer runs) the plan.
typedef struct MppResult MppResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message for this thread; valid until the next failing
// call on the same thread. Never null.
const char *mpp_last_error(void);

// Frees a string returned by this library. Null is accepted.
//
// # Safety
// `s` must have been returned by this library and not freed before.
void mpp_string_free(char *s);

// Parses an instance from JSON text.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid
// pointer.
enum MppCode mpp_instance_from_json(const char *json, struct MppInstance **out);

// Loads an instance from a JSON file on disk.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a valid
// pointer.
enum MppCode mpp_instance_load(const char *path, struct MppInstance **out);

// Generates a benchmark instance on a built-in synthetic vessel.
// `size_class` is 'S', 'M' or 'L'.
//
// # Safety
// `out` must be a valid pointer.
enum MppCode mpp_instance_generate(char size_class,
                                   uint32_t num_ports,
                                   double rob_fraction,
                                   double utilization,
                                   uint64_t seed,
                                   struct MppInstance **out);

// Frees an instance handle. Null is accepted.
//
// # Safety
// `inst` must be a live handle from this library, freed only once.
void mpp_instance_free(struct MppInstance *inst);

// Serialises the instance back to JSON (free with `mpp_string_free`).
//
// # Safety
// `inst` must be a live handle and `out` a valid pointer.
enum MppCode mpp_instance_to_json(const struct MppInstance *inst, char **out);

// Number of ports in the rotation.
//
// # Safety
// `inst` must be a live handle.
uint32_t mpp_instance_num_ports(const struct MppInstance *inst);

// Total container count across loadlist and release cargo.
//
// # Safety
// `inst` must be a live handle.
uint64_t mpp_instance_total_containers(const struct MppInstance *inst);

// Builds and solves a formulation. `formulation`: 0 assignment,
// 1 network-flow. `variant`: 0 full, 1 reduced. Relaxed solves drop
// integrality and return no plan.
//
// # Safety
// `inst` must be a live handle and `out` a valid pointer.
enum MppCode mpp_solve(const struct MppInstance *inst,
                       int32_t formulation,
                       int32_t variant,
                       bool relaxed,
                       double time_limit_s,
                       struct MppResult **out);

// Frees a result handle. Null is accepted.
//
// # Safety
// `result` must be a live handle from this library, freed only once.
void mpp_result_free(struct MppResult *result);

// # Safety
// `result` must be a live handle.
enum MppStatus mpp_result_status(const struct MppResult *result);

// Objective of the returned solution, NaN when there is none.
//
// # Safety
// `result` must be a live handle.
double mpp_result_objective(const struct MppResult *result);

// Best proven lower bound (minimisation).
//
// # Safety
// `result` must be a live handle.
double mpp_result_best_bound(const struct MppResult *result);

// Relative MIP gap, NaN when unavailable.
//
// # Safety
// `result` must be a live handle.
double mpp_result_gap(const struct MppResult *result);

// Wall-clock seconds spent solving.
//
// # Safety
// `result` must be a live handle.
double mpp_result_wall_time(const struct MppResult *result);

// Branch-and-bound node count.
//
// # Safety
// `result` must be a live handle.
uint64_t mpp_result_nodes(const struct MppResult *result);

// The extracted integral plan as JSON (free with `mpp_string_free`).
// Fails with `MppErrNoSolution` for relaxed or unsolved runs.
//
// # Safety
// `result` must be a live handle and `out` a valid pointer.
enum MppCode mpp_result_plan_json(const struct MppResult *result, char **out);

// Re-checks the plan of `result` against `inst` with the independent
// validator, writing the report JSON (free with `mpp_string_free`)
// and the feasibility verdict.
//
// # Safety
// Handles must be live; `report_out` and `feasible_out` must be valid
// pointers.
enum MppCode mpp_result_validate(const struct MppInstance *inst,
                                 const struct MppResult *result,
                                 double tol,
                                 char **report_out,
                                 bool *feasible_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPPLAN_H */
