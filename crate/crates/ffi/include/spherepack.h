/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef SPHEREPACK_H
#define SPHEREPACK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SP_KIND_SPHERE 0

#define SP_KIND_CUBE 1

typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_INVALID_ARGUMENT = 1,
  SP_STATUS_NULL_POINTER = 2,
  SP_STATUS_UPPER_BOUND_INFEASIBLE = 3,
  SP_STATUS_CERTIFICATION_FAILED = 4,
  SP_STATUS_NOT_IN_TABLE = 5,
  SP_STATUS_PARSE = 6,
  SP_STATUS_IO = 7,
  SP_STATUS_PANIC = 8,
} SpStatus;

// Result of a solve: a certified packing of spheres of radius 0.5.
typedef struct SpOutcome SpOutcome;

// A packing read from a file.
typedef struct SpPacking SpPacking;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer stays
// valid until the next call into this library from the same thread.
const char *sp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *sp_version(void);

// Searches for a dense packing of `n` spheres and stores the densest of `runs`
// seeded runs (seeds `seed`, `seed + 1`, ...) in `*out`.
//
// A non-positive `r0_estimate` selects the default search radius.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum SpStatus sp_solve(uint32_t n,
                       uint32_t kind,
                       double r0_estimate,
                       uint64_t seed,
                       uint32_t runs,
                       struct SpOutcome **out);

// Releases an outcome. Null is ignored.
//
// # Safety
// `outcome` must come from [`sp_solve`] and not have been freed already.
void sp_outcome_free(struct SpOutcome *outcome);

// `r / r0` of the packing, or NaN for a null handle.
//
// # Safety
// `outcome` must be null or a live handle.
double sp_outcome_ratio(const struct SpOutcome *outcome);

// Container radius of the packing, or NaN for a null handle.
//
// # Safety
// `outcome` must be null or a live handle.
double sp_outcome_r0_min(const struct SpOutcome *outcome);

// Number of spheres, or 0 for a null handle.
//
// # Safety
// `outcome` must be null or a live handle.
size_t sp_outcome_len(const struct SpOutcome *outcome);

// Copies the `3 n` center coordinates into `out`.
//
// # Safety
// `outcome` must be a live handle and `out` must point to `len` writable doubles.
enum SpStatus sp_outcome_centers(const struct SpOutcome *outcome, double *out, size_t len);

// Writes the packing in the text format read by [`sp_packing_load`].
//
// # Safety
// `outcome` must be a live handle and `path` a NUL-terminated string.
enum SpStatus sp_outcome_save(const struct SpOutcome *outcome, const char *path);

// Reads a packing file into `*out`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` valid for one handle.
enum SpStatus sp_packing_load(const char *path, struct SpPacking **out);

// Releases a loaded packing. Null is ignored.
//
// # Safety
// `packing` must come from [`sp_packing_load`] and not have been freed already.
void sp_packing_free(struct SpPacking *packing);

// Number of spheres, or 0 for a null handle.
//
// # Safety
// `packing` must be null or a live handle.
size_t sp_packing_len(const struct SpPacking *packing);

// Container radius, or NaN for a null handle.
//
// # Safety
// `packing` must be null or a live handle.
double sp_packing_r0(const struct SpPacking *packing);

// Sphere radius, or NaN for a null handle.
//
// # Safety
// `packing` must be null or a live handle.
double sp_packing_radius(const struct SpPacking *packing);

// Container kind code.
//
// # Safety
// `packing` must be a live handle and `out` valid for one value.
enum SpStatus sp_packing_kind(const struct SpPacking *packing, uint32_t *out);

// Copies the `3 n` center coordinates into `out`.
//
// # Safety
// `packing` must be a live handle and `out` must point to `len` writable doubles.
enum SpStatus sp_packing_centers(const struct SpPacking *packing, double *out, size_t len);

// Exact feasibility check of `n` spheres of radius `r` in the container.
//
// # Safety
// `centers` must point to `3 n` doubles and `valid` to one writable bool.
enum SpStatus sp_verify_exact(const double *centers,
                              size_t n,
                              double r,
                              double r0,
                              uint32_t kind,
                              bool *valid);

// Overlap energy of `n` spheres of radius `r` in the container.
//
// # Safety
// `centers` must point to `3 n` doubles and `out` to one writable double.
enum SpStatus sp_total_energy(const double *centers,
                              size_t n,
                              double r,
                              double r0,
                              uint32_t kind,
                              double *out);

// Best known `r / r0` from the bundled table.
//
// # Safety
// `out` must point to one writable double.
enum SpStatus sp_record_ratio(uint32_t n, uint32_t kind, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHEREPACK_H */
