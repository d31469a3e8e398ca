#ifndef RAMSEY_H
#define RAMSEY_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  RW_STATUS_OK = 0,
  /**
   * The property was checked and does not hold.
   */
  RW_STATUS_FAILS = 1,
  /**
   * A search or enumeration bound was hit before a decision.
   */
  RW_STATUS_UNKNOWN = 2,
  RW_STATUS_NULL_POINTER = 3,
  RW_STATUS_INVALID_UTF8 = 4,
  RW_STATUS_PARSE = 5,
  RW_STATUS_VIOLATION = 6,
  RW_STATUS_INVALID_ARGUMENT = 7,
  RW_STATUS_INTERNAL = 8,
} RwStatus;

/**
 * Opaque parsed structure.
 */
typedef struct RwStructure RwStructure;

/**
 * Outcome of a `rw_check_arrow` call.
 */
typedef struct {
  /**
   * 0 holds, 1 fails, 2 unknown.
   */
  int outcome;
  size_t a_copies;
  size_t b_copies;
  uint64_t nodes;
} RwArrowResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call on the same thread.
 */
const char *rw_last_error(void);

/**
 * Library version as a static string.
 */
const char *rw_version(void);

/**
 * # Safety
 * `s` must come from this library or be NULL.
 */
void rw_string_free(char *s);

/**
 * Parses and validates a JSON structure document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
RwStatus rw_structure_from_json(const char *json, RwStructure **out);

/**
 * `Π_n` as an ordered poset handle.
 *
 * # Safety
 * `out` must be writable.
 */
RwStatus rw_pi(size_t n, RwStructure **out);

/**
 * # Safety
 * `h` must come from this library or be NULL.
 */
void rw_structure_free(RwStructure *h);

/**
 * Number of elements, or 0 for a NULL handle.
 *
 * # Safety
 * `h` must be a live handle or NULL.
 */
size_t rw_structure_len(const RwStructure *h);

/**
 * Serializes a structure back to JSON.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
RwStatus rw_structure_to_json(const RwStructure *h, char **out);

/**
 * Decides `host → (target)^pattern_k` for ordered posets. A `node_limit` of
 * 0 means the library default.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
RwStatus rw_check_arrow(const RwStructure *host,
                        const RwStructure *pattern,
                        const RwStructure *target,
                        size_t colors,
                        uint64_t node_limit,
                        RwArrowResult *out);

/**
 * Exhaustive ordering-property check of `witness` for `base`; both must
 * carry a single partial order. Returns `Ok`, `Fails` or `Unknown`.
 *
 * # Safety
 * Handles must be live.
 */
RwStatus rw_verify_op_witness(const RwStructure *base,
                              const RwStructure *witness,
                              uint64_t extension_limit);

/**
 * Evaluates `identity` (`lhs = rhs`) on a lattice: `Ok` when it holds,
 * `Fails` otherwise.
 *
 * # Safety
 * `lattice` must be live; `identity` NUL-terminated.
 */
RwStatus rw_satisfies_identity(const RwStructure *lattice, const char *identity);

/**
 * Runs the command-line front end in-process. `argv[0]` is the program
 * name. The report goes to `*report` and the exit code to `*exit_code`.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings; outputs must be writable.
 */
RwStatus rw_run_cli(const char *const *argv, size_t argc, char **report, int *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RAMSEY_H */
