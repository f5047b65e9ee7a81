#ifndef SMOOTHCX_H
#define SMOOTHCX_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which DOT picture [`smx_export_dot`] draws.
 */
typedef enum {
  SMX_DOT_GAMMA = 0,
  SMX_DOT_BIFTREE = 1,
  SMX_DOT_PARTITION_TREE = 2,
  SMX_DOT_WITNESS = 3,
} smx_dot;

/**
 * Status codes. Zero is success.
 */
typedef enum {
  SMX_STATUS_OK = 0,
  SMX_STATUS_NULL_POINTER = 1,
  SMX_STATUS_INVALID_UTF8 = 2,
  SMX_STATUS_PARSE = 3,
  /**
   * The instance has no object of the requested kind (e.g. a witness for a
   * non-smoothable instance).
   */
  SMX_STATUS_UNAVAILABLE = 4,
  /**
   * A report failed re-verification.
   */
  SMX_STATUS_REJECTED = 5,
  SMX_STATUS_INTERNAL = 6,
} smx_status;

typedef enum {
  SMX_VERDICT_NOT_DIAGRAMMATIC = 0,
  SMX_VERDICT_NOT_SOLVABLE = 1,
  SMX_VERDICT_IGC_INFEASIBLE = 2,
  SMX_VERDICT_SMOOTHABLE = 3,
} smx_verdict;

/**
 * A parsed series presentation.
 */
typedef struct smx_instance smx_instance;

/**
 * The decision for one instance together with its JSON report.
 */
typedef struct smx_report smx_report;

/**
 * Version string of the library. Static, never freed.
 */
const char *smx_version(void);

/**
 * Message for the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *smx_last_error(void);

/**
 * Parses an instance document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
smx_status smx_instance_parse(const char *json, smx_instance **out);

/**
 * # Safety
 * `inst` must come from [`smx_instance_parse`] and not be used afterwards. NULL is ignored.
 */
void smx_instance_free(smx_instance *inst);

/**
 * Total degree of the instance's series.
 *
 * # Safety
 * `inst` must be a live handle or NULL (which yields 0).
 */
uint32_t smx_instance_degree(const smx_instance *inst);

/**
 * Canonical JSON for the instance.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
smx_status smx_instance_to_json(const smx_instance *inst, char **out);

/**
 * Decides smoothability. With `witness` set, a smoothable verdict carries a
 * harmonic morphism that has already been verified.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
smx_status smx_decide(const smx_instance *inst, bool witness, smx_report **out);

/**
 * # Safety
 * `rep` must be a live report handle.
 */
smx_status smx_report_verdict(const smx_report *rep, smx_verdict *out);

/**
 * Degree of the witness morphism, 0 when the report carries none.
 *
 * # Safety
 * `rep` must be a live report handle or NULL.
 */
uint32_t smx_report_witness_degree(const smx_report *rep);

/**
 * The report as JSON. Borrowed from the handle; valid until [`smx_report_free`].
 *
 * # Safety
 * `rep` must be a live report handle or NULL (which yields NULL).
 */
const char *smx_report_json(const smx_report *rep);

/**
 * # Safety
 * `rep` must come from [`smx_decide`] and not be used afterwards. NULL is ignored.
 */
void smx_report_free(smx_report *rep);

/**
 * Rebuilds the morphism stored in a SMOOTHABLE report and verifies it against
 * `inst`. Returns `Rejected` if it does not verify.
 *
 * # Safety
 * `inst` must be a live handle and `report_json` a NUL-terminated string.
 */
smx_status smx_check_witness(const smx_instance *inst, const char *report_json);

/**
 * Draws one of the instance's pictures in DOT.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
smx_status smx_export_dot(const smx_instance *inst, smx_dot what, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. NULL is ignored.
 */
void smx_string_free(char *s);

#endif  /* SMOOTHCX_H */
