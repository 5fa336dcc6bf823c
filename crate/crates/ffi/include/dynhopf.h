#ifndef DYNHOPF_H
#define DYNHOPF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call. The first three match the CLI exit codes.
typedef enum DynhopfStatus {
  DYNHOPF_STATUS_OK = 0,
  DYNHOPF_STATUS_CHECKS_FAILED = 1,
  DYNHOPF_STATUS_INVALID_SPEC = 2,
  DYNHOPF_STATUS_NULL_ARGUMENT = 3,
  DYNHOPF_STATUS_INVALID_UTF8 = 4,
  DYNHOPF_STATUS_PANIC = 5,
} DynhopfStatus;

// A JSON report or dump.
typedef struct DynhopfDocument DynhopfDocument;

// A run specification under construction.
typedef struct DynhopfSpec DynhopfSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a spec for `cartan` ("A1", "A2") at `ell`, with default Λ = 2,
// seed 0, threshold 512 and all suites.
//
// # Safety
// `cartan` must be a NUL-terminated string and `out` a valid pointer.
enum DynhopfStatus dynhopf_spec_new(const char *cartan, uint32_t ell, struct DynhopfSpec **out);

// # Safety
// `spec` must come from [`dynhopf_spec_new`] and not be used afterwards.
void dynhopf_spec_free(struct DynhopfSpec *spec);

// Comma-separated rationals, e.g. "2,3/2".
//
// # Safety
// `spec` must be a live spec and `values` a NUL-terminated string.
enum DynhopfStatus dynhopf_spec_set_lambda(struct DynhopfSpec *spec, const char *values);

// "id", "swap", "empty" or a map such as "0>1,1>0"; NULL clears it.
//
// # Safety
// `spec` must be a live spec; `triple` is NULL or a NUL-terminated string.
enum DynhopfStatus dynhopf_spec_set_triple(struct DynhopfSpec *spec, const char *triple);

// Comma-separated suite names, or "all".
//
// # Safety
// `spec` must be a live spec and `suites` a NUL-terminated string.
enum DynhopfStatus dynhopf_spec_set_suites(struct DynhopfSpec *spec, const char *suites);

// # Safety
// `spec` must be a live spec.
enum DynhopfStatus dynhopf_spec_set_seed(struct DynhopfSpec *spec, uint64_t seed);

// # Safety
// `spec` must be a live spec.
enum DynhopfStatus dynhopf_spec_set_threshold(struct DynhopfSpec *spec, size_t threshold);

// Runs the selected suites. On return `*out` holds the report, also when
// checks failed or the run arguments were invalid.
//
// # Safety
// `spec` must be a live spec and `out` a valid pointer.
enum DynhopfStatus dynhopf_verify(const struct DynhopfSpec *spec, struct DynhopfDocument **out);

// Dumps "J", "curlyJ", "R_lambda", "H_structure" or "ranks".
//
// # Safety
// `spec` must be a live spec, `what` a NUL-terminated string and `out` a
// valid pointer.
enum DynhopfStatus dynhopf_dump(const struct DynhopfSpec *spec,
                                const char *what,
                                struct DynhopfDocument **out);

// The document as NUL-terminated JSON, owned by `doc`.
//
// # Safety
// `doc` must be NULL or a live document.
const char *dynhopf_document_json(const struct DynhopfDocument *doc);

// The CLI exit code of the run that produced `doc`, or -1 for NULL.
//
// # Safety
// `doc` must be NULL or a live document.
int32_t dynhopf_document_exit_code(const struct DynhopfDocument *doc);

// # Safety
// `doc` must come from [`dynhopf_verify`] or [`dynhopf_dump`] and not be
// used afterwards.
void dynhopf_document_free(struct DynhopfDocument *doc);

// Static description of a status code.
const char *dynhopf_status_message(enum DynhopfStatus status);

const char *dynhopf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNHOPF_H */
