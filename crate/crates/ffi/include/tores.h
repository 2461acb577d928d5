#ifndef TORES_H
#define TORES_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result of a call.
 */
typedef enum ToresStatus {
  TORES_STATUS_OK = 0,
  TORES_STATUS_NULL_ARGUMENT = 1,
  TORES_STATUS_INVALID_UTF8 = 2,
  /**
   * The program has parse, scope, kind or type errors.
   */
  TORES_STATUS_DIAGNOSTICS = 3,
  TORES_STATUS_UNKNOWN_DEFINITION = 4,
  TORES_STATUS_NOT_STREAM = 5,
  TORES_STATUS_FUEL_EXHAUSTED = 6,
  /**
   * Evaluation got stuck; indicates a bug in the checker or evaluator.
   */
  TORES_STATUS_INTERNAL = 7,
  TORES_STATUS_PANIC = 8,
} ToresStatus;

/**
 * A parsed and checked source file.
 */
typedef struct ToresProgram ToresProgram;

/**
 * Message for the last failed call on this thread. Empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *tores_last_error(void);

/**
 * Library version, a static string.
 */
const char *tores_version(void);

/**
 * Parse and check `src`. `file` names the source in diagnostics.
 *
 * On `Ok` and on `Diagnostics`, `*out` receives a program to be released
 * with [`tores_program_free`]; declarations that checked remain usable.
 *
 * # Safety
 * `file` and `src` must be null or NUL-terminated strings; `out` must be
 * null or valid for writes.
 */
enum ToresStatus tores_program_load(const char *file, const char *src, struct ToresProgram **out);

/**
 * # Safety
 * `program` must be null or a pointer from [`tores_program_load`] that has
 * not been freed.
 */
void tores_program_free(struct ToresProgram *program);

/**
 * Number of diagnostics reported while loading.
 *
 * # Safety
 * `program` must be null or a live program.
 */
size_t tores_program_diagnostic_count(const struct ToresProgram *program);

/**
 * Diagnostics as a JSON array. Owned by the program; null if `program` is.
 *
 * # Safety
 * `program` must be null or a live program.
 */
const char *tores_program_diagnostics_json(const struct ToresProgram *program);

/**
 * Number of declarations that checked.
 *
 * # Safety
 * `program` must be null or a live program.
 */
size_t tores_program_decl_count(const struct ToresProgram *program);

/**
 * Name of the `index`-th checked declaration, or null when out of range.
 * Release with [`tores_string_free`].
 *
 * # Safety
 * `program` must be null or a live program.
 */
char *tores_program_decl_name(const struct ToresProgram *program, size_t index);

/**
 * Whether the `index`-th checked declaration is a definition (1), a type
 * (0), or out of range (-1).
 *
 * # Safety
 * `program` must be null or a live program.
 */
int32_t tores_program_decl_is_def(const struct ToresProgram *program, size_t index);

/**
 * Evaluate the definition `name` with at most `fuel` rule applications.
 * On success `*value_out` receives the printed value. `steps_out` may be
 * null; otherwise it receives the number of rule applications used.
 *
 * # Safety
 * `program` must be null or a live program, `name` null or a
 * NUL-terminated string, `value_out` null or valid for writes, `steps_out`
 * null or valid for writes.
 */
enum ToresStatus tores_program_run(const struct ToresProgram *program,
                                   const char *name,
                                   uint64_t fuel,
                                   char **value_out,
                                   uint64_t *steps_out);

/**
 * Observe the first `count` heads of the stream `name`. On success
 * `*json_out` receives a JSON array of printed values.
 *
 * # Safety
 * As for [`tores_program_run`].
 */
enum ToresStatus tores_program_take(const struct ToresProgram *program,
                                    const char *name,
                                    size_t count,
                                    uint64_t fuel,
                                    char **json_out,
                                    uint64_t *steps_out);

/**
 * Pretty-print `src` in canonical layout.
 *
 * # Safety
 * `src` must be null or a NUL-terminated string; `out` null or valid for
 * writes.
 */
enum ToresStatus tores_format(const char *src, char **out);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library that has not been
 * freed.
 */
void tores_string_free(char *s);

#endif  /* TORES_H */
