#ifndef CTX_H
#define CTX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CtxStatus {
  CTX_STATUS_OK = 0,
  CTX_STATUS_NULL_POINTER = 1,
  CTX_STATUS_INVALID_UTF8 = 2,
  CTX_STATUS_PARSE = 3,
  CTX_STATUS_VALIDATION = 4,
  CTX_STATUS_INCOMPATIBLE = 5,
  CTX_STATUS_UNKNOWN_BUILTIN = 6,
  CTX_STATUS_WRONG_SEMIRING = 7,
  CTX_STATUS_LIMIT = 8,
  CTX_STATUS_FAILED = 9,
  CTX_STATUS_PANIC = 10,
} CtxStatus;

/**
 * Opaque model handle.
 */
typedef struct CtxModel CtxModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a model from its JSON encoding.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CtxStatus ctx_model_from_json(const char *json, struct CtxModel **out);

/**
 * Builtin model by name: bell, hardy, pr, ghz, specker or liar:N.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CtxStatus ctx_model_builtin(const char *name, struct CtxModel **out);

/**
 * # Safety
 * `model` must be null or a handle from this library not yet freed.
 */
void ctx_model_free(struct CtxModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum CtxStatus ctx_model_to_json(const struct CtxModel *model, char **out);

/**
 * Possibilistic collapse as a new handle.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum CtxStatus ctx_model_collapse(const struct CtxModel *model, struct CtxModel **out);

/**
 * Writes 0 (non-contextual), 1 (probabilistic), 2 (possibilistic) or
 * 3 (strong) to `level`.
 *
 * # Safety
 * `model` must be a live handle and `level` a writable pointer.
 */
enum CtxStatus ctx_classify(const struct CtxModel *model, uint8_t *level);

/**
 * Full contextuality report as JSON.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum CtxStatus ctx_classify_json(const struct CtxModel *model, char **out);

/**
 * Pairwise no-signalling check as JSON; succeeds for incompatible models too.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum CtxStatus ctx_compatibility_json(const struct CtxModel *model, char **out);

/**
 * Logical Bell inequality for the propositions in `props` (one per line),
 * or for the canonical support family when `props` is null.
 *
 * # Safety
 * `model` must be a live handle, `props` null or a NUL-terminated string,
 * and `out` a writable pointer.
 */
enum CtxStatus ctx_logical_bell_json(const struct CtxModel *model, const char *props, char **out);

/**
 * Bundle diagram of a rank-2 model as Graphviz DOT.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum CtxStatus ctx_bundle_dot(const struct CtxModel *model, char **out);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next library call on the same thread.
 */
const char *ctx_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void ctx_string_free(char *s);

/**
 * Library version, statically allocated.
 */
const char *ctx_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTX_H */
