#ifndef COOPSYNC_H
#define COOPSYNC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every exported call.
typedef enum CoopsyncStatus {
  COOPSYNC_STATUS_OK = 0,
  // A required pointer argument was null.
  COOPSYNC_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  COOPSYNC_STATUS_INVALID_UTF8 = 2,
  // An input text did not parse.
  COOPSYNC_STATUS_PARSE = 3,
  // An input parsed but does not conform or does not check.
  COOPSYNC_STATUS_INVALID = 4,
  COOPSYNC_STATUS_UNKNOWN_VIEW = 5,
  COOPSYNC_STATUS_UNKNOWN_ROLE = 6,
  COOPSYNC_STATUS_UNKNOWN_ELEMENT = 7,
  COOPSYNC_STATUS_UNKNOWN_SESSION = 8,
  // The caller's graph version is not the current one.
  COOPSYNC_STATUS_STALE = 9,
  // The engine panicked; the handle should not be used again.
  COOPSYNC_STATUS_INTERNAL = 10,
} CoopsyncStatus;

// Opaque engine handle.
typedef struct CoopsyncWorkspace CoopsyncWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a workspace from the texts of a domain model (`.cdm`), a project
// (`.cpj`) and a rule file (`.cvt`), with the built-in views. A negative
// `max_hops` keeps the default correlation depth.
//
// # Safety
// The text arguments must be NUL-terminated strings and `out` writable.
enum CoopsyncStatus coopsync_workspace_open(const char *model,
                                            const char *project,
                                            const char *rules,
                                            int32_t max_hops,
                                            struct CoopsyncWorkspace **out);

// Releases a workspace. Null is ignored.
//
// # Safety
// `ws` must come from [`coopsync_workspace_open`] and not be used after.
void coopsync_workspace_free(struct CoopsyncWorkspace *ws);

// Current graph version.
//
// # Safety
// `ws` must be a live handle and `out` writable.
enum CoopsyncStatus coopsync_graph_version(const struct CoopsyncWorkspace *ws, uint64_t *out);

// Content document of `view` as seen by `role`, byte-identical to the
// `transform` command and the HTTP content endpoint.
//
// # Safety
// `ws` must be a live handle, `view` and `role` NUL-terminated, `out`
// writable. The string written to `out` is owned by the caller.
enum CoopsyncStatus coopsync_view_content(const struct CoopsyncWorkspace *ws,
                                          const char *view,
                                          const char *role,
                                          char **out);

// Schema document of `view`.
//
// # Safety
// As for [`coopsync_view_content`].
enum CoopsyncStatus coopsync_view_schema(const struct CoopsyncWorkspace *ws,
                                         const char *view,
                                         char **out);

// Opens a session for `role` arranged over every view and writes its id.
//
// # Safety
// `ws` must be a live handle, `role` NUL-terminated, `out` writable.
enum CoopsyncStatus coopsync_session_open(const struct CoopsyncWorkspace *ws,
                                          const char *role,
                                          uint64_t *out);

// # Safety
// `ws` must be a live handle.
enum CoopsyncStatus coopsync_session_close(const struct CoopsyncWorkspace *ws, uint64_t session);

// Selects `key` (`Concept/key`) in `view` and writes the resulting
// highlight message, encoded as on the websocket channel.
//
// # Safety
// `ws` must be a live handle, `view` and `key` NUL-terminated, `out`
// writable. The string written to `out` is owned by the caller.
enum CoopsyncStatus coopsync_select(const struct CoopsyncWorkspace *ws,
                                    uint64_t session,
                                    const char *view,
                                    const char *key,
                                    uint64_t graph_version,
                                    char **out);

// Applies a delta in project-file syntax and writes the new version.
//
// # Safety
// `ws` must be a live handle, `delta` NUL-terminated, `out` writable.
enum CoopsyncStatus coopsync_publish(const struct CoopsyncWorkspace *ws,
                                     const char *delta,
                                     uint64_t *out);

// Parses a rule file and writes it back in canonical layout. On a parse
// error the last error starts with `line:column:`.
//
// # Safety
// `rules` must be NUL-terminated and `out` writable. The string written to
// `out` is owned by the caller.
enum CoopsyncStatus coopsync_rules_format(const char *rules, char **out);

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call on this thread.
const char *coopsync_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void coopsync_string_free(char *s);

// Library version, static storage.
const char *coopsync_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COOPSYNC_H */
