#ifndef SCENARIST_H
#define SCENARIST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScnReportFormat {
  SCN_REPORT_FORMAT_PRETTY = 0,
  SCN_REPORT_FORMAT_JSON_LINES = 1,
} ScnReportFormat;

// How [`scn_engine_run`] stopped.
typedef enum ScnRunEnd {
  // Nothing selectable and nothing pending.
  SCN_RUN_END_QUIESCENT = 0,
  // Nothing selectable but requests pending (blocked or delegated).
  SCN_RUN_END_STUCK = 1,
  // The step budget of the call ran out.
  SCN_RUN_END_BUDGET_EXHAUSTED = 2,
} ScnRunEnd;

// Result codes of every `scn_*` call.
typedef enum ScnStatus {
  SCN_STATUS_OK = 0,
  SCN_STATUS_NULL_POINTER = 1,
  SCN_STATUS_INVALID_UTF8 = 2,
  SCN_STATUS_UNKNOWN_ENGINE = 3,
  // Malformed event text or feature file.
  SCN_STATUS_SYNTAX = 4,
  // A documented precondition was violated, e.g. a zero step budget.
  SCN_STATUS_PRECONDITION = 5,
  SCN_STATUS_STEP_BOUND = 6,
  SCN_STATUS_OUT_OF_RANGE = 7,
  SCN_STATUS_IO = 8,
  // Any other engine or runner error.
  SCN_STATUS_FAILED = 9,
  SCN_STATUS_PANIC = 10,
} ScnStatus;

// Opaque engine handle.
typedef struct ScnEngine ScnEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates an engine from a registered factory (`sos`, `rps`, `composed`, ...).
//
// # Safety
// `name` must be a valid NUL-terminated string and `out` a valid pointer.
// The handle written to `out` must be released with [`scn_engine_free`].
enum ScnStatus scn_engine_new(const char *name, struct ScnEngine **out);

// # Safety
// `engine` must be null or a handle from [`scn_engine_new`] not yet freed.
void scn_engine_free(struct ScnEngine *engine);

// Queues an external event given in canonical form, e.g.
// `user -> app . addTravelPreferences("Dortmund", "Paderborn")`.
//
// # Safety
// `engine` must be a live handle and `event` a valid NUL-terminated string.
enum ScnStatus scn_engine_inject(struct ScnEngine *engine, const char *event);

// Steps until nothing is selectable or `max_steps` events were selected.
// `selected` receives the number of events selected by this call.
//
// # Safety
// `engine` must be a live handle; `selected` and `end` must be valid pointers.
enum ScnStatus scn_engine_run(struct ScnEngine *engine,
                              size_t max_steps,
                              size_t *selected,
                              enum ScnRunEnd *end);

// Number of events selected so far, or 0 for a null handle.
//
// # Safety
// `engine` must be null or a live handle.
size_t scn_engine_trace_len(const struct ScnEngine *engine);

// Writes the canonical form of trace event `index` to `out`.
//
// # Safety
// `engine` must be a live handle and `out` a valid pointer. The string must
// be released with [`scn_string_free`].
enum ScnStatus scn_engine_trace_event(const struct ScnEngine *engine, size_t index, char **out);

// Runs the features under `path` against engine `engine_name`, filtered by
// `tags` (may be null or empty). The rendered report goes to `report` and
// `success` tells whether every selected scenario passed.
//
// # Safety
// String arguments must be valid NUL-terminated strings (`tags` may be
// null); `report` and `success` must be valid pointers. The report must be
// released with [`scn_string_free`].
enum ScnStatus scn_run_suite(const char *path,
                             const char *engine_name,
                             const char *tags,
                             enum ScnReportFormat format,
                             size_t max_steps,
                             char **report,
                             bool *success);

// Renders step skeletons for the feature text `feature`.
//
// # Safety
// `feature` must be a valid NUL-terminated string and `out` a valid
// pointer. The string must be released with [`scn_string_free`].
enum ScnStatus scn_generate_skeletons(const char *feature, char **out);

// Message of the last failed call on this thread, or null. Release with
// [`scn_string_free`].
char *scn_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void scn_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCENARIST_H */
