/* C interface to the ctrans translation pipeline.
 *
 * The library orchestrates project-level C-to-Rust translation: it scans a C
 * repository, builds a dependency-ordered translation schedule, drives an
 * external coding agent through scaffolding/mapping/translation, and verifies
 * every step with deterministic toolchain checks.
 *
 * All functions returning ctrans_status set a per-context error message
 * retrievable with ctrans_last_error(). Strings returned through out
 * parameters are heap-allocated JSON documents; release them with
 * ctrans_string_free().
 */
#ifndef CTRANS_H
#define CTRANS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ctrans_ctx ctrans_ctx;

typedef enum ctrans_status {
  CTRANS_OK = 0,
  CTRANS_E_CONFIG = 1,
  CTRANS_E_IO = 2,
  CTRANS_E_SCAN = 3,
  CTRANS_E_TOOLCHAIN = 4,
  CTRANS_E_AGENT = 5,
  CTRANS_E_STATE = 6,
  CTRANS_E_BUILD_FAILED = 7,
  CTRANS_E_TEST_FAILED = 8,
  CTRANS_E_ABORTED = 9,
  CTRANS_E_INVALID_ARG = 10,
  CTRANS_E_INTERNAL = 11,
} ctrans_status;

const char* ctrans_version(void);

/* Context lifecycle. A fresh context carries built-in defaults. */
ctrans_ctx* ctrans_ctx_new(void);
void ctrans_ctx_free(ctrans_ctx* ctx);

/* Loads a JSON config file and/or a JSON overrides document (either may be
 * NULL). Overrides use the same nested shape as the file and win over it;
 * CTRANS_-prefixed environment variables win over both. */
ctrans_status ctrans_ctx_load_config(ctrans_ctx* ctx, const char* config_path,
                                     const char* overrides_json);

/* Message describing the most recent failure on this context. The pointer
 * stays valid until the next call on the same context. */
const char* ctrans_last_error(const ctrans_ctx* ctx);

/* Scans the C repository; emits the source model as JSON, or the
 * dependency-ordered translation schedule when want_schedule is nonzero. */
ctrans_status ctrans_analyze(ctrans_ctx* ctx, const char* c_root,
                             int want_schedule, char** out_json);

/* Builds the compilable skeleton workspace; emits the skeleton report. */
ctrans_status ctrans_scaffold(ctrans_ctx* ctx, const char* c_root,
                              const char* workspace, char** out_json);

/* Resolves C functions to their Rust counterparts; emits the mapping table.
 * schedule_path may be NULL to recompute the schedule from the C root. */
ctrans_status ctrans_map(ctrans_ctx* ctx, const char* c_root,
                         const char* workspace, const char* schedule_path,
                         char** out_json);

/* Runs the translation loop; emits the pipeline report. schedule_path,
 * mappings_path, and state_path may be NULL. */
ctrans_status ctrans_translate(ctrans_ctx* ctx, const char* c_root,
                               const char* workspace, const char* schedule_path,
                               const char* mappings_path,
                               const char* state_path, int resume,
                               char** out_json);

/* Safety and coverage metrics over a translated workspace. */
ctrans_status ctrans_audit(ctrans_ctx* ctx, const char* c_root,
                           const char* workspace, const char* mappings_path,
                           char** out_json);

/* End-to-end pipeline per the configured mode. Returns CTRANS_OK only when
 * the deterministic build and test gates both pass; the report is emitted
 * regardless whenever one could be produced. */
ctrans_status ctrans_run(ctrans_ctx* ctx, const char* c_root,
                         const char* workspace, int resume, char** out_json);

void ctrans_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CTRANS_H */
