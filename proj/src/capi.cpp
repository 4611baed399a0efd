#include "ctrans/ctrans.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "pipeline.hpp"

using namespace ctrans;

struct ctrans_ctx {
  config::PipelineConfig config;
  std::string last_error;
};

namespace {

ctrans_status status_from_errc(Errc code) {
  switch (code) {
    case Errc::config_invalid: return CTRANS_E_CONFIG;
    case Errc::io: return CTRANS_E_IO;
    case Errc::empty_repository:
    case Errc::duplicate_definition: return CTRANS_E_SCAN;
    case Errc::path_occupied:
    case Errc::toolchain_missing: return CTRANS_E_TOOLCHAIN;
    case Errc::script_exhausted:
    case Errc::agent_backend: return CTRANS_E_AGENT;
    case Errc::hash_mismatch: return CTRANS_E_STATE;
    case Errc::build_failed: return CTRANS_E_BUILD_FAILED;
    case Errc::aborted: return CTRANS_E_ABORTED;
    case Errc::cycle_detected:
    case Errc::invalid_argument: return CTRANS_E_INVALID_ARG;
    case Errc::internal: return CTRANS_E_INTERNAL;
  }
  return CTRANS_E_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<std::filesystem::path> opt_path(const char* s) {
  if (!s || !*s) return std::nullopt;
  return std::filesystem::path(s);
}

template <typename Fn>
ctrans_status guarded(ctrans_ctx* ctx, Fn&& fn) {
  if (!ctx) return CTRANS_E_INVALID_ARG;
  ctx->last_error.clear();
  try {
    return fn();
  } catch (const Error& e) {
    ctx->last_error = e.what();
    return status_from_errc(e.code());
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return CTRANS_E_INTERNAL;
  }
}

ctrans_status emit(char** out_json, const Json& j) {
  if (!out_json) return CTRANS_E_INVALID_ARG;
  *out_json = dup_string(j.dump(2));
  return *out_json ? CTRANS_OK : CTRANS_E_INTERNAL;
}

}  // namespace

extern "C" {

const char* ctrans_version(void) { return "0.1.0"; }

ctrans_ctx* ctrans_ctx_new(void) { return new (std::nothrow) ctrans_ctx; }

void ctrans_ctx_free(ctrans_ctx* ctx) { delete ctx; }

const char* ctrans_last_error(const ctrans_ctx* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

ctrans_status ctrans_ctx_load_config(ctrans_ctx* ctx, const char* config_path,
                                     const char* overrides_json) {
  return guarded(ctx, [&]() -> ctrans_status {
    Json overrides = Json::object();
    if (overrides_json && *overrides_json) {
      overrides = Json::parse(overrides_json, nullptr,
                              /*allow_exceptions=*/false);
      if (overrides.is_discarded() || !overrides.is_object()) {
        ctx->last_error = "overrides_json is not a JSON object";
        return CTRANS_E_INVALID_ARG;
      }
    }
    ctx->config = config::load_config(opt_path(config_path), overrides);
    return CTRANS_OK;
  });
}

ctrans_status ctrans_analyze(ctrans_ctx* ctx, const char* c_root,
                             int want_schedule, char** out_json) {
  return guarded(ctx, [&]() -> ctrans_status {
    if (!c_root) return CTRANS_E_INVALID_ARG;
    return emit(out_json,
                pipeline::analyze_json(ctx->config, c_root, want_schedule != 0));
  });
}

ctrans_status ctrans_scaffold(ctrans_ctx* ctx, const char* c_root,
                              const char* workspace, char** out_json) {
  return guarded(ctx, [&]() -> ctrans_status {
    if (!c_root || !workspace) return CTRANS_E_INVALID_ARG;
    return emit(out_json,
                pipeline::scaffold_json(ctx->config, c_root, workspace));
  });
}

ctrans_status ctrans_map(ctrans_ctx* ctx, const char* c_root,
                         const char* workspace, const char* schedule_path,
                         char** out_json) {
  return guarded(ctx, [&]() -> ctrans_status {
    if (!c_root || !workspace) return CTRANS_E_INVALID_ARG;
    return emit(out_json, pipeline::map_json(ctx->config, c_root, workspace,
                                             opt_path(schedule_path)));
  });
}

ctrans_status ctrans_translate(ctrans_ctx* ctx, const char* c_root,
                               const char* workspace, const char* schedule_path,
                               const char* mappings_path,
                               const char* state_path, int resume,
                               char** out_json) {
  return guarded(ctx, [&]() -> ctrans_status {
    if (!c_root || !workspace) return CTRANS_E_INVALID_ARG;
    int exit_code = 0;
    Json report = pipeline::translate_json(
        ctx->config, c_root, workspace, opt_path(schedule_path),
        opt_path(mappings_path), opt_path(state_path), resume != 0, &exit_code);
    ctrans_status emitted = emit(out_json, report);
    if (emitted != CTRANS_OK) return emitted;
    if (exit_code == 2) return CTRANS_E_BUILD_FAILED;
    if (exit_code == 3) return CTRANS_E_TEST_FAILED;
    if (exit_code == 4) return CTRANS_E_ABORTED;
    return CTRANS_OK;
  });
}

ctrans_status ctrans_audit(ctrans_ctx* ctx, const char* c_root,
                           const char* workspace, const char* mappings_path,
                           char** out_json) {
  return guarded(ctx, [&]() -> ctrans_status {
    if (!c_root || !workspace) return CTRANS_E_INVALID_ARG;
    return emit(out_json, pipeline::audit_json(ctx->config, c_root, workspace,
                                               opt_path(mappings_path)));
  });
}

ctrans_status ctrans_run(ctrans_ctx* ctx, const char* c_root,
                         const char* workspace, int resume, char** out_json) {
  return guarded(ctx, [&]() -> ctrans_status {
    if (!c_root || !workspace) return CTRANS_E_INVALID_ARG;
    pipeline::RunResult result =
        pipeline::run_pipeline(ctx->config, c_root, workspace, resume != 0);
    ctrans_status emitted = emit(out_json, result.report_json);
    if (emitted != CTRANS_OK) return emitted;
    if (result.exit_code == 2) return CTRANS_E_BUILD_FAILED;
    if (result.exit_code == 3) return CTRANS_E_TEST_FAILED;
    if (result.exit_code == 4) return CTRANS_E_ABORTED;
    return CTRANS_OK;
  });
}

void ctrans_string_free(char* s) { std::free(s); }

}  // extern "C"
