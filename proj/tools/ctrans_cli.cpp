// Command-line driver for the ctrans pipeline. Talks to the core library
// exclusively through the C API in ctrans/ctrans.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctrans/ctrans.h"

namespace {

using Json = nlohmann::ordered_json;

struct CtxDeleter {
  void operator()(ctrans_ctx* ctx) const { ctrans_ctx_free(ctx); }
};
using CtxPtr = std::unique_ptr<ctrans_ctx, CtxDeleter>;

struct StrDeleter {
  void operator()(char* s) const { ctrans_string_free(s); }
};
using StrPtr = std::unique_ptr<char, StrDeleter>;

int fail_with(const ctrans_ctx* ctx, const char* stage) {
  std::cerr << "ctrans: " << stage << ": " << ctrans_last_error(ctx) << "\n";
  return 1;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out << text << "\n";
}

// Exit codes mirror the pipeline classification: 0 ok, 2 build failure,
// 3 test failure, 4 pipeline abort, 1 anything else.
int exit_code_for(ctrans_status status) {
  switch (status) {
    case CTRANS_OK: return 0;
    case CTRANS_E_BUILD_FAILED: return 2;
    case CTRANS_E_TEST_FAILED: return 3;
    case CTRANS_E_ABORTED: return 4;
    default: return 1;
  }
}

std::string render_audit_table(const Json& audit) {
  const Json& s = audit.at("safety");
  const Json& c = audit.at("coverage");
  char line[256];
  std::string out;
  out += "  ptr_d   ptr_*    uLoC  %Unsafe      LoC\n";
  std::snprintf(line, sizeof(line), "%7lld %7lld %7lld %8s %8lld\n",
                s.at("ptr_decls").get<long long>(),
                s.at("ptr_derefs").get<long long>(),
                s.at("unsafe_loc").get<long long>(),
                s.at("pct_unsafe").get<std::string>().c_str(),
                s.at("total_loc").get<long long>());
  out += line;
  out += "\n  functional coverage: " + c.at("functional_pct").get<std::string>() +
         "% (" + std::to_string(c.at("functions_implemented").get<int>()) +
         " implemented, " + std::to_string(c.at("functions_stub").get<int>()) +
         " stubs, " + std::to_string(c.at("functions_missing").get<int>()) +
         " missing, " + std::to_string(c.at("functions_null_mapped").get<int>()) +
         " null-mapped)\n";
  out += "  test coverage: " + c.at("test_pct").get<std::string>() + "% (" +
         std::to_string(c.at("rust_tests_present").get<int>()) + " of " +
         std::to_string(c.at("c_tests_total").get<int>()) + " C tests)\n";
  out += "\n  uLoC counts code lines inside unsafe blocks and unsafe fn "
         "bodies,\n  opener line included, bare closing-brace lines "
         "excluded.\n";
  return out;
}

std::string render_report_summary(const Json& report) {
  std::string out;
  const Json& build = report.at("build");
  const Json& tests = report.at("tests");
  out += std::string("  build: ") + (build.at("ok").get<bool>() ? "ok" : "FAILED") +
         " (" + std::to_string(build.at("errors").get<int>()) + " errors)\n";
  out += std::string("  tests: ") + (tests.at("ok").get<bool>() ? "ok" : "FAILED") +
         " (" + std::to_string(tests.at("passed").get<int>()) + " passed, " +
         std::to_string(tests.at("failed").get<int>()) + " failed)\n";
  Json audit;
  audit["safety"] = report.at("safety");
  audit["coverage"] = report.at("coverage");
  out += render_audit_table(audit);
  if (report.contains("units")) {
    int done = 0, failed = 0, skipped = 0;
    for (const auto& u : report.at("units")) {
      std::string phase = u.at("phase").get<std::string>();
      if (phase == "done") ++done;
      if (phase == "failed") ++failed;
      if (phase == "skipped_null") ++skipped;
    }
    out += "  units: " + std::to_string(done) + " done, " +
           std::to_string(failed) + " failed, " + std::to_string(skipped) +
           " skipped (null mapping)\n";
  }
  if (report.at("aborted").get<bool>())
    out += "  ABORTED: " + report.at("abort_reason").get<std::string>() + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"project-level C-to-Rust translation pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  bool verbose = false;
  bool json_output = false;
  app.add_option("--config", config_path, "pipeline config file (JSON)");
  app.add_flag("--verbose", verbose, "print progress to stderr");
  app.add_flag("--json", json_output, "machine-readable output only");

  // shared flags collected into a config overrides document
  std::string mode, interfaces, mock_script, call_log;
  int max_repair = -1, max_refactor = -1;
  double stage_timeout = -1;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--mode", mode, "full|base|no-interfaces|no-mapping");
    cmd->add_option("--interfaces", interfaces,
                    "pre-existing skeleton directory (expert mode)");
    cmd->add_option("--mock-script", mock_script, "scripted agent backend");
    cmd->add_option("--call-log", call_log, "agent invocation log (JSONL)");
    cmd->add_option("--max-repair", max_repair, "compile repair attempts (N)");
    cmd->add_option("--max-refactor", max_refactor, "refactor rounds (K)");
    cmd->add_option("--stage-timeout", stage_timeout,
                    "scaffold stage timeout in seconds");
  };

  std::string c_root, workspace, out_path;
  std::string schedule_path, mappings_path, state_path;
  bool want_schedule = false, resume = false;

  CLI::App* analyze = app.add_subcommand("analyze", "scan a C repository");
  analyze->add_option("--c-root", c_root, "C repository root")->required();
  analyze->add_flag("--schedule", want_schedule,
                    "emit the translation schedule instead of the model");
  analyze->add_option("--out", out_path, "write JSON here instead of stdout");
  add_common(analyze);

  CLI::App* scaffold =
      app.add_subcommand("scaffold", "build the Rust skeleton workspace");
  scaffold->add_option("--c-root", c_root, "C repository root")->required();
  scaffold->add_option("--out", workspace, "target workspace")->required();
  scaffold->add_option("--report", out_path, "write the report here");
  add_common(scaffold);

  CLI::App* map = app.add_subcommand("map", "map C functions to Rust stubs");
  map->add_option("--c-root", c_root, "C repository root")->required();
  map->add_option("--workspace", workspace, "Rust workspace")->required();
  map->add_option("--schedule", schedule_path, "schedule JSON (optional)");
  map->add_option("--out", out_path, "write the mapping table here");
  add_common(map);

  CLI::App* translate =
      app.add_subcommand("translate", "run the translation loop");
  translate->add_option("--c-root", c_root, "C repository root")->required();
  translate->add_option("--workspace", workspace, "Rust workspace")->required();
  translate->add_option("--schedule", schedule_path, "schedule JSON");
  translate->add_option("--mappings", mappings_path, "mapping table JSON");
  translate->add_option("--state", state_path, "checkpoint state file");
  translate->add_flag("--resume", resume, "continue from the state file");
  translate->add_option("--out", out_path, "write the report here");
  add_common(translate);

  CLI::App* audit =
      app.add_subcommand("audit", "safety and coverage metrics");
  audit->add_option("--c-root", c_root, "C repository root")->required();
  audit->add_option("--workspace", workspace, "Rust workspace")->required();
  audit->add_option("--mappings", mappings_path, "mapping table JSON");
  audit->add_option("--out", out_path, "write JSON here instead of stdout");
  add_common(audit);

  CLI::App* run = app.add_subcommand("run", "full pipeline end to end");
  run->add_option("--c-root", c_root, "C repository root")->required();
  run->add_option("--out", workspace, "target workspace")->required();
  run->add_flag("--resume", resume, "continue an interrupted run");
  add_common(run);

  CLI11_PARSE(app, argc, argv);

  Json overrides = Json::object();
  if (!mode.empty()) overrides["mode"] = mode;
  if (!interfaces.empty()) overrides["interfaces"] = interfaces;
  if (!mock_script.empty()) overrides["agent"]["mock_script"] = mock_script;
  if (!call_log.empty()) overrides["agent"]["call_log"] = call_log;
  if (max_repair >= 0) overrides["scaffold"]["max_repair_attempts"] = max_repair;
  if (max_refactor >= 0)
    overrides["scaffold"]["max_refactor_attempts"] = max_refactor;
  if (stage_timeout >= 0)
    overrides["scaffold"]["stage_timeout_secs"] = stage_timeout;

  CtxPtr ctx(ctrans_ctx_new());
  if (!ctx) {
    std::cerr << "ctrans: out of memory\n";
    return 1;
  }
  ctrans_status status = ctrans_ctx_load_config(
      ctx.get(), config_path.empty() ? nullptr : config_path.c_str(),
      overrides.dump().c_str());
  if (status != CTRANS_OK) return fail_with(ctx.get(), "config");

  char* raw = nullptr;
  std::string stage;
  if (analyze->parsed()) {
    stage = "analyze";
    if (verbose) std::cerr << "ctrans: scanning " << c_root << "\n";
    status = ctrans_analyze(ctx.get(), c_root.c_str(), want_schedule ? 1 : 0,
                            &raw);
  } else if (scaffold->parsed()) {
    stage = "scaffold";
    status = ctrans_scaffold(ctx.get(), c_root.c_str(), workspace.c_str(), &raw);
  } else if (map->parsed()) {
    stage = "map";
    status = ctrans_map(ctx.get(), c_root.c_str(), workspace.c_str(),
                        schedule_path.empty() ? nullptr : schedule_path.c_str(),
                        &raw);
  } else if (translate->parsed()) {
    stage = "translate";
    status = ctrans_translate(
        ctx.get(), c_root.c_str(), workspace.c_str(),
        schedule_path.empty() ? nullptr : schedule_path.c_str(),
        mappings_path.empty() ? nullptr : mappings_path.c_str(),
        state_path.empty() ? nullptr : state_path.c_str(), resume ? 1 : 0,
        &raw);
  } else if (audit->parsed()) {
    stage = "audit";
    status = ctrans_audit(ctx.get(), c_root.c_str(), workspace.c_str(),
                          mappings_path.empty() ? nullptr : mappings_path.c_str(),
                          &raw);
  } else if (run->parsed()) {
    stage = "run";
    if (verbose) std::cerr << "ctrans: running pipeline on " << c_root << "\n";
    status = ctrans_run(ctx.get(), c_root.c_str(), workspace.c_str(),
                        resume ? 1 : 0, &raw);
  }

  StrPtr output(raw);
  if (!output) {
    std::cerr << "ctrans: " << stage << ": " << ctrans_last_error(ctx.get())
              << "\n";
    return exit_code_for(status) == 0 ? 1 : exit_code_for(status);
  }

  std::string text(output.get());
  if (json_output || analyze->parsed() || map->parsed()) {
    write_output(text, out_path);
  } else {
    Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
      write_output(text, out_path);
    } else if (audit->parsed()) {
      std::cout << render_audit_table(doc);
      if (!out_path.empty()) write_output(text, out_path);
    } else if (translate->parsed() || run->parsed()) {
      std::cout << render_report_summary(doc);
      if (!out_path.empty()) write_output(text, out_path);
    } else {
      write_output(text, out_path);
    }
  }

  if (status != CTRANS_OK && exit_code_for(status) == 1)
    std::cerr << "ctrans: " << stage << ": " << ctrans_last_error(ctx.get())
              << "\n";
  return exit_code_for(status);
}
