#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agent.hpp"
#include "dep_graph.hpp"
#include "diag.hpp"
#include "jsonx.hpp"
#include "scanner.hpp"
#include "toolchain.hpp"

namespace ctrans::scaffold {

namespace fs = std::filesystem;

struct ScaffoldConfig {
  int max_repair_attempts = 5;   // N
  int max_refactor_attempts = 3; // K
  double stage_timeout_secs = 900;
  double agent_timeout_secs = 900;
  std::optional<fs::path> prompt_dir;
  std::optional<fs::path> expert_interfaces;  // pre-existing skeleton to import
};

enum class Stage { init, types, signatures, safety, tests, final_verify };
enum class StageOutcome { ok, timed_out, exhausted };

const char* stage_name(Stage s);
const char* stage_outcome_name(StageOutcome o);

struct StageLogEntry {
  Stage stage;
  int attempts = 0;  // repair/refactor invocations within the stage
  StageOutcome outcome = StageOutcome::ok;
};

struct SkeletonReport {
  std::vector<StageLogEntry> stage_log;
  std::vector<std::pair<std::string, std::string>> module_manifest;  // c file -> module
  int stub_count = 0;
  bool compilable = false;

  // True when the pipeline may continue: the skeleton compiles and no stage
  // was cut short. A still-unsafe skeleton after K refactor rounds is
  // recorded but does not block translation.
  bool pipeline_ready() const;

  Json to_json() const;
};

// Deterministic module layout mirroring the C tree. A C file path maps to a
// flattened module name ("src/buf.c" -> "src_buf"); headers that carry
// definitions keep a separate module with a _h suffix, declaration-only
// headers fold into their group's .c module.
struct ModulePlan {
  // c file path -> workspace-relative module file ("src/src_buf.rs" or
  // "tests/tests_x.rs" for test files)
  std::map<std::string, std::string> module_of;
  // module files that belong in src/lib.rs, sorted
  std::vector<std::string> lib_modules;  // bare module names
};

std::string flatten_module_name(const std::string& c_path);

ModulePlan plan_modules(const scanner::SourceModel& model,
                        const scanner::ScanConfig& scan_cfg);

// Shared compile-repair loop: deterministic check decides, the agent only
// edits. Returns ok when the check passes, exhausted after max_attempts
// failed repairs. attempts_out counts agent invocations.
StageOutcome compile_repair(const fs::path& workspace, agent::Backend* backend,
                            const toolchain::Toolchain& toolchain,
                            int max_attempts, double agent_timeout_secs,
                            const std::optional<fs::path>& prompt_dir,
                            const std::vector<fs::path>& context_paths,
                            int* attempts_out);

// True when the tree has no unsafe code lines and no raw pointers in fn
// signatures.
bool safety_gate(const fs::path& workspace);

SkeletonReport run_scaffold(const scanner::SourceModel& model,
                            const graph::TranslationSchedule& schedule,
                            const scanner::ScanConfig& scan_cfg,
                            const fs::path& c_root, const fs::path& target_root,
                            agent::Backend* backend,
                            const toolchain::Toolchain& toolchain,
                            const ScaffoldConfig& cfg,
                            Diagnostics* diags = nullptr);

}  // namespace ctrans::scaffold
