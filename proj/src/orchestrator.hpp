#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agent.hpp"
#include "analyzers.hpp"
#include "dep_graph.hpp"
#include "diag.hpp"
#include "impl_check.hpp"
#include "jsonx.hpp"
#include "mapper.hpp"
#include "scanner.hpp"
#include "toolchain.hpp"

namespace ctrans::orchestrate {

namespace fs = std::filesystem;

enum class Phase {
  pending,
  translated,
  impl_checked,
  compiled,
  done,
  skipped_null,
  failed,
};

const char* phase_name(Phase p);
std::optional<Phase> phase_from_name(std::string_view name);
bool phase_is_terminal(Phase p);

struct UnitStatus {
  int unit_id = 0;
  Phase phase = Phase::pending;
  int attempts_translate = 0;
  int attempts_compile_repair = 0;
  std::string last_error;

  Json to_json() const;
  static UnitStatus from_json(const Json& j);
};

enum class GlobalPhase { translating, refactoring, verifying, done };

const char* global_phase_name(GlobalPhase p);

struct PipelineState {
  int state_version = 1;
  std::string schedule_hash;
  std::string mapping_hash;
  GlobalPhase global_phase = GlobalPhase::translating;
  std::vector<UnitStatus> unit_statuses;

  Json to_json() const;
  static PipelineState from_json(const Json& j);
};

// Atomic write (temp file + rename) after every transition.
void checkpoint(const PipelineState& state, const fs::path& path);

// Loads a state file; the caller must verify hashes before continuing.
PipelineState load_state(const fs::path& path);

enum class Mode { full, base, no_interfaces, no_mapping };

const char* mode_name(Mode m);
std::optional<Mode> mode_from_name(std::string_view name);

struct OrchestratorConfig {
  int translate_retries = 3;
  int compile_repair_attempts = 5;  // N, shared with the scaffolder
  int refactor_rounds = 1;
  double agent_timeout_secs = 900;
  Mode mode = Mode::full;
  std::optional<fs::path> prompt_dir;
  // Stop after this many newly processed units (budget); the run reports
  // aborted_by_budget and a later resume continues from the checkpoint.
  std::optional<int> max_units;
};

struct PipelineReport {
  toolchain::BuildOutcome build;
  toolchain::TestOutcome tests;
  analyzers::SafetyReport safety;
  analyzers::CoverageReport coverage;
  std::vector<UnitStatus> units;
  bool aborted = false;
  std::string abort_reason;

  Json to_json() const;
};

// Executes the translation loop over the mapping table in schedule order,
// then one safety refactor pass and the test verification pass. A unit is
// marked done only after the deterministic toolchain check confirms the
// workspace; agent transcripts never advance state.
PipelineReport run(const scanner::SourceModel& model,
                   const graph::TranslationSchedule& schedule,
                   const mapper::MappingTable& table, const fs::path& c_root,
                   const fs::path& workspace, agent::Backend* backend,
                   const toolchain::Toolchain& toolchain,
                   const OrchestratorConfig& cfg,
                   const std::optional<fs::path>& state_path,
                   bool resume = false, Diagnostics* diags = nullptr);

}  // namespace ctrans::orchestrate
