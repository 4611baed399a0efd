#include "orchestrator.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "error.hpp"
#include "fsutil.hpp"
#include "prompts.hpp"
#include "scaffolder.hpp"

namespace ctrans::orchestrate {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::pending: return "pending";
    case Phase::translated: return "translated";
    case Phase::impl_checked: return "impl_checked";
    case Phase::compiled: return "compiled";
    case Phase::done: return "done";
    case Phase::skipped_null: return "skipped_null";
    case Phase::failed: return "failed";
  }
  return "pending";
}

std::optional<Phase> phase_from_name(std::string_view name) {
  for (Phase p : {Phase::pending, Phase::translated, Phase::impl_checked,
                  Phase::compiled, Phase::done, Phase::skipped_null,
                  Phase::failed}) {
    if (name == phase_name(p)) return p;
  }
  return std::nullopt;
}

bool phase_is_terminal(Phase p) {
  return p == Phase::done || p == Phase::skipped_null || p == Phase::failed;
}

const char* global_phase_name(GlobalPhase p) {
  switch (p) {
    case GlobalPhase::translating: return "translating";
    case GlobalPhase::refactoring: return "refactoring";
    case GlobalPhase::verifying: return "verifying";
    case GlobalPhase::done: return "done";
  }
  return "translating";
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::full: return "full";
    case Mode::base: return "base";
    case Mode::no_interfaces: return "no-interfaces";
    case Mode::no_mapping: return "no-mapping";
  }
  return "full";
}

std::optional<Mode> mode_from_name(std::string_view name) {
  if (name == "full") return Mode::full;
  if (name == "base") return Mode::base;
  if (name == "no-interfaces" || name == "no_interfaces")
    return Mode::no_interfaces;
  if (name == "no-mapping" || name == "no_mapping") return Mode::no_mapping;
  return std::nullopt;
}

Json UnitStatus::to_json() const {
  Json j;
  j["unit_id"] = unit_id;
  j["phase"] = phase_name(phase);
  j["attempts_translate"] = attempts_translate;
  j["attempts_compile_repair"] = attempts_compile_repair;
  j["last_error"] = last_error;
  return j;
}

UnitStatus UnitStatus::from_json(const Json& j) {
  UnitStatus s;
  s.unit_id = j.at("unit_id").get<int>();
  auto phase = phase_from_name(j.at("phase").get<std::string>());
  if (!phase) fail(Errc::config_invalid, "state file has unknown phase");
  s.phase = *phase;
  s.attempts_translate = j.value("attempts_translate", 0);
  s.attempts_compile_repair = j.value("attempts_compile_repair", 0);
  s.last_error = j.value("last_error", "");
  return s;
}

Json PipelineState::to_json() const {
  Json j;
  j["state_version"] = state_version;
  j["schedule_hash"] = schedule_hash;
  j["mapping_hash"] = mapping_hash;
  j["global_phase"] = global_phase_name(global_phase);
  j["unit_statuses"] = Json::array();
  for (const auto& s : unit_statuses) j["unit_statuses"].push_back(s.to_json());
  return j;
}

PipelineState PipelineState::from_json(const Json& j) {
  PipelineState state;
  state.state_version = j.value("state_version", 0);
  if (state.state_version != 1)
    fail(Errc::config_invalid, "unsupported state_version in state file");
  state.schedule_hash = j.at("schedule_hash").get<std::string>();
  state.mapping_hash = j.at("mapping_hash").get<std::string>();
  std::string phase = j.at("global_phase").get<std::string>();
  for (GlobalPhase p : {GlobalPhase::translating, GlobalPhase::refactoring,
                        GlobalPhase::verifying, GlobalPhase::done}) {
    if (phase == global_phase_name(p)) state.global_phase = p;
  }
  for (const auto& js : j.at("unit_statuses"))
    state.unit_statuses.push_back(UnitStatus::from_json(js));
  return state;
}

void checkpoint(const PipelineState& state, const fs::path& path) {
  fsutil::atomic_write_file(path, state.to_json().dump(2) + "\n");
}

PipelineState load_state(const fs::path& path) {
  Json j = Json::parse(fsutil::read_file(path), nullptr,
                       /*allow_exceptions=*/false);
  if (j.is_discarded())
    fail(Errc::config_invalid, "state file is not valid JSON: " + path.string());
  return PipelineState::from_json(j);
}

Json PipelineReport::to_json() const {
  Json j;
  j["build"] = build.to_json();
  j["tests"] = tests.to_json();
  j["safety"] = safety.to_json();
  j["coverage"] = coverage.to_json();
  j["units"] = Json::array();
  for (const auto& u : units) j["units"].push_back(u.to_json());
  j["aborted"] = aborted;
  j["abort_reason"] = abort_reason;
  return j;
}

namespace {

struct Runner {
  const scanner::SourceModel& model;
  const graph::TranslationSchedule& schedule;
  const mapper::MappingTable& table;
  fs::path c_root;
  fs::path workspace;
  agent::Backend* backend;
  const toolchain::Toolchain& toolchain;
  const OrchestratorConfig& cfg;
  std::optional<fs::path> state_path;
  Diagnostics* diags;
  PipelineState state;

  void save() {
    if (state_path) checkpoint(state, *state_path);
  }

  // The only way a unit reaches `compiled`: a passing deterministic check.
  static bool mark_compiled(UnitStatus& status,
                            const toolchain::BuildOutcome& outcome) {
    if (!outcome.ok) return false;
    status.phase = Phase::compiled;
    return true;
  }

  std::string unit_c_source(const graph::TranslationUnit& unit) const {
    std::string out;
    for (const auto& member : unit.members) {
      const scanner::FunctionNode* fn = model.find_function(member);
      if (!fn) continue;
      out += "// " + member.path + "\n" + fn->body_text + "\n\n";
    }
    return out;
  }

  agent::Result invoke(agent::Role role, const std::string& prompt,
                       int attempt) {
    agent::Request request;
    request.role = role;
    request.prompt = prompt;
    request.workspace_paths = {c_root, workspace};
    request.timeout_secs = cfg.agent_timeout_secs;
    request.attempt_index = attempt;
    return backend->invoke(request);
  }

  void translate_unit(const graph::TranslationUnit& unit, UnitStatus& status) {
    // mapped targets for the unit members (absent in the unmapped modes)
    std::vector<std::pair<std::string, std::string>> targets;
    bool all_null = true;
    bool have_targets = cfg.mode == Mode::full;
    for (const auto& member : unit.members) {
      const mapper::FunctionMapping* m = table.find(member.path, member.name);
      if (m && m->is_null()) continue;
      all_null = false;
      if (m && m->rust_module && have_targets)
        targets.push_back({*m->rust_module, *m->rust_function});
    }
    if (have_targets && all_null && !unit.members.empty()) {
      status.phase = Phase::skipped_null;
      save();
      return;
    }

    std::string names;
    for (const auto& member : unit.members) {
      if (!names.empty()) names += ", ";
      names += member.name;
    }
    std::string targets_text;
    if (have_targets) {
      targets_text = "Rust targets:\n";
      for (const auto& [module, function] : targets)
        targets_text += "  " + module + " :: " + function + "\n";
    } else {
      targets_text = "Locate the matching Rust code yourself.";
    }
    std::string prompt = prompts::render(
        prompts::load_template(cfg.prompt_dir, "translate_function.txt"),
        {{"C_ROOT", c_root.string()},
         {"WORKSPACE", workspace.string()},
         {"UNIT_ID", std::to_string(unit.unit_id)},
         {"GROUP_ID", unit.group_id},
         {"C_FUNCTIONS", names},
         {"TARGETS", targets_text},
         {"C_SOURCE", unit_c_source(unit)}});

    bool checked = false;
    for (int attempt = 0; attempt < cfg.translate_retries; ++attempt) {
      agent::Result result = invoke(agent::Role::translate, prompt, attempt);
      ++status.attempts_translate;
      if (result.status == agent::Status::backend_error) {
        status.last_error = "agent backend error";
        continue;
      }
      if (result.status == agent::Status::timed_out) {
        status.last_error = "translate attempt timed out";
        continue;
      }
      status.phase = Phase::translated;
      save();

      if (targets.empty()) {
        checked = true;  // nothing to statically confirm in unmapped modes
      } else {
        checked = true;
        for (const auto& [module, function] : targets) {
          CheckResult check = implementation_check(workspace, module, function);
          if (!check.implemented) {
            checked = false;
            std::string kinds;
            for (const auto& f : check.findings) {
              if (!kinds.empty()) kinds += ", ";
              kinds += finding_kind_name(f.kind);
            }
            status.last_error =
                "implementation check failed for " + function + ": " + kinds;
            break;
          }
        }
      }
      if (checked) {
        status.phase = Phase::impl_checked;
        save();
        break;
      }
    }
    if (!checked) {
      status.phase = Phase::failed;
      if (status.last_error.empty())
        status.last_error = "translation retries exhausted";
      save();
      return;
    }

    int repair_attempts = 0;
    scaffold::StageOutcome repair = scaffold::compile_repair(
        workspace, backend, toolchain, cfg.compile_repair_attempts,
        cfg.agent_timeout_secs, cfg.prompt_dir, {c_root, workspace},
        &repair_attempts);
    status.attempts_compile_repair += repair_attempts;
    if (repair != scaffold::StageOutcome::ok) {
      status.phase = Phase::failed;
      status.last_error = "compile repair exhausted";
      save();
      return;
    }

    // independent confirmation before the unit is recorded as completed
    toolchain::BuildOutcome confirm = toolchain.check(workspace);
    if (!mark_compiled(status, confirm)) {
      status.phase = Phase::failed;
      status.last_error = "post-repair check failed";
      save();
      return;
    }
    save();
    status.phase = Phase::done;
    status.last_error.clear();
    save();
  }

  void refactor_pass() {
    state.global_phase = GlobalPhase::refactoring;
    save();
    int rounds = 0;
    while (!scaffold::safety_gate(workspace) && rounds < cfg.refactor_rounds) {
      std::ostringstream findings;
      findings << "unsafe lines: " << analyzers::count_unsafe_loc(workspace)
               << ", raw pointer signature types: "
               << analyzers::count_signature_ptr_decls(workspace);
      std::string prompt = prompts::render(
          prompts::load_template(cfg.prompt_dir, "refactor_safety.txt"),
          {{"WORKSPACE", workspace.string()}, {"FINDINGS", findings.str()}});
      invoke(agent::Role::refactor, prompt, rounds);
      int repair_attempts = 0;
      scaffold::compile_repair(workspace, backend, toolchain,
                               cfg.compile_repair_attempts,
                               cfg.agent_timeout_secs, cfg.prompt_dir,
                               {c_root, workspace}, &repair_attempts);
      ++rounds;
    }
  }

  toolchain::TestOutcome verify_pass() {
    state.global_phase = GlobalPhase::verifying;
    save();
    auto run_suite = [&]() -> toolchain::TestOutcome {
      try {
        return toolchain.run_tests(workspace);
      } catch (const Error& e) {
        if (e.code() != Errc::build_failed) throw;
        toolchain::TestOutcome broken;
        broken.ok = false;
        broken.raw_output = e.what();
        return broken;
      }
    };
    toolchain::TestOutcome tests = run_suite();
    if (cfg.mode == Mode::base) return tests;  // no repair loop without the
                                               // orchestrator machinery
    int attempts = 0;
    while (!tests.ok && attempts < cfg.compile_repair_attempts) {
      std::string failed;
      for (const auto& name : tests.failed_names) failed += "  " + name + "\n";
      if (failed.empty()) failed = "  (suite did not run)\n";
      std::string prompt = prompts::render(
          prompts::load_template(cfg.prompt_dir, "verify_tests.txt"),
          {{"WORKSPACE", workspace.string()},
           {"FAILED_TESTS", failed},
           {"TEST_OUTPUT", tests.raw_output.substr(0, 4000)}});
      agent::Result result = invoke(agent::Role::verify, prompt, attempts);
      ++attempts;
      if (result.status == agent::Status::backend_error) break;
      int repair_attempts = 0;
      scaffold::compile_repair(workspace, backend, toolchain,
                               cfg.compile_repair_attempts,
                               cfg.agent_timeout_secs, cfg.prompt_dir,
                               {c_root, workspace}, &repair_attempts);
      tests = run_suite();
    }
    return tests;
  }
};

}  // namespace

PipelineReport run(const scanner::SourceModel& model,
                   const graph::TranslationSchedule& schedule,
                   const mapper::MappingTable& table, const fs::path& c_root,
                   const fs::path& workspace, agent::Backend* backend,
                   const toolchain::Toolchain& toolchain,
                   const OrchestratorConfig& cfg,
                   const std::optional<fs::path>& state_path, bool resume,
                   Diagnostics* diags) {
  Runner runner{model,   schedule,  table, c_root, workspace,
                backend, toolchain, cfg,   state_path, diags, {}};

  std::string schedule_hash = schedule.hash();
  std::string mapping_hash = table.hash();

  bool resumed = false;
  if (resume && state_path && fs::exists(*state_path)) {
    PipelineState prior = load_state(*state_path);
    if (prior.schedule_hash != schedule_hash ||
        prior.mapping_hash != mapping_hash) {
      fail(Errc::hash_mismatch,
           "state file was produced from different schedule/mapping "
           "artifacts; refusing to resume");
    }
    if (prior.unit_statuses.size() != schedule.units.size())
      fail(Errc::hash_mismatch, "state file covers a different unit count");
    runner.state = std::move(prior);
    resumed = true;
  }
  if (!resumed) {
    runner.state.schedule_hash = schedule_hash;
    runner.state.mapping_hash = mapping_hash;
    runner.state.global_phase = GlobalPhase::translating;
    for (const auto& unit : schedule.units) {
      UnitStatus s;
      s.unit_id = unit.unit_id;
      runner.state.unit_statuses.push_back(s);
    }
    runner.save();
  }

  PipelineReport report;

  if (cfg.mode == Mode::base) {
    // single whole-project prompt; no schedule, mapping, or skeleton
    std::string files;
    for (const auto& f : model.files) files += "  " + f.path + "\n";
    std::string prompt = prompts::render(
        prompts::load_template(cfg.prompt_dir, "translate_function.txt"),
        {{"C_ROOT", c_root.string()},
         {"WORKSPACE", workspace.string()},
         {"UNIT_ID", "0"},
         {"GROUP_ID", "whole-project"},
         {"C_FUNCTIONS", "the entire project"},
         {"TARGETS",
          "Translate the entire C project into this Rust library in one "
          "pass.\nC files:\n" + files},
         {"C_SOURCE", ""}});
    runner.invoke(agent::Role::translate, prompt, 0);
  } else {
    if (runner.state.global_phase == GlobalPhase::translating) {
      int processed_new = 0;
      bool budget_hit = false;
      for (const auto& unit : schedule.units) {
        UnitStatus& status = runner.state.unit_statuses[unit.unit_id];
        if (phase_is_terminal(status.phase)) continue;
        if (cfg.max_units && processed_new >= *cfg.max_units) {
          budget_hit = true;
          break;
        }
        runner.translate_unit(unit, status);
        ++processed_new;
      }
      if (budget_hit) {
        report.aborted = true;
        report.abort_reason = "aborted_by_budget";
        report.units = runner.state.unit_statuses;
        runner.save();
        return report;
      }
      runner.refactor_pass();
    } else if (runner.state.global_phase == GlobalPhase::refactoring) {
      runner.refactor_pass();
    }
  }

  report.tests = runner.verify_pass();
  report.build = toolchain.check(workspace);

  const mapper::MappingTable* table_for_audit =
      (cfg.mode == Mode::full) ? &table : nullptr;
  analyzers::AuditResult audit =
      analyzers::audit(workspace, model, table_for_audit, &toolchain);
  report.safety = audit.safety;
  report.coverage = audit.coverage;
  if (cfg.mode != Mode::base) report.units = runner.state.unit_statuses;

  runner.state.global_phase = GlobalPhase::done;
  runner.save();
  return report;
}

}  // namespace ctrans::orchestrate
