#include "scaffolder.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <set>
#include <sstream>

#include "analyzers.hpp"
#include "error.hpp"
#include "fsutil.hpp"
#include "mapper.hpp"
#include "prompts.hpp"
#include "text.hpp"

namespace ctrans::scaffold {

namespace {

using Clock = std::chrono::steady_clock;

bool is_c_file(const std::string& path) {
  return path.size() > 2 && path.compare(path.size() - 2, 2, ".c") == 0;
}

bool is_rust_keyword(const std::string& s) {
  static const std::set<std::string> kw = {
      "as",     "break",  "const", "continue", "crate", "dyn",   "else",
      "enum",   "extern", "false", "fn",       "for",   "if",    "impl",
      "in",     "let",    "loop",  "match",    "mod",   "move",  "mut",
      "pub",    "ref",    "return","self",     "static","struct","super",
      "trait",  "true",   "type",  "unsafe",   "use",   "where", "while",
      "async",  "await",  "union", "test",     "main"};
  return kw.count(s) > 0;
}

// Header "non-declaration content": function definitions (known from the
// model) or top-level object definitions, approximated by a depth-0 '='.
bool header_has_definitions(const scanner::SourceModel& model,
                            const scanner::SourceFile& file) {
  for (const auto& fn : model.functions)
    if (fn.qualified_id.path == file.path) return true;
  std::string stripped = text::strip_c(file.text);
  int brace = 0, paren = 0;
  for (std::size_t i = 0; i < stripped.size(); ++i) {
    char c = stripped[i];
    if (c == '{') ++brace;
    if (c == '}') --brace;
    if (c == '(') ++paren;
    if (c == ')') --paren;
    if (c == '=' && brace == 0 && paren == 0) {
      char next = i + 1 < stripped.size() ? stripped[i + 1] : ' ';
      char prev = i > 0 ? stripped[i - 1] : ' ';
      if (next != '=' && prev != '=' && prev != '!' && prev != '<' &&
          prev != '>')
        return true;
    }
  }
  return false;
}

struct StageRunner {
  const ScaffoldConfig& cfg;
  agent::Backend* backend;
  const toolchain::Toolchain& toolchain;
  fs::path c_root;
  fs::path target_root;
  Diagnostics* diags;
  SkeletonReport* report;
  Clock::time_point stage_start;

  void begin_stage() { stage_start = Clock::now(); }

  double remaining_secs() const {
    double elapsed =
        std::chrono::duration<double>(Clock::now() - stage_start).count();
    return cfg.stage_timeout_secs - elapsed;
  }

  bool stage_timed_out(Stage stage, int attempts) {
    if (remaining_secs() > 0) return false;
    report->stage_log.push_back({stage, attempts, StageOutcome::timed_out});
    add_diag(diags, "warning", "stage-timeout",
             std::string("scaffold stage timed out: ") + stage_name(stage));
    return true;
  }

  // A spawn-level failure means no agent is reachable; the stage cannot make
  // progress and the pipeline must stop rather than ship an empty skeleton.
  bool stage_backend_error(Stage stage, const agent::Result& result,
                           int attempts) {
    if (result.status != agent::Status::backend_error) return false;
    report->stage_log.push_back({stage, attempts, StageOutcome::exhausted});
    add_diag(diags, "warning", "agent-backend-error",
             std::string("agent backend failed during stage ") +
                 stage_name(stage) + ": " + result.transcript.substr(0, 300));
    return true;
  }

  agent::Result invoke(agent::Role role, const std::string& prompt,
                       int attempt) {
    agent::Request request;
    request.role = role;
    request.prompt = prompt;
    request.workspace_paths = {c_root, target_root};
    request.timeout_secs =
        std::min(cfg.agent_timeout_secs, std::max(remaining_secs(), 1.0));
    request.attempt_index = attempt;
    return backend->invoke(request);
  }

  std::string stage_prompt(const std::string& stage,
                           const std::string& task) const {
    return prompts::render(
        prompts::load_template(cfg.prompt_dir, "scaffold_init.txt"),
        {{"STAGE", stage},
         {"TASK", task},
         {"C_ROOT", c_root.string()},
         {"WORKSPACE", target_root.string()}});
  }
};

std::string render_diagnostics(const toolchain::BuildOutcome& outcome) {
  std::ostringstream out;
  int shown = 0;
  for (const auto& d : outcome.diagnostics) {
    if (d.level != "error") continue;
    out << d.file;
    if (d.line > 0) out << ":" << d.line;
    if (!d.code.empty()) out << " [" << d.code << "]";
    out << " " << d.message << "\n";
    if (++shown == 30) break;
  }
  if (shown == 0) out << outcome.raw_output.substr(0, 4000);
  return out.str();
}

}  // namespace

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::init: return "init";
    case Stage::types: return "types";
    case Stage::signatures: return "signatures";
    case Stage::safety: return "safety";
    case Stage::tests: return "tests";
    case Stage::final_verify: return "final_verify";
  }
  return "init";
}

const char* stage_outcome_name(StageOutcome o) {
  switch (o) {
    case StageOutcome::ok: return "ok";
    case StageOutcome::timed_out: return "timed_out";
    case StageOutcome::exhausted: return "exhausted";
  }
  return "ok";
}

bool SkeletonReport::pipeline_ready() const {
  if (!compilable) return false;
  for (const auto& e : stage_log) {
    if (e.stage == Stage::safety) continue;
    if (e.outcome != StageOutcome::ok) return false;
  }
  return true;
}

Json SkeletonReport::to_json() const {
  Json j;
  j["stage_log"] = Json::array();
  for (const auto& e : stage_log) {
    j["stage_log"].push_back({{"stage", stage_name(e.stage)},
                              {"attempts", e.attempts},
                              {"outcome", stage_outcome_name(e.outcome)}});
  }
  j["module_manifest"] = Json::array();
  for (const auto& [c_file, module] : module_manifest)
    j["module_manifest"].push_back({{"c_file", c_file}, {"module", module}});
  j["stub_count"] = stub_count;
  j["compilable"] = compilable;
  return j;
}

std::string flatten_module_name(const std::string& c_path) {
  std::string stem = c_path;
  std::size_t dot = stem.rfind('.');
  if (dot != std::string::npos) stem = stem.substr(0, dot);
  std::string out;
  for (char c : stem) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    } else {
      out.push_back('_');
    }
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])))
    out.insert(out.begin(), 'm');
  if (is_rust_keyword(out)) out.push_back('_');
  return out;
}

ModulePlan plan_modules(const scanner::SourceModel& model,
                        const scanner::ScanConfig& scan_cfg) {
  ModulePlan plan;
  auto groups = graph::group_modules(model, scan_cfg);
  std::map<std::string, const graph::ModuleGroup*> group_of_file;
  for (const auto& g : groups)
    for (const auto& m : g.members) group_of_file[m] = &g;

  for (const auto& f : model.files) {
    const graph::ModuleGroup* group = group_of_file.at(f.path);
    bool test_file = model.is_test_file(f.path, scan_cfg);

    if (test_file) {
      plan.module_of[f.path] = "tests/" + flatten_module_name(f.path) + ".rs";
      continue;
    }
    if (is_c_file(f.path)) {
      std::string name = flatten_module_name(f.path);
      plan.module_of[f.path] = "src/" + name + ".rs";
      plan.lib_modules.push_back(name);
      continue;
    }
    // headers: a definition-carrying header keeps its own module with a _h
    // suffix; a declaration-only header folds into the group's .c module
    std::string paired_c;
    for (const auto& m : group->members)
      if (is_c_file(m)) paired_c = m;
    if (!paired_c.empty() && !header_has_definitions(model, *model.find_file(f.path))) {
      plan.module_of[f.path] = "src/" + flatten_module_name(paired_c) + ".rs";
      continue;
    }
    std::string name = flatten_module_name(f.path) + "_h";
    plan.module_of[f.path] = "src/" + name + ".rs";
    plan.lib_modules.push_back(name);
  }
  std::sort(plan.lib_modules.begin(), plan.lib_modules.end());
  plan.lib_modules.erase(
      std::unique(plan.lib_modules.begin(), plan.lib_modules.end()),
      plan.lib_modules.end());
  return plan;
}

StageOutcome compile_repair(const fs::path& workspace, agent::Backend* backend,
                            const toolchain::Toolchain& toolchain,
                            int max_attempts, double agent_timeout_secs,
                            const std::optional<fs::path>& prompt_dir,
                            const std::vector<fs::path>& context_paths,
                            int* attempts_out) {
  int attempts = 0;
  if (attempts_out) *attempts_out = 0;
  while (true) {
    toolchain::BuildOutcome outcome = toolchain.check(workspace);
    if (outcome.ok) {
      if (attempts_out) *attempts_out = attempts;
      return StageOutcome::ok;
    }
    if (attempts >= max_attempts) {
      if (attempts_out) *attempts_out = attempts;
      return StageOutcome::exhausted;
    }
    if (!backend) {
      if (attempts_out) *attempts_out = attempts;
      return StageOutcome::exhausted;
    }
    std::string prompt = prompts::render(
        prompts::load_template(prompt_dir, "compile_repair.txt"),
        {{"WORKSPACE", workspace.string()},
         {"DIAGNOSTICS", render_diagnostics(outcome)}});
    agent::Request request;
    request.role = agent::Role::compile_repair;
    request.prompt = prompt;
    request.workspace_paths = context_paths;
    request.timeout_secs = agent_timeout_secs;
    request.attempt_index = attempts;
    backend->invoke(request);  // verdict comes from the next check, never from
                               // the agent
    ++attempts;
  }
}

bool safety_gate(const fs::path& workspace) {
  return analyzers::count_unsafe_loc(workspace) == 0 &&
         analyzers::count_signature_ptr_decls(workspace) == 0;
}

SkeletonReport run_scaffold(const scanner::SourceModel& model,
                            const graph::TranslationSchedule& schedule,
                            const scanner::ScanConfig& scan_cfg,
                            const fs::path& c_root, const fs::path& target_root,
                            agent::Backend* backend,
                            const toolchain::Toolchain& toolchain,
                            const ScaffoldConfig& cfg, Diagnostics* diags) {
  SkeletonReport report;
  ModulePlan plan = plan_modules(model, scan_cfg);
  for (const auto& [c_file, module] : plan.module_of)
    report.module_manifest.push_back({c_file, module});

  StageRunner runner{cfg,        backend, toolchain, c_root,
                     target_root, diags,   &report,   {}};

  auto finish = [&](bool run_stub_check) {
    if (run_stub_check) {
      auto decls = mapper::scan_rust_functions(target_root);
      int found = 0;
      for (const auto& unit : schedule.units) {
        for (const auto& member : unit.members) {
          if (mapper::static_match(member.name, decls)) {
            ++found;
          } else {
            add_diag(diags, "warning", "stub-missing",
                     "no stub found for scheduled function " + member.str());
          }
        }
      }
      report.stub_count = found;
    }
    toolchain::BuildOutcome final_check = toolchain.check(target_root);
    report.compilable = final_check.ok;
    return report;
  };

  // One stage_log entry per stage; attempts counts agent repair/refactor
  // invocations within the stage. Returns the repair loop's own outcome;
  // the logged outcome also reflects a prior in-stage failure (safety gate).
  auto run_compile_repair = [&](Stage stage, int extra_attempts = 0,
                                StageOutcome prior = StageOutcome::ok) {
    int attempts = 0;
    double budget = std::min(cfg.agent_timeout_secs,
                             std::max(runner.remaining_secs(), 1.0));
    StageOutcome outcome =
        compile_repair(target_root, backend, toolchain,
                       cfg.max_repair_attempts, budget, cfg.prompt_dir,
                       {c_root, target_root}, &attempts);
    StageOutcome logged =
        (outcome == StageOutcome::ok && prior != StageOutcome::ok) ? prior
                                                                   : outcome;
    report.stage_log.push_back({stage, attempts + extra_attempts, logged});
    return outcome;
  };

  const bool expert_mode = cfg.expert_interfaces.has_value();

  if (expert_mode) {
    // stages 1-4 are replaced by importing the provided skeleton
    if (!fsutil::dir_is_empty_or_absent(target_root))
      fail(Errc::path_occupied,
           "target path exists and is not empty: " + target_root.string());
    fs::create_directories(target_root);
    fs::copy(*cfg.expert_interfaces, target_root,
             fs::copy_options::recursive);
    fsutil::write_file(
        target_root / "AGENTS.md",
        prompts::load_template(cfg.prompt_dir, "agents_md.txt"));
    // manifest targets may not exist in an imported skeleton; keep the
    // mirrored guesses only where they resolve
    for (auto& [c_file, module] : report.module_manifest) {
      if (!fs::exists(target_root / module)) module.clear();
    }
  } else {
    // stage 1: project init and module tree, deterministic
    runner.begin_stage();
    toolchain.init_project(target_root,
                           target_root.filename().string().empty()
                               ? "translated"
                               : target_root.filename().string());
    std::string lib_rs;
    for (const auto& name : plan.lib_modules) lib_rs += "pub mod " + name + ";\n";
    fsutil::write_file(target_root / "src" / "lib.rs", lib_rs);
    for (const auto& [c_file, module] : plan.module_of) {
      if (module.rfind("tests/", 0) == 0) continue;  // created by the test stage
      fs::path p = target_root / module;
      if (!fs::exists(p)) fsutil::write_file(p, "");
    }
    fsutil::write_file(
        target_root / "AGENTS.md",
        prompts::load_template(cfg.prompt_dir, "agents_md.txt"));
    if (run_compile_repair(Stage::init) != StageOutcome::ok)
      return finish(false);

    // stage 2: type translation, one agent task per module-bearing C file
    runner.begin_stage();
    int type_attempts = 0;
    for (const auto& f : model.files) {
      if (model.is_test_file(f.path, scan_cfg)) continue;
      auto it = plan.module_of.find(f.path);
      if (it == plan.module_of.end()) continue;
      // declaration-only headers fold into their .c module task
      if (!is_c_file(f.path) && it->second.find("_h.rs") == std::string::npos)
        continue;
      if (runner.stage_timed_out(Stage::types, type_attempts))
        return finish(false);
      std::string task =
          "Translate the type definitions from C file " + f.path +
          " into Rust module " + it->second +
          ". Cover structs, unions, enums, constant macros, and primitive "
          "aliases, along with types from declaration-only headers of the "
          "same module group. Skip function bodies and prototypes.";
      auto result = runner.invoke(
          agent::Role::scaffold, runner.stage_prompt("type translation", task), 0);
      if (runner.stage_backend_error(Stage::types, result, type_attempts))
        return finish(false);
    }
    if (run_compile_repair(Stage::types) != StageOutcome::ok)
      return finish(false);

    // stage 3: signature stubs, one agent task per translation unit
    runner.begin_stage();
    int sig_attempts = 0;
    for (const auto& unit : schedule.units) {
      if (runner.stage_timed_out(Stage::signatures, sig_attempts))
        return finish(false);
      std::string names, modules, signatures;
      std::set<std::string> module_set;
      for (const auto& member : unit.members) {
        if (!names.empty()) names += ", ";
        names += member.name;
        module_set.insert(plan.module_of.at(member.path));
        const scanner::FunctionNode* fn = model.find_function(member);
        if (fn) signatures += "  " + fn->signature_text + "\n";
      }
      for (const auto& m : module_set) {
        if (!modules.empty()) modules += ", ";
        modules += m;
      }
      std::string task =
          "Create Rust stub signatures for unit " +
          std::to_string(unit.unit_id) + "; C functions: " + names +
          ". C signatures:\n" + signatures + "Target module(s): " + modules +
          ". Each stub body must be exactly unimplemented!(). Preserve the C "
          "function names.";
      auto result = runner.invoke(
          agent::Role::scaffold, runner.stage_prompt("signature stubbing", task),
          0);
      if (runner.stage_backend_error(Stage::signatures, result, sig_attempts))
        return finish(false);
    }
    if (run_compile_repair(Stage::signatures) != StageOutcome::ok)
      return finish(true);

    // stage 4: safety refactoring, deterministic gate
    runner.begin_stage();
    int refactor_rounds = 0;
    StageOutcome safety_outcome = StageOutcome::ok;
    while (!safety_gate(target_root)) {
      if (refactor_rounds >= cfg.max_refactor_attempts) {
        safety_outcome = StageOutcome::exhausted;
        break;
      }
      if (runner.remaining_secs() <= 0) {
        safety_outcome = StageOutcome::timed_out;
        break;
      }
      std::ostringstream findings;
      findings << "unsafe lines: " << analyzers::count_unsafe_loc(target_root)
               << ", raw pointer signature types: "
               << analyzers::count_signature_ptr_decls(target_root);
      std::string prompt = prompts::render(
          prompts::load_template(cfg.prompt_dir, "refactor_safety.txt"),
          {{"WORKSPACE", target_root.string()},
           {"FINDINGS", findings.str()}});
      agent::Request request;
      request.role = agent::Role::refactor;
      request.prompt = prompt;
      request.workspace_paths = {c_root, target_root};
      request.timeout_secs = std::min(cfg.agent_timeout_secs,
                                      std::max(runner.remaining_secs(), 1.0));
      request.attempt_index = refactor_rounds;
      backend->invoke(request);
      ++refactor_rounds;
    }
    // a still-failing gate is recorded but not fatal; a broken build is
    if (run_compile_repair(Stage::safety, refactor_rounds, safety_outcome) !=
        StageOutcome::ok)
      return finish(true);
  }

  // stage 5: test suite translation, one agent task per C test file
  runner.begin_stage();
  std::set<std::string> test_files;
  for (const auto& id : model.test_functions) test_files.insert(id.path);
  int test_attempts = 0;
  for (const auto& c_file : test_files) {
    if (runner.stage_timed_out(Stage::tests, test_attempts))
      return finish(true);
    std::string target = "tests/" + flatten_module_name(c_file) + ".rs";
    auto it = plan.module_of.find(c_file);
    if (it != plan.module_of.end() && !it->second.empty()) target = it->second;
    std::string task =
        "Translate the C test functions in " + c_file +
        " into Rust #[test] functions in " + target +
        ". Keep the original test names. Tests may call stubbed functions; "
        "they only need to compile at this stage.";
    auto result = runner.invoke(
        agent::Role::scaffold, runner.stage_prompt("test translation", task), 0);
    if (runner.stage_backend_error(Stage::tests, result, test_attempts))
      return finish(true);
  }
  if (run_compile_repair(Stage::tests) != StageOutcome::ok)
    return finish(true);

  // stage 6: final structural verification
  runner.begin_stage();
  if (run_compile_repair(Stage::final_verify) != StageOutcome::ok)
    return finish(true);

  return finish(true);
}

}  // namespace ctrans::scaffold
