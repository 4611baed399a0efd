#include "toolchain.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "error.hpp"
#include "fsutil.hpp"
#include "subprocess.hpp"

namespace ctrans::toolchain {

namespace {

constexpr const char* kCacheDir = ".ctrans-cache";

bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace

int BuildOutcome::error_count() const {
  return static_cast<int>(
      std::count_if(diagnostics.begin(), diagnostics.end(),
                    [](const DiagnosticMsg& d) { return d.level == "error"; }));
}

Json BuildOutcome::to_json() const {
  Json j;
  j["ok"] = ok;
  j["errors"] = error_count();
  j["warnings"] = static_cast<int>(diagnostics.size()) - error_count();
  j["diagnostics"] = Json::array();
  for (const auto& d : diagnostics) {
    Json jd;
    jd["level"] = d.level;
    if (!d.code.empty()) jd["code"] = d.code;
    jd["message"] = d.message;
    if (!d.file.empty()) jd["file"] = d.file;
    if (d.line > 0) jd["line"] = d.line;
    j["diagnostics"].push_back(std::move(jd));
  }
  return j;
}

Json TestOutcome::to_json() const {
  Json j;
  j["ok"] = ok;
  j["total"] = total;
  j["passed"] = passed;
  j["failed"] = failed;
  j["ignored"] = ignored;
  j["failed_names"] = failed_names;
  return j;
}

Toolchain::Toolchain(ToolchainConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.check_cmd.empty() || cfg_.test_cmd.empty())
    fail(Errc::config_invalid, "toolchain commands must not be empty");
}

std::string Toolchain::sanitize_crate_name(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    } else {
      out.push_back('_');
    }
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])))
    out.insert(out.begin(), 'p');
  return out;
}

void Toolchain::init_project(const fs::path& path,
                             const std::string& name) const {
  if (!fsutil::dir_is_empty_or_absent(path))
    fail(Errc::path_occupied,
         "target path exists and is not empty: " + path.string());
  if (!proc::command_on_path(cfg_.check_cmd[0]))
    fail(Errc::toolchain_missing,
         "'" + cfg_.check_cmd[0] +
             "' not found on PATH; install the Rust toolchain or point "
             "toolchain.check_cmd at it");

  std::string crate = sanitize_crate_name(name);
  fsutil::write_file(path / "Cargo.toml",
                     "[package]\nname = \"" + crate +
                         "\"\nversion = \"0.1.0\"\nedition = \"2021\"\n");
  fsutil::write_file(path / "src" / "lib.rs", "");

  // settle the lockfile now so later check/test runs never touch the tree
  proc::CommandSpec spec;
  spec.argv = {cfg_.check_cmd[0], "generate-lockfile", "--offline"};
  spec.cwd = path;
  spec.env = cache_env(path);
  spec.timeout_secs = 60;
  proc::CommandResult lock = proc::run_command(spec);
  if (lock.spawn_failed || lock.exit_code != 0) {
    spec.argv = {cfg_.check_cmd[0], "generate-lockfile"};
    proc::run_command(spec);
  }
}

std::vector<std::pair<std::string, std::string>> Toolchain::cache_env(
    const fs::path& workspace) const {
  fs::path cache = fs::absolute(workspace / kCacheDir / "target");
  return {{"CARGO_TARGET_DIR", cache.string()}};
}

BuildOutcome parse_check_output(const std::string& output, int exit_code) {
  BuildOutcome outcome;
  outcome.raw_output = output;
  std::istringstream in(output);
  std::string line;
  bool parsed_any = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '{') continue;
    Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) continue;
    parsed_any = true;
    if (j.value("reason", "") != "compiler-message") continue;
    if (!j.contains("message")) continue;
    const auto& msg = j["message"];
    std::string level = msg.value("level", "");
    if (level != "error" && level != "warning") continue;
    DiagnosticMsg d;
    d.level = level;
    d.message = msg.value("message", "");
    if (msg.contains("code") && msg["code"].is_object())
      d.code = msg["code"].value("code", "");
    if (msg.contains("spans") && msg["spans"].is_array()) {
      for (const auto& span : msg["spans"]) {
        if (!span.value("is_primary", false)) continue;
        d.file = span.value("file_name", "");
        d.line = span.value("line_start", 0);
        break;
      }
    }
    outcome.diagnostics.push_back(std::move(d));
  }

  if (!parsed_any) {
    // diagnostics were not machine-readable; fall back to the exit code
    outcome.ok = exit_code == 0;
    if (!outcome.ok) {
      DiagnosticMsg d;
      d.level = "error";
      d.message = "toolchain output was not parseable; exit code " +
                  std::to_string(exit_code);
      outcome.diagnostics.push_back(std::move(d));
    }
    return outcome;
  }
  outcome.ok = exit_code == 0 && outcome.error_count() == 0;
  if (exit_code != 0 && outcome.error_count() == 0) {
    DiagnosticMsg d;
    d.level = "error";
    d.message = "toolchain exited with code " + std::to_string(exit_code);
    outcome.diagnostics.push_back(std::move(d));
  }
  return outcome;
}

BuildOutcome Toolchain::check(const fs::path& workspace) const {
  proc::CommandSpec spec;
  spec.argv = cfg_.check_cmd;
  spec.cwd = workspace;
  spec.env = cache_env(workspace);
  spec.timeout_secs = cfg_.check_timeout_secs;
  proc::CommandResult run = proc::run_command(spec);
  if (run.spawn_failed)
    fail(Errc::toolchain_missing, "cannot run '" + cfg_.check_cmd[0] +
                                      "': " + run.spawn_error);
  if (run.timed_out) {
    BuildOutcome outcome;
    outcome.raw_output = run.output;
    outcome.ok = false;
    outcome.diagnostics.push_back(
        {"error", "", "type check timed out after " +
                          std::to_string(cfg_.check_timeout_secs) + "s",
         "", 0});
    return outcome;
  }
  return parse_check_output(run.output, run.exit_code);
}

TestOutcome parse_test_output(const std::string& output, int exit_code) {
  TestOutcome outcome;
  outcome.raw_output = output;
  std::istringstream in(output);
  std::string line;
  bool saw_summary = false;
  while (std::getline(in, line)) {
    if (starts_with(line, "test result:")) {
      saw_summary = true;
      // "test result: ok. 3 passed; 0 failed; 0 ignored; ..."
      std::istringstream fields(line.substr(12));
      std::string word;
      int value = 0;
      while (fields >> word) {
        if (word == "passed;")
          outcome.passed += value;
        else if (word == "failed;")
          outcome.failed += value;
        else if (word == "ignored;")
          outcome.ignored += value;
        else
          value = std::atoi(word.c_str());
      }
      continue;
    }
    if (!starts_with(line, "test ")) continue;
    std::size_t sep = line.rfind(" ... ");
    if (sep == std::string::npos) continue;
    std::string name = line.substr(5, sep - 5);
    std::string verdict = line.substr(sep + 5);
    if (starts_with(verdict, "FAILED")) outcome.failed_names.push_back(name);
  }
  std::sort(outcome.failed_names.begin(), outcome.failed_names.end());
  outcome.failed_names.erase(
      std::unique(outcome.failed_names.begin(), outcome.failed_names.end()),
      outcome.failed_names.end());

  if (!saw_summary) {
    if (exit_code != 0)
      fail(Errc::build_failed,
           "test harness produced no results (exit " +
               std::to_string(exit_code) + "); the workspace likely does not "
               "build");
    outcome.ok = true;  // harness parse fallback: trust the exit code
    return outcome;
  }
  outcome.total = outcome.passed + outcome.failed;
  outcome.ok = outcome.failed == 0 && exit_code == 0;
  return outcome;
}

TestOutcome Toolchain::run_tests(const fs::path& workspace,
                                 const std::string& filter) const {
  proc::CommandSpec spec;
  spec.argv = cfg_.test_cmd;
  if (!filter.empty()) spec.argv.push_back(filter);
  spec.cwd = workspace;
  spec.env = cache_env(workspace);
  spec.timeout_secs = cfg_.test_timeout_secs;
  proc::CommandResult run = proc::run_command(spec);
  if (run.spawn_failed)
    fail(Errc::toolchain_missing,
         "cannot run '" + cfg_.test_cmd[0] + "': " + run.spawn_error);
  if (run.timed_out) {
    TestOutcome outcome = parse_test_output(run.output, 0);
    outcome.ok = false;
    outcome.raw_output += "\n[test suite timed out after " +
                          std::to_string(cfg_.test_timeout_secs) + "s]\n";
    outcome.failed_names.push_back("<suite-timeout>");
    outcome.failed = std::max(outcome.failed, 1);
    outcome.total = outcome.passed + outcome.failed;
    return outcome;
  }
  return parse_test_output(run.output, run.exit_code);
}

std::vector<std::string> Toolchain::list_tests(const fs::path& workspace) const {
  proc::CommandSpec spec;
  spec.argv = cfg_.list_cmd;
  spec.cwd = workspace;
  spec.env = cache_env(workspace);
  spec.timeout_secs = cfg_.check_timeout_secs;
  proc::CommandResult run = proc::run_command(spec);
  std::vector<std::string> names;
  if (run.spawn_failed || run.timed_out) return names;
  std::istringstream in(run.output);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t sep = line.rfind(": test");
    if (sep == std::string::npos || sep + 6 != line.size()) continue;
    names.push_back(line.substr(0, sep));
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace ctrans::toolchain
