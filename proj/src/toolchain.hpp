#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jsonx.hpp"

namespace ctrans::toolchain {

namespace fs = std::filesystem;

struct DiagnosticMsg {
  std::string level;  // "error" | "warning"
  std::string code;
  std::string message;
  std::string file;
  int line = 0;
};

struct BuildOutcome {
  bool ok = false;
  std::vector<DiagnosticMsg> diagnostics;
  std::string raw_output;  // kept in memory; excluded from report JSON

  int error_count() const;
  Json to_json() const;
};

struct TestOutcome {
  bool ok = false;
  int total = 0;
  int passed = 0;
  int failed = 0;
  int ignored = 0;
  std::vector<std::string> failed_names;
  std::string raw_output;

  Json to_json() const;
};

struct ToolchainConfig {
  std::vector<std::string> check_cmd{"cargo", "check", "--all-targets",
                                     "--message-format=json", "--quiet"};
  std::vector<std::string> test_cmd{"cargo", "test", "--no-fail-fast"};
  std::vector<std::string> list_cmd{"cargo", "test", "--quiet", "--", "--list"};
  int check_timeout_secs = 600;
  int test_timeout_secs = 300;
};

class Toolchain {
 public:
  explicit Toolchain(ToolchainConfig cfg = {});

  // Creates a fresh library project (manifest + src/lib.rs). The path must be
  // absent or an empty directory. Verifies the configured toolchain binary is
  // reachable so misconfiguration surfaces before any agent work happens.
  void init_project(const fs::path& path, const std::string& name) const;

  // Type-checks the workspace with machine-readable diagnostics. Never
  // mutates the source tree; build artifacts go to a hidden per-workspace
  // cache directory.
  BuildOutcome check(const fs::path& workspace) const;

  TestOutcome run_tests(const fs::path& workspace,
                        const std::string& filter = "") const;

  // Enumerates harness test names ("module::name" entries).
  std::vector<std::string> list_tests(const fs::path& workspace) const;

  const ToolchainConfig& config() const { return cfg_; }

  static std::string sanitize_crate_name(const std::string& raw);

 private:
  ToolchainConfig cfg_;
  std::vector<std::pair<std::string, std::string>> cache_env(
      const fs::path& workspace) const;
};

// Parses libtest "pretty" output lines into a TestOutcome. Exposed for tests.
TestOutcome parse_test_output(const std::string& output, int exit_code);
BuildOutcome parse_check_output(const std::string& output, int exit_code);

}  // namespace ctrans::toolchain
