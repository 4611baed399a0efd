#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ctrans::proc {

struct CommandSpec {
  std::vector<std::string> argv;
  std::filesystem::path cwd;
  std::vector<std::pair<std::string, std::string>> env;  // added to inherited env
  double timeout_secs = 0;  // 0 = no timeout
};

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
  std::string spawn_error;
  std::string output;  // stdout followed by stderr
  double wall_secs = 0;
};

// Runs argv in its own process group; on timeout the whole group is killed
// and reaped before returning. stdout/stderr are captured separately and
// concatenated in the result.
CommandResult run_command(const CommandSpec& spec);

bool command_on_path(const std::string& name);

}  // namespace ctrans::proc
