#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jsonx.hpp"

namespace ctrans::agent {

namespace fs = std::filesystem;

enum class Role { scaffold, map, translate, compile_repair, refactor, verify };

const char* role_name(Role role);
std::optional<Role> role_from_name(std::string_view name);

enum class Status { completed, timed_out, backend_error };

struct Request {
  Role role = Role::translate;
  std::string prompt;
  // Project directories the agent may touch. By convention the last entry is
  // the mutable target workspace; earlier entries are read-only context.
  std::vector<fs::path> workspace_paths;
  double timeout_secs = 900;
  int attempt_index = 0;
};

// Carries no judgement about whether the task succeeded; callers must verify
// workspace state with deterministic checks.
struct Result {
  Status status = Status::backend_error;
  std::string transcript;
  std::optional<Json> structured_payload;  // map role only
  double wall_secs = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Result invoke(const Request& request) = 0;
};

// Launches an external agent CLI. argv entries may contain the placeholders
// {PROMPT_FILE} (path of a file holding the rendered prompt) and {WORKSPACE}
// (the mutable target workspace).
class SubprocessBackend : public Backend {
 public:
  explicit SubprocessBackend(std::vector<std::string> command);
  Result invoke(const Request& request) override;

 private:
  std::vector<std::string> command_;
  int invocation_count_ = 0;
};

// Replays a scripted JSON step list; used by tests and dry runs. Each step:
//   {"match": {"role": "translate", "prompt_contains": "..."},
//    "actions": [{"write_file": {"path": "...", "content": "..."}},
//                {"append_file": {...}}, {"delete_file": {"path": "..."}},
//                {"emit_text": {"text": "..."}}, {"emit_json": {"value": ...}},
//                {"sleep": {"seconds": 1.5}}],
//    "exit": 0}
// invoke() consumes the first matching unconsumed step; a request with no
// matching step raises Errc::script_exhausted. Sleep advances a virtual clock
// so timeout behavior is testable without real waiting.
class MockBackend : public Backend {
 public:
  static std::unique_ptr<MockBackend> load_script(const fs::path& path);
  static std::unique_ptr<MockBackend> from_json(const Json& script);

  Result invoke(const Request& request) override;

  struct CallRecord {
    Role role;
    std::string prompt;
    int step_index;  // -1 would mean unmatched, but unmatched throws
  };
  const std::vector<CallRecord>& calls() const { return calls_; }
  int calls_for(Role role) const;
  int unconsumed_steps() const;

  // Appends one JSON line per invocation: {"role", "step", "attempt"}.
  void set_call_log(fs::path path) { call_log_ = std::move(path); }

 private:
  struct Step {
    Role role;
    std::string prompt_contains;
    Json actions;
    int exit_code = 0;
    bool consumed = false;
  };
  std::vector<Step> steps_;
  std::vector<CallRecord> calls_;
  std::optional<fs::path> call_log_;
};

// Extracts the last syntactically valid JSON object embedded in free text.
std::optional<Json> last_json_object(const std::string& transcript);

}  // namespace ctrans::agent
