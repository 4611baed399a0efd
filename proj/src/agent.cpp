#include "agent.hpp"

#include <unistd.h>

#include <algorithm>
#include <fstream>

#include "error.hpp"
#include "fsutil.hpp"
#include "subprocess.hpp"

namespace ctrans::agent {

const char* role_name(Role role) {
  switch (role) {
    case Role::scaffold: return "scaffold";
    case Role::map: return "map";
    case Role::translate: return "translate";
    case Role::compile_repair: return "compile_repair";
    case Role::refactor: return "refactor";
    case Role::verify: return "verify";
  }
  return "translate";
}

std::optional<Role> role_from_name(std::string_view name) {
  if (name == "scaffold") return Role::scaffold;
  if (name == "map") return Role::map;
  if (name == "translate") return Role::translate;
  if (name == "compile_repair") return Role::compile_repair;
  if (name == "refactor") return Role::refactor;
  if (name == "verify") return Role::verify;
  return std::nullopt;
}

std::optional<Json> last_json_object(const std::string& transcript) {
  std::optional<Json> last;
  const std::size_t n = transcript.size();
  std::size_t i = 0;
  while (i < n) {
    if (transcript[i] != '{') {
      ++i;
      continue;
    }
    // find the balanced closing brace, string-aware
    int depth = 0;
    bool in_string = false;
    std::size_t j = i;
    std::size_t end = std::string::npos;
    for (; j < n; ++j) {
      char c = transcript[j];
      if (in_string) {
        if (c == '\\') {
          ++j;
        } else if (c == '"') {
          in_string = false;
        }
      } else if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          end = j;
          break;
        }
      }
    }
    if (end == std::string::npos) {
      ++i;
      continue;
    }
    Json parsed = Json::parse(transcript.substr(i, end - i + 1), nullptr,
                              /*allow_exceptions=*/false);
    if (!parsed.is_discarded() && parsed.is_object()) {
      last = std::move(parsed);
      i = end + 1;
    } else {
      ++i;
    }
  }
  return last;
}

SubprocessBackend::SubprocessBackend(std::vector<std::string> command)
    : command_(std::move(command)) {
  if (command_.empty())
    fail(Errc::config_invalid, "agent.command must not be empty");
}

Result SubprocessBackend::invoke(const Request& request) {
  Result result;
  if (request.workspace_paths.empty())
    fail(Errc::invalid_argument, "agent request has no workspace paths");
  fs::path workspace = request.workspace_paths.back();

  fs::path prompt_file =
      fs::temp_directory_path() /
      ("ctrans-prompt-" + std::string(role_name(request.role)) + "-" +
       std::to_string(::getpid()) + "-" + std::to_string(invocation_count_++) +
       ".txt");
  fsutil::write_file(prompt_file, request.prompt);

  proc::CommandSpec spec;
  for (const auto& part : command_) {
    std::string expanded = part;
    auto replace_all = [&](const std::string& key, const std::string& value) {
      std::size_t pos = 0;
      while ((pos = expanded.find(key, pos)) != std::string::npos) {
        expanded.replace(pos, key.size(), value);
        pos += value.size();
      }
    };
    replace_all("{PROMPT_FILE}", prompt_file.string());
    replace_all("{WORKSPACE}", workspace.string());
    spec.argv.push_back(std::move(expanded));
  }
  spec.cwd = workspace;
  spec.timeout_secs = request.timeout_secs;

  proc::CommandResult run = proc::run_command(spec);
  std::error_code ec;
  fs::remove(prompt_file, ec);

  result.transcript = run.output;
  result.wall_secs = run.wall_secs;
  if (run.spawn_failed) {
    result.status = Status::backend_error;
    result.transcript = run.spawn_error;
    return result;
  }
  if (run.timed_out) {
    result.status = Status::timed_out;
    result.wall_secs = std::max(result.wall_secs, request.timeout_secs);
    return result;
  }
  if (run.exit_code != 0) {
    result.status = Status::backend_error;
    return result;
  }
  result.status = Status::completed;
  if (request.role == Role::map)
    result.structured_payload = last_json_object(result.transcript);
  return result;
}

std::unique_ptr<MockBackend> MockBackend::load_script(const fs::path& path) {
  Json script = Json::parse(fsutil::read_file(path), nullptr,
                            /*allow_exceptions=*/false);
  if (script.is_discarded())
    fail(Errc::config_invalid, "mock script is not valid JSON: " + path.string());
  return from_json(script);
}

std::unique_ptr<MockBackend> MockBackend::from_json(const Json& script) {
  if (!script.is_array())
    fail(Errc::config_invalid, "mock script must be a JSON array of steps");
  auto backend = std::make_unique<MockBackend>();
  for (const auto& step_json : script) {
    Step step;
    const auto& match = step_json.at("match");
    auto role = role_from_name(match.at("role").get<std::string>());
    if (!role)
      fail(Errc::config_invalid,
           "mock step has unknown role: " + match.at("role").dump());
    step.role = *role;
    if (match.contains("prompt_contains"))
      step.prompt_contains = match.at("prompt_contains").get<std::string>();
    step.actions = step_json.value("actions", Json::array());
    step.exit_code = step_json.value("exit", 0);
    backend->steps_.push_back(std::move(step));
  }
  return backend;
}

namespace {

// Mock file actions resolve against the target workspace and must stay
// inside one of the declared workspace_paths.
fs::path resolve_action_path(const Request& request, const std::string& raw) {
  fs::path p(raw);
  if (p.is_absolute())
    fail(Errc::internal, "mock action uses an absolute path: " + raw);
  fs::path target =
      fs::absolute(request.workspace_paths.back() / p).lexically_normal();
  std::string target_str = target.generic_string();
  for (const auto& ws : request.workspace_paths) {
    std::string base = fs::absolute(ws).lexically_normal().generic_string();
    while (!base.empty() && base.back() == '/') base.pop_back();
    if (target_str == base || target_str.rfind(base + "/", 0) == 0)
      return target;
  }
  fail(Errc::internal, "mock action escapes the declared workspaces: " + raw);
}

}  // namespace

Result MockBackend::invoke(const Request& request) {
  int step_index = -1;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    Step& step = steps_[i];
    if (step.consumed || step.role != request.role) continue;
    if (!step.prompt_contains.empty() &&
        request.prompt.find(step.prompt_contains) == std::string::npos)
      continue;
    step_index = static_cast<int>(i);
    break;
  }
  if (step_index < 0)
    fail(Errc::script_exhausted,
         std::string("no scripted step matches role '") +
             role_name(request.role) + "' at attempt " +
             std::to_string(request.attempt_index));

  Step& step = steps_[step_index];
  step.consumed = true;
  calls_.push_back({request.role, request.prompt, step_index});
  if (call_log_) {
    Json line;
    line["role"] = role_name(request.role);
    line["step"] = step_index;
    line["attempt"] = request.attempt_index;
    std::ofstream out(*call_log_, std::ios::app);
    out << line.dump() << "\n";
  }

  Result result;
  double virtual_clock = 0;
  for (const auto& action : step.actions) {
    if (action.contains("sleep")) {
      virtual_clock += action.at("sleep").value("seconds", 0.0);
      if (virtual_clock >= request.timeout_secs) {
        result.status = Status::timed_out;
        result.wall_secs = std::max(virtual_clock, request.timeout_secs);
        return result;
      }
      continue;
    }
    if (action.contains("write_file")) {
      const auto& a = action.at("write_file");
      fsutil::write_file(
          resolve_action_path(request, a.at("path").get<std::string>()),
          a.at("content").get<std::string>());
    } else if (action.contains("append_file")) {
      const auto& a = action.at("append_file");
      fs::path p = resolve_action_path(request, a.at("path").get<std::string>());
      std::string existing = fs::exists(p) ? fsutil::read_file(p) : "";
      fsutil::write_file(p, existing + a.at("content").get<std::string>());
    } else if (action.contains("delete_file")) {
      const auto& a = action.at("delete_file");
      std::error_code ec;
      fs::remove(resolve_action_path(request, a.at("path").get<std::string>()),
                 ec);
    } else if (action.contains("emit_text")) {
      result.transcript += action.at("emit_text").at("text").get<std::string>();
    } else if (action.contains("emit_json")) {
      result.transcript += action.at("emit_json").at("value").dump();
      result.transcript += "\n";
    } else {
      fail(Errc::config_invalid, "unknown mock action: " + action.dump());
    }
  }

  result.wall_secs = virtual_clock;
  if (step.exit_code != 0) {
    result.status = Status::backend_error;
    return result;
  }
  result.status = Status::completed;
  if (request.role == Role::map)
    result.structured_payload = last_json_object(result.transcript);
  return result;
}

int MockBackend::calls_for(Role role) const {
  return static_cast<int>(
      std::count_if(calls_.begin(), calls_.end(),
                    [&](const CallRecord& c) { return c.role == role; }));
}

int MockBackend::unconsumed_steps() const {
  return static_cast<int>(std::count_if(
      steps_.begin(), steps_.end(), [](const Step& s) { return !s.consumed; }));
}

}  // namespace ctrans::agent
