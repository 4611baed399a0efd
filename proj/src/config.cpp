#include "config.hpp"

#include <cstdlib>
#include <sstream>

#include "error.hpp"
#include "fsutil.hpp"

namespace ctrans::config {

namespace {

void merge(Json& base, const Json& overlay) {
  if (!overlay.is_object() || !base.is_object()) {
    base = overlay;
    return;
  }
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object()) {
      merge(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

std::vector<std::string> string_list(const Json& j, const std::string& key) {
  std::vector<std::string> out;
  if (!j.is_array())
    fail(Errc::config_invalid, key + " must be an array of strings");
  for (const auto& item : j) {
    if (!item.is_string())
      fail(Errc::config_invalid, key + " must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

// Whitespace-split; used for command overrides from the environment.
std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

Json env_overrides() {
  Json j = Json::object();
  if (const char* command = std::getenv("CTRANS_AGENT_COMMAND")) {
    j["agent"]["command"] = split_words(command);
  }
  if (const char* timeout = std::getenv("CTRANS_AGENT_TIMEOUT_SECS")) {
    j["agent"]["timeout_secs"] = std::atof(timeout);
  }
  return j;
}

}  // namespace

Json PipelineConfig::to_json() const {
  Json j;
  j["scan"]["ignore_globs"] = scan.ignore_globs;
  j["scan"]["wrapper_macros"] = scan.wrapper_macros;
  j["scan"]["test_path_globs"] = scan.test_path_globs;
  j["scan"]["test_name_prefixes"] = scan.test_name_prefixes;
  j["scan"]["test_manifest"] = scan.test_manifest;
  j["scaffold"]["max_repair_attempts"] = scaffold.max_repair_attempts;
  j["scaffold"]["max_refactor_attempts"] = scaffold.max_refactor_attempts;
  j["scaffold"]["stage_timeout_secs"] = scaffold.stage_timeout_secs;
  j["agent"]["command"] = agent.command;
  j["agent"]["timeout_secs"] = agent.timeout_secs;
  j["agent"]["prompt_dir"] =
      agent.prompt_dir ? Json(agent.prompt_dir->string()) : Json(nullptr);
  j["agent"]["mock_script"] =
      agent.mock_script ? Json(agent.mock_script->string()) : Json(nullptr);
  j["agent"]["call_log"] =
      agent.call_log ? Json(agent.call_log->string()) : Json(nullptr);
  j["toolchain"]["check_cmd"] = toolchain.check_cmd;
  j["toolchain"]["test_cmd"] = toolchain.test_cmd;
  j["toolchain"]["list_cmd"] = toolchain.list_cmd;
  j["toolchain"]["check_timeout_secs"] = toolchain.check_timeout_secs;
  j["mapper"]["max_attempts"] = mapper_max_attempts;
  j["orchestrator"]["translate_retries"] = translate_retries;
  j["orchestrator"]["refactor_rounds"] = refactor_rounds;
  j["orchestrator"]["test_timeout_secs"] = toolchain.test_timeout_secs;
  j["mode"] = orchestrate::mode_name(mode);
  j["interfaces"] = interfaces ? Json(interfaces->string()) : Json(nullptr);
  return j;
}

PipelineConfig load_config(const std::optional<fs::path>& path,
                           const Json& cli_overrides) {
  Json merged = Json::object();
  if (path) {
    if (!fs::exists(*path))
      fail(Errc::config_invalid, "config file not found: " + path->string());
    Json file = Json::parse(fsutil::read_file(*path), nullptr,
                            /*allow_exceptions=*/false,
                            /*ignore_comments=*/true);
    if (file.is_discarded() || !file.is_object())
      fail(Errc::config_invalid,
           "config file is not a JSON object: " + path->string());
    merge(merged, file);
  }
  merge(merged, cli_overrides);
  merge(merged, env_overrides());

  PipelineConfig cfg;
  if (merged.contains("scan")) {
    const Json& s = merged["scan"];
    if (s.contains("ignore_globs"))
      cfg.scan.ignore_globs = string_list(s["ignore_globs"], "scan.ignore_globs");
    if (s.contains("wrapper_macros"))
      cfg.scan.wrapper_macros =
          string_list(s["wrapper_macros"], "scan.wrapper_macros");
    if (s.contains("test_path_globs"))
      cfg.scan.test_path_globs =
          string_list(s["test_path_globs"], "scan.test_path_globs");
    if (s.contains("test_name_prefixes"))
      cfg.scan.test_name_prefixes =
          string_list(s["test_name_prefixes"], "scan.test_name_prefixes");
    if (s.contains("test_manifest") && s["test_manifest"].is_string())
      cfg.scan.test_manifest = s["test_manifest"].get<std::string>();
  }
  if (merged.contains("scaffold")) {
    const Json& s = merged["scaffold"];
    if (s.contains("max_repair_attempts"))
      cfg.scaffold.max_repair_attempts = s["max_repair_attempts"].get<int>();
    if (s.contains("max_refactor_attempts"))
      cfg.scaffold.max_refactor_attempts =
          s["max_refactor_attempts"].get<int>();
    if (s.contains("stage_timeout_secs"))
      cfg.scaffold.stage_timeout_secs = s["stage_timeout_secs"].get<double>();
  }
  if (merged.contains("agent")) {
    const Json& a = merged["agent"];
    if (a.contains("command"))
      cfg.agent.command = string_list(a["command"], "agent.command");
    if (a.contains("timeout_secs"))
      cfg.agent.timeout_secs = a["timeout_secs"].get<double>();
    if (a.contains("prompt_dir") && a["prompt_dir"].is_string())
      cfg.agent.prompt_dir = fs::path(a["prompt_dir"].get<std::string>());
    if (a.contains("mock_script") && a["mock_script"].is_string())
      cfg.agent.mock_script = fs::path(a["mock_script"].get<std::string>());
    if (a.contains("call_log") && a["call_log"].is_string())
      cfg.agent.call_log = fs::path(a["call_log"].get<std::string>());
  }
  if (merged.contains("toolchain")) {
    const Json& t = merged["toolchain"];
    if (t.contains("check_cmd"))
      cfg.toolchain.check_cmd = string_list(t["check_cmd"], "toolchain.check_cmd");
    if (t.contains("test_cmd"))
      cfg.toolchain.test_cmd = string_list(t["test_cmd"], "toolchain.test_cmd");
    if (t.contains("list_cmd"))
      cfg.toolchain.list_cmd = string_list(t["list_cmd"], "toolchain.list_cmd");
    if (t.contains("check_timeout_secs"))
      cfg.toolchain.check_timeout_secs = t["check_timeout_secs"].get<int>();
  }
  if (merged.contains("mapper") && merged["mapper"].contains("max_attempts"))
    cfg.mapper_max_attempts = merged["mapper"]["max_attempts"].get<int>();
  if (merged.contains("orchestrator")) {
    const Json& o = merged["orchestrator"];
    if (o.contains("translate_retries"))
      cfg.translate_retries = o["translate_retries"].get<int>();
    if (o.contains("refactor_rounds"))
      cfg.refactor_rounds = o["refactor_rounds"].get<int>();
    if (o.contains("test_timeout_secs"))
      cfg.toolchain.test_timeout_secs = o["test_timeout_secs"].get<int>();
  }
  if (merged.contains("mode")) {
    auto mode = orchestrate::mode_from_name(merged["mode"].get<std::string>());
    if (!mode)
      fail(Errc::config_invalid,
           "mode must be one of full|base|no-interfaces|no-mapping");
    cfg.mode = *mode;
  }
  if (merged.contains("interfaces") && merged["interfaces"].is_string())
    cfg.interfaces = fs::path(merged["interfaces"].get<std::string>());

  cfg.scaffold.agent_timeout_secs = cfg.agent.timeout_secs;
  cfg.scaffold.prompt_dir = cfg.agent.prompt_dir;
  cfg.scaffold.expert_interfaces = cfg.interfaces;

  validate(cfg);
  return cfg;
}

void validate(const PipelineConfig& cfg) {
  if (cfg.scaffold.max_repair_attempts < 1)
    fail(Errc::config_invalid, "scaffold.max_repair_attempts must be >= 1");
  if (cfg.scaffold.max_refactor_attempts < 0)
    fail(Errc::config_invalid, "scaffold.max_refactor_attempts must be >= 0");
  if (cfg.scaffold.stage_timeout_secs <= 0)
    fail(Errc::config_invalid, "scaffold.stage_timeout_secs must be > 0");
  if (cfg.agent.timeout_secs <= 0)
    fail(Errc::config_invalid, "agent.timeout_secs must be > 0");
  if (cfg.mapper_max_attempts < 1)
    fail(Errc::config_invalid, "mapper.max_attempts must be >= 1");
  if (cfg.translate_retries < 1)
    fail(Errc::config_invalid, "orchestrator.translate_retries must be >= 1");
  if (cfg.refactor_rounds < 0)
    fail(Errc::config_invalid, "orchestrator.refactor_rounds must be >= 0");
  if (cfg.toolchain.test_timeout_secs < 1)
    fail(Errc::config_invalid, "orchestrator.test_timeout_secs must be >= 1");
  if (cfg.toolchain.check_cmd.empty())
    fail(Errc::config_invalid, "toolchain.check_cmd must not be empty");
  if (cfg.toolchain.test_cmd.empty())
    fail(Errc::config_invalid, "toolchain.test_cmd must not be empty");
  if (cfg.interfaces && !fs::exists(*cfg.interfaces))
    fail(Errc::config_invalid,
         "interfaces path does not exist: " + cfg.interfaces->string());
}

std::unique_ptr<agent::Backend> make_backend(const AgentConfig& cfg) {
  if (cfg.mock_script) {
    auto mock = agent::MockBackend::load_script(*cfg.mock_script);
    if (cfg.call_log) {
      std::error_code ec;
      fs::remove(*cfg.call_log, ec);
      mock->set_call_log(*cfg.call_log);
    }
    return mock;
  }
  if (!cfg.command.empty())
    return std::make_unique<agent::SubprocessBackend>(cfg.command);
  return nullptr;
}

}  // namespace ctrans::config
