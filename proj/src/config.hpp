#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jsonx.hpp"
#include "orchestrator.hpp"
#include "scaffolder.hpp"
#include "scanner.hpp"
#include "toolchain.hpp"

namespace ctrans::config {

namespace fs = std::filesystem;

struct AgentConfig {
  std::vector<std::string> command;       // argv with {PROMPT_FILE}/{WORKSPACE}
  double timeout_secs = 900;
  std::optional<fs::path> prompt_dir;
  std::optional<fs::path> mock_script;    // scripted backend when set
  std::optional<fs::path> call_log;       // JSONL invocation log (mock only)
};

struct PipelineConfig {
  scanner::ScanConfig scan;
  scaffold::ScaffoldConfig scaffold;
  AgentConfig agent;
  toolchain::ToolchainConfig toolchain;
  int mapper_max_attempts = 3;
  int translate_retries = 3;
  int refactor_rounds = 1;
  orchestrate::Mode mode = orchestrate::Mode::full;
  std::optional<fs::path> interfaces;  // expert skeleton dir

  Json to_json() const;
};

// Layered load: config file, then CLI overrides, then environment variables
// (CTRANS_ prefix; reserved for values like agent credentials that must not
// live in config files). Overrides use the same nested JSON shape as the
// file. Validation errors name the offending key.
PipelineConfig load_config(const std::optional<fs::path>& path,
                           const Json& cli_overrides = Json::object());

void validate(const PipelineConfig& cfg);

// Builds the agent backend described by the config; null when no backend is
// configured (static-only pipelines).
std::unique_ptr<agent::Backend> make_backend(const AgentConfig& cfg);

}  // namespace ctrans::config
