#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "config.hpp"
#include "jsonx.hpp"
#include "orchestrator.hpp"

namespace ctrans::pipeline {

namespace fs = std::filesystem;

// Exit classification for a completed pipeline:
//   0 build and tests ok; 2 build failed; 3 tests failed; 4 aborted.
int classify_exit(const orchestrate::PipelineReport& report);

struct RunResult {
  orchestrate::PipelineReport report;
  Json report_json;
  int exit_code = 0;
};

// Chains analyze -> scaffold (or expert import) -> map -> translate -> audit
// according to the configured mode. Artifacts (model, schedule, mappings,
// state, report) are written under <workspace>/.ctrans/.
RunResult run_pipeline(const config::PipelineConfig& cfg, const fs::path& c_root,
                       const fs::path& workspace, bool resume = false);

// Stage entry points shared by the CLI/C API subcommands.
Json analyze_json(const config::PipelineConfig& cfg, const fs::path& c_root,
                  bool schedule);
Json scaffold_json(const config::PipelineConfig& cfg, const fs::path& c_root,
                   const fs::path& workspace);
Json map_json(const config::PipelineConfig& cfg, const fs::path& c_root,
              const fs::path& workspace,
              const std::optional<fs::path>& schedule_path);
Json translate_json(const config::PipelineConfig& cfg, const fs::path& c_root,
                    const fs::path& workspace,
                    const std::optional<fs::path>& schedule_path,
                    const std::optional<fs::path>& mappings_path,
                    const std::optional<fs::path>& state_path, bool resume,
                    int* exit_code = nullptr);
Json audit_json(const config::PipelineConfig& cfg, const fs::path& c_root,
                const fs::path& workspace,
                const std::optional<fs::path>& mappings_path);

}  // namespace ctrans::pipeline
