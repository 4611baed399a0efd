#include "pipeline.hpp"

#include "error.hpp"
#include "fsutil.hpp"

namespace ctrans::pipeline {

namespace {

constexpr const char* kArtifactDir = ".ctrans";

scanner::SourceModel analyze(const config::PipelineConfig& cfg,
                             const fs::path& c_root) {
  return scanner::scan_repository(c_root, cfg.scan);
}

mapper::MappingTable load_mappings(const fs::path& path) {
  Json j = Json::parse(fsutil::read_file(path), nullptr,
                       /*allow_exceptions=*/false);
  if (j.is_discarded())
    fail(Errc::config_invalid,
         "mappings file is not valid JSON: " + path.string());
  return mapper::MappingTable::from_json(j);
}

graph::TranslationSchedule load_schedule(const fs::path& path) {
  Json j = Json::parse(fsutil::read_file(path), nullptr,
                       /*allow_exceptions=*/false);
  if (j.is_discarded())
    fail(Errc::config_invalid,
         "schedule file is not valid JSON: " + path.string());
  return graph::TranslationSchedule::from_json(j);
}

orchestrate::OrchestratorConfig orchestrator_config(
    const config::PipelineConfig& cfg) {
  orchestrate::OrchestratorConfig out;
  out.translate_retries = cfg.translate_retries;
  out.compile_repair_attempts = cfg.scaffold.max_repair_attempts;
  out.refactor_rounds = cfg.refactor_rounds;
  out.agent_timeout_secs = cfg.agent.timeout_secs;
  out.mode = cfg.mode;
  out.prompt_dir = cfg.agent.prompt_dir;
  return out;
}

}  // namespace

int classify_exit(const orchestrate::PipelineReport& report) {
  if (report.aborted) return 4;
  if (!report.build.ok) return 2;
  if (!report.tests.ok) return 3;
  return 0;
}

Json analyze_json(const config::PipelineConfig& cfg, const fs::path& c_root,
                  bool schedule) {
  scanner::SourceModel model = analyze(cfg, c_root);
  if (!schedule) return model.to_json();
  Diagnostics diags;
  return graph::build_schedule(model, cfg.scan, &diags).to_json();
}

Json scaffold_json(const config::PipelineConfig& cfg, const fs::path& c_root,
                   const fs::path& workspace) {
  scanner::SourceModel model = analyze(cfg, c_root);
  Diagnostics diags;
  auto schedule = graph::build_schedule(model, cfg.scan, &diags);
  auto backend = config::make_backend(cfg.agent);
  toolchain::Toolchain toolchain(cfg.toolchain);
  auto report =
      scaffold::run_scaffold(model, schedule, cfg.scan, c_root, workspace,
                             backend.get(), toolchain, cfg.scaffold, &diags);
  Json j = report.to_json();
  j["diagnostics"] = diagnostics_json(diags);
  return j;
}

Json map_json(const config::PipelineConfig& cfg, const fs::path& c_root,
              const fs::path& workspace,
              const std::optional<fs::path>& schedule_path) {
  scanner::SourceModel model = analyze(cfg, c_root);
  Diagnostics diags;
  graph::TranslationSchedule schedule =
      schedule_path ? load_schedule(*schedule_path)
                    : graph::build_schedule(model, cfg.scan, &diags);
  auto backend = config::make_backend(cfg.agent);
  mapper::MapperConfig mcfg;
  mcfg.max_attempts = cfg.mapper_max_attempts;
  mcfg.agent_timeout_secs = cfg.agent.timeout_secs;
  mcfg.prompt_dir = cfg.agent.prompt_dir;
  return mapper::map_all(schedule, model, c_root, workspace, backend.get(),
                         mcfg, &diags)
      .to_json();
}

Json translate_json(const config::PipelineConfig& cfg, const fs::path& c_root,
                    const fs::path& workspace,
                    const std::optional<fs::path>& schedule_path,
                    const std::optional<fs::path>& mappings_path,
                    const std::optional<fs::path>& state_path, bool resume,
                    int* exit_code) {
  scanner::SourceModel model = analyze(cfg, c_root);
  Diagnostics diags;
  graph::TranslationSchedule schedule =
      schedule_path ? load_schedule(*schedule_path)
                    : graph::build_schedule(model, cfg.scan, &diags);
  mapper::MappingTable table;
  if (mappings_path) table = load_mappings(*mappings_path);
  auto backend = config::make_backend(cfg.agent);
  toolchain::Toolchain toolchain(cfg.toolchain);
  auto report = orchestrate::run(model, schedule, table, c_root, workspace,
                                 backend.get(), toolchain,
                                 orchestrator_config(cfg), state_path, resume,
                                 &diags);
  if (exit_code) *exit_code = classify_exit(report);
  return report.to_json();
}

Json audit_json(const config::PipelineConfig& cfg, const fs::path& c_root,
                const fs::path& workspace,
                const std::optional<fs::path>& mappings_path) {
  scanner::SourceModel model = analyze(cfg, c_root);
  std::optional<mapper::MappingTable> table;
  if (mappings_path) table = load_mappings(*mappings_path);
  toolchain::Toolchain toolchain(cfg.toolchain);
  return analyzers::audit(workspace, model, table ? &*table : nullptr,
                          &toolchain)
      .to_json();
}

RunResult run_pipeline(const config::PipelineConfig& cfg, const fs::path& c_root,
                       const fs::path& workspace, bool resume) {
  RunResult result;
  fs::path artifacts = workspace / kArtifactDir;
  toolchain::Toolchain toolchain(cfg.toolchain);
  auto backend = config::make_backend(cfg.agent);
  Diagnostics diags;

  scanner::SourceModel model = analyze(cfg, c_root);
  graph::TranslationSchedule schedule =
      graph::build_schedule(model, cfg.scan, &diags);

  const bool fresh = !resume || !fs::exists(artifacts / "state.json");
  const bool needs_skeleton = cfg.mode == orchestrate::Mode::full ||
                              cfg.mode == orchestrate::Mode::no_mapping;

  if (fresh) {
    if (needs_skeleton) {
      auto skeleton = scaffold::run_scaffold(model, schedule, cfg.scan, c_root,
                                             workspace, backend.get(),
                                             toolchain, cfg.scaffold, &diags);
      fsutil::write_file(artifacts / "skeleton.json",
                         skeleton.to_json().dump(2) + "\n");
      if (!skeleton.pipeline_ready()) {
        result.report.aborted = true;
        result.report.abort_reason = skeleton.compilable
                                         ? "scaffold_stage_failed"
                                         : "scaffold_not_compilable";
        result.report_json = result.report.to_json();
        result.report_json["skeleton"] = skeleton.to_json();
        result.exit_code = 4;
        fsutil::write_file(artifacts / "report.json",
                           result.report_json.dump(2) + "\n");
        return result;
      }
    } else {
      // base / no-interfaces: a bare project shell, no skeleton
      toolchain.init_project(workspace,
                             workspace.filename().string().empty()
                                 ? "translated"
                                 : workspace.filename().string());
    }
    fsutil::write_file(artifacts / "model.json", model.to_json().dump(2) + "\n");
    fsutil::write_file(artifacts / "schedule.json",
                       schedule.to_json().dump(2) + "\n");
  }

  mapper::MappingTable table;
  if (cfg.mode == orchestrate::Mode::full) {
    if (!fresh && fs::exists(artifacts / "mappings.json")) {
      table = load_mappings(artifacts / "mappings.json");
    } else {
      mapper::MapperConfig mcfg;
      mcfg.max_attempts = cfg.mapper_max_attempts;
      mcfg.agent_timeout_secs = cfg.agent.timeout_secs;
      mcfg.prompt_dir = cfg.agent.prompt_dir;
      table = mapper::map_all(schedule, model, c_root, workspace,
                              backend.get(), mcfg, &diags);
      fsutil::write_file(artifacts / "mappings.json",
                         table.to_json().dump(2) + "\n");
    }
  }

  result.report = orchestrate::run(model, schedule, table, c_root, workspace,
                                   backend.get(), toolchain,
                                   orchestrator_config(cfg),
                                   artifacts / "state.json", resume, &diags);
  result.exit_code = classify_exit(result.report);
  result.report_json = result.report.to_json();
  result.report_json["mode"] = orchestrate::mode_name(cfg.mode);
  fsutil::write_file(artifacts / "report.json",
                     result.report_json.dump(2) + "\n");
  return result;
}

}  // namespace ctrans::pipeline
