#include <doctest.h>

#include "config.hpp"
#include "error.hpp"
#include "fsutil.hpp"
#include "pipeline.hpp"
#include "test_util.hpp"

using namespace ctrans;
using testutil::TempDir;
using testutil::write;

namespace {

config::PipelineConfig mini_config() {
  Json overrides;
  overrides["agent"]["mock_script"] =
      testutil::fixture("mock_mini.json").string();
  return config::load_config(std::nullopt, overrides);
}

}  // namespace

TEST_CASE("run_pipeline completes the mini fixture end to end") {
  TempDir dir;
  auto ws = dir / "translated";
  auto result = pipeline::run_pipeline(mini_config(),
                                       testutil::fixture("c_mini"), ws);
  CHECK(result.exit_code == 0);
  CHECK(result.report.build.ok);
  CHECK(result.report.tests.ok);
  CHECK(result.report_json.at("coverage").at("functional_pct") == "100.0");

  // stage artifacts land under the hidden pipeline directory
  for (const char* name : {"model.json", "schedule.json", "mappings.json",
                           "skeleton.json", "state.json", "report.json"}) {
    CHECK(std::filesystem::exists(ws / ".ctrans" / name));
  }
  // the audit never sees the pipeline directory
  CHECK(result.report.safety.total_loc > 0);
}

TEST_CASE("run_pipeline aborts with exit 4 when the agent is unreachable") {
  TempDir dir;
  Json overrides;
  overrides["agent"]["command"] =
      Json::array({"/no/such/agent-binary", "{PROMPT_FILE}"});
  auto cfg = config::load_config(std::nullopt, overrides);
  auto result = pipeline::run_pipeline(cfg, testutil::fixture("c_mini"),
                                       dir / "translated");
  CHECK(result.exit_code == 4);
  CHECK(result.report.aborted);
  CHECK(result.report.abort_reason == "scaffold_stage_failed");
}

TEST_CASE("run_pipeline resume picks up an interrupted translation") {
  TempDir dir;
  auto ws = dir / "translated";
  auto cfg = mini_config();
  cfg.translate_retries = 1;

  // interrupt by exhausting the script midway: drop the last two translate
  // steps so units 2 and 3 fail, then resume with the full script
  Json script =
      Json::parse(fsutil::read_file(testutil::fixture("mock_mini.json")));
  Json truncated = Json::array();
  int translate_seen = 0;
  for (const auto& step : script) {
    if (step["match"]["role"] == "translate" && ++translate_seen > 2) continue;
    truncated.push_back(step);
  }
  write(dir / "truncated.json", truncated.dump());
  cfg.agent.mock_script = dir / "truncated.json";

  // the exhausted script kills the run mid-pipeline, after unit 1's checkpoint
  try {
    pipeline::run_pipeline(cfg, testutil::fixture("c_mini"), ws);
    FAIL("expected ScriptExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::script_exhausted);
  }
  CHECK(std::filesystem::exists(ws / ".ctrans" / "state.json"));

  auto full_cfg = mini_config();
  auto resumed = pipeline::run_pipeline(full_cfg, testutil::fixture("c_mini"),
                                        ws, /*resume=*/true);
  CHECK(resumed.exit_code == 0);
  CHECK(resumed.report.build.ok);
}
