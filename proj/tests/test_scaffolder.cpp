#include <doctest.h>

#include "dep_graph.hpp"
#include "fsutil.hpp"
#include "scaffolder.hpp"
#include "scanner.hpp"
#include "test_util.hpp"

using namespace ctrans;
using scaffold::Stage;
using scaffold::StageOutcome;
using testutil::TempDir;
using testutil::write;

namespace {

toolchain::Toolchain cargo() { return toolchain::Toolchain(toolchain::ToolchainConfig{}); }

}  // namespace

TEST_CASE("flatten_module_name") {
  CHECK(scaffold::flatten_module_name("src/util.c") == "src_util");
  CHECK(scaffold::flatten_module_name("a-b/x.y.c") == "a_b_x_y");
  CHECK(scaffold::flatten_module_name("3d.c") == "m3d");
  CHECK(scaffold::flatten_module_name("test.c") == "test_");  // keyword-ish
}

TEST_CASE("plan_modules applies the _h rule") {
  auto model = scanner::scan_repository(testutil::fixture("c_project"), {});
  auto plan = scaffold::plan_modules(model, {});
  // definition-carrying header keeps its own module
  CHECK(plan.module_of.at("src/buffer.h") == "src/src_buffer_h.rs");
  // declaration-only headers fold into the paired .c module
  CHECK(plan.module_of.at("src/util.h") == "src/src_util.rs");
  CHECK(plan.module_of.at("src/parser.h") == "src/src_parser.rs");
  CHECK(plan.module_of.at("src/buffer.c") == "src/src_buffer.rs");
  CHECK(plan.module_of.at("tests/buffer_test.c") ==
        "tests/tests_buffer_test.rs");
  CHECK(plan.lib_modules ==
        std::vector<std::string>{"src_buffer", "src_buffer_h", "src_parser",
                                 "src_util"});
}

TEST_CASE("plan_modules: header with object definitions keeps a module") {
  TempDir dir;
  write(dir / "tbl.c", "#include \"tbl.h\"\nint use_tbl(void){return table[0];}\n");
  write(dir / "tbl.h", "static int table[] = {1, 2, 3};\n");
  auto model = scanner::scan_repository(dir.path(), {});
  auto plan = scaffold::plan_modules(model, {});
  CHECK(plan.module_of.at("tbl.h") == "src/tbl_h.rs");
}

TEST_CASE("compile_repair: clean workspace needs zero agent calls") {
  TempDir dir;
  auto ws = dir / "ws";
  cargo().init_project(ws, "clean");
  write(ws / "src/lib.rs", "pub fn ok() -> i32 { 1 }\n");
  int attempts = -1;
  auto outcome = scaffold::compile_repair(ws, nullptr, cargo(), 3, 30,
                                          std::nullopt, {ws}, &attempts);
  CHECK(outcome == StageOutcome::ok);
  CHECK(attempts == 0);
}

TEST_CASE("compile_repair: fix lands on the second attempt") {
  TempDir dir;
  auto ws = dir / "ws";
  cargo().init_project(ws, "fixme");
  write(ws / "src/lib.rs", "pub fn f() -> i32 { missing_one }\n");
  auto mock = agent::MockBackend::from_json(Json::parse(R"([
    {"match": {"role": "compile_repair", "prompt_contains": ""},
     "actions": [{"write_file": {"path": "src/lib.rs",
                    "content": "pub fn f() -> i32 { missing_two }\n"}}],
     "exit": 0},
    {"match": {"role": "compile_repair", "prompt_contains": ""},
     "actions": [{"write_file": {"path": "src/lib.rs",
                    "content": "pub fn f() -> i32 { 2 }\n"}}],
     "exit": 0}
  ])"));
  int attempts = -1;
  auto outcome = scaffold::compile_repair(ws, mock.get(), cargo(), 5, 30,
                                          std::nullopt, {ws}, &attempts);
  CHECK(outcome == StageOutcome::ok);
  CHECK(attempts == 2);
  // the repair prompt carried structured diagnostics
  CHECK(mock->calls()[0].prompt.find("missing_one") != std::string::npos);
}

TEST_CASE("compile_repair: exhausted after N failed repairs") {
  TempDir dir;
  auto ws = dir / "ws";
  cargo().init_project(ws, "never");
  write(ws / "src/lib.rs", "pub fn f() -> i32 { broken }\n");
  auto mock = agent::MockBackend::from_json(Json::parse(R"([
    {"match": {"role": "compile_repair", "prompt_contains": ""},
     "actions": [], "exit": 0},
    {"match": {"role": "compile_repair", "prompt_contains": ""},
     "actions": [], "exit": 0},
    {"match": {"role": "compile_repair", "prompt_contains": ""},
     "actions": [], "exit": 0}
  ])"));
  int attempts = -1;
  auto outcome = scaffold::compile_repair(ws, mock.get(), cargo(), 3, 30,
                                          std::nullopt, {ws}, &attempts);
  CHECK(outcome == StageOutcome::exhausted);
  CHECK(attempts == 3);
  CHECK(mock->calls().size() == 3);
}

TEST_CASE("safety_gate") {
  TempDir dir;
  SUBCASE("raw pointer parameter fails the gate") {
    write(dir / "src/a.rs", "pub fn f(p: *mut u8) { let _ = p; }\n");
    CHECK(!scaffold::safety_gate(dir.path()));
  }
  SUBCASE("fully safe tree passes") {
    write(dir / "src/a.rs", "pub fn f(x: &mut [u8]) { x[0] = 1; }\n");
    CHECK(scaffold::safety_gate(dir.path()));
  }
  SUBCASE("unsafe keyword inside a comment is ignored") {
    write(dir / "src/a.rs",
          "// unsafe { *p = 0; }\npub fn f() -> i32 { 1 }\n");
    CHECK(scaffold::safety_gate(dir.path()));
  }
  SUBCASE("an unsafe block fails the gate") {
    write(dir / "src/a.rs",
          "pub fn f(p: *const i32) -> i32 { unsafe { *p } }\n");
    CHECK(!scaffold::safety_gate(dir.path()));
  }
}

TEST_CASE("run_scaffold drives the mini fixture to a compilable skeleton") {
  auto c_root = testutil::fixture("c_mini");
  auto model = scanner::scan_repository(c_root, {});
  Diagnostics diags;
  auto schedule = graph::build_schedule(model, {}, &diags);
  REQUIRE(schedule.units.size() == 4);

  TempDir dir;
  auto ws = dir / "translated";
  auto mock = agent::MockBackend::load_script(
      testutil::fixture("mock_mini.json"));
  scaffold::ScaffoldConfig cfg;
  cfg.stage_timeout_secs = 120;
  cfg.agent_timeout_secs = 60;

  auto report = scaffold::run_scaffold(model, schedule, {}, c_root, ws,
                                       mock.get(), cargo(), cfg, &diags);
  CHECK(report.compilable);
  CHECK(report.stub_count == 4);
  CHECK(std::filesystem::exists(ws / "AGENTS.md"));
  CHECK(fsutil::read_file(ws / "src/lib.rs") == "pub mod src_stack;\n");

  // stages appear once each, in order, all ok
  std::vector<Stage> stages;
  for (const auto& e : report.stage_log) {
    stages.push_back(e.stage);
    CHECK(e.outcome == StageOutcome::ok);
    CHECK(e.attempts == 0);
  }
  CHECK(stages == std::vector<Stage>{Stage::init, Stage::types,
                                     Stage::signatures, Stage::safety,
                                     Stage::tests, Stage::final_verify});

  // manifest covers every C file
  CHECK(report.module_manifest.size() == model.files.size());

  // scaffold consumed only the scaffold-role steps
  CHECK(mock->calls_for(agent::Role::scaffold) == 5);
  CHECK(mock->calls_for(agent::Role::translate) == 0);
}

TEST_CASE("run_scaffold records repair attempts in the stage log") {
  auto c_root = testutil::fixture("c_mini");
  auto model = scanner::scan_repository(c_root, {});
  Diagnostics diags;
  auto schedule = graph::build_schedule(model, {}, &diags);

  TempDir dir;
  auto ws = dir / "translated";
  // the type stage emits an error; the first repair misses, the second lands
  Json script = Json::parse(
      fsutil::read_file(testutil::fixture("mock_mini.json")));
  Json patched = Json::array();
  for (const auto& step : script) {
    if (step["match"]["role"] == "scaffold" &&
        step["match"]["prompt_contains"].get<std::string>().find(
            "from C file src/stack.c") != std::string::npos) {
      Json broken = step;
      broken["actions"][0]["write_file"]["content"] =
          "pub struct Stack { broken\n";
      patched.push_back(broken);
      Json miss;
      miss["match"] = {{"role", "compile_repair"}, {"prompt_contains", ""}};
      miss["actions"] = Json::array();
      miss["exit"] = 0;
      patched.push_back(miss);
      Json fix = miss;
      fix["actions"].push_back(
          {{"write_file",
            {{"path", "src/src_stack.rs"},
             {"content", step["actions"][0]["write_file"]["content"]}}}});
      patched.push_back(fix);
    } else {
      patched.push_back(step);
    }
  }
  auto mock = agent::MockBackend::from_json(patched);
  scaffold::ScaffoldConfig cfg;
  auto report = scaffold::run_scaffold(model, schedule, {}, c_root, ws,
                                       mock.get(), cargo(), cfg, &diags);
  CHECK(report.compilable);
  REQUIRE(report.stage_log.size() >= 2);
  CHECK(report.stage_log[1].stage == Stage::types);
  CHECK(report.stage_log[1].attempts == 2);
  CHECK(report.stage_log[1].outcome == StageOutcome::ok);
}

TEST_CASE("run_scaffold aborts with the report when repair exhausts") {
  auto c_root = testutil::fixture("c_mini");
  auto model = scanner::scan_repository(c_root, {});
  Diagnostics diags;
  auto schedule = graph::build_schedule(model, {}, &diags);

  TempDir dir;
  auto ws = dir / "translated";
  // the type stage writes broken Rust; every repair attempt leaves it broken
  auto mock = agent::MockBackend::from_json(Json::parse(R"([
    {"match": {"role": "scaffold", "prompt_contains": "from C file src/stack.c"},
     "actions": [{"write_file": {"path": "src/src_stack.rs",
                    "content": "pub struct Stack { broken\n"}}],
     "exit": 0},
    {"match": {"role": "compile_repair", "prompt_contains": ""},
     "actions": [], "exit": 0},
    {"match": {"role": "compile_repair", "prompt_contains": ""},
     "actions": [], "exit": 0},
    {"match": {"role": "compile_repair", "prompt_contains": ""},
     "actions": [], "exit": 0}
  ])"));
  scaffold::ScaffoldConfig cfg;
  cfg.max_repair_attempts = 3;
  auto report = scaffold::run_scaffold(model, schedule, {}, c_root, ws,
                                       mock.get(), cargo(), cfg, &diags);
  CHECK(!report.compilable);
  REQUIRE(report.stage_log.size() == 2);
  CHECK(report.stage_log[1].stage == Stage::types);
  CHECK(report.stage_log[1].outcome == StageOutcome::exhausted);
  CHECK(report.stage_log[1].attempts == 3);
}

TEST_CASE("expert interfaces skip the generation stages") {
  TempDir c_dir;
  write(c_dir / "src/nfa.c", "int nfa_get_size(void){return 0;}\n");
  auto model = scanner::scan_repository(c_dir.path(), {});
  Diagnostics diags;
  auto schedule = graph::build_schedule(model, {}, &diags);

  TempDir dir;
  auto ws = dir / "imported";
  scaffold::ScaffoldConfig cfg;
  cfg.expert_interfaces = testutil::fixture("expert_skeleton");

  auto mock = agent::MockBackend::from_json(Json::parse("[]"));
  auto report = scaffold::run_scaffold(model, schedule, {}, c_dir.path(), ws,
                                       mock.get(), cargo(), cfg, &diags);
  CHECK(report.compilable);
  CHECK(std::filesystem::exists(ws / "src/nfa.rs"));
  CHECK(std::filesystem::exists(ws / "AGENTS.md"));
  REQUIRE(report.stage_log.size() == 2);
  CHECK(report.stage_log[0].stage == Stage::tests);
  CHECK(report.stage_log[1].stage == Stage::final_verify);
  // nfa_get_size has no static stub in the expert skeleton
  CHECK(report.stub_count == 0);
}
