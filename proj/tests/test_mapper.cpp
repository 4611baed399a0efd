#include <doctest.h>

#include "agent.hpp"
#include "dep_graph.hpp"
#include "mapper.hpp"
#include "scanner.hpp"
#include "test_util.hpp"

using namespace ctrans;
using mapper::MapTier;
using testutil::TempDir;
using testutil::write;

TEST_CASE("normalize_name") {
  CHECK(mapper::normalize_name("bitset_get") == "bitsetget");
  CHECK(mapper::normalize_name("NFA-Get_Size") == "nfagetsize");
  CHECK(mapper::normalize_name("len") == "len");
}

TEST_CASE("scan_rust_functions finds free and associated fns") {
  auto decls = mapper::scan_rust_functions(testutil::fixture("expert_skeleton"));
  std::set<std::string> names;
  for (const auto& d : decls) names.insert(d.name);
  CHECK(names == std::set<std::string>{"bitset_test", "bitset_get_fast", "len",
                                       "new"});
}

TEST_CASE("static_match hierarchy and exclusions") {
  std::vector<mapper::RustDecl> decls = {
      {"src/bits.rs", "bitset_get"},
      {"src/bits.rs", "bitset_get_fast"},
      {"src/nfa.rs", "len"},
      {"src/other.rs", "nfaGetSize"},
  };
  SUBCASE("exact match wins") {
    auto hit = mapper::static_match("bitset_get", decls);
    REQUIRE(hit);
    CHECK(hit->rust_module == "src/bits.rs");
    CHECK(hit->tier == MapTier::static_exact);
  }
  SUBCASE("normalized match when no exact exists") {
    auto hit = mapper::static_match("nfa_get_size", decls);
    REQUIRE(hit);
    CHECK(hit->rust_function == "nfaGetSize");
    CHECK(hit->tier == MapTier::static_normalized);
  }
  SUBCASE("prefix and substring near-misses never match") {
    // only bitset_get_fast exists; the shorter query must not hit it
    std::vector<mapper::RustDecl> traps = {{"src/bits.rs", "bitset_get_fast"}};
    std::string reason;
    CHECK(!mapper::static_match("bitset_get", traps, &reason));
    CHECK(reason == "no_match");
    CHECK(!mapper::static_match("get", traps));
    CHECK(!mapper::static_match("fast", traps));
  }
  SUBCASE("multiple hits at the winning level are ambiguous") {
    std::vector<mapper::RustDecl> dup = {{"src/a.rs", "len"},
                                         {"src/b.rs", "len"}};
    std::string reason;
    CHECK(!mapper::static_match("len", dup, &reason));
    CHECK(reason == "ambiguous");
  }
}

TEST_CASE("validate_mapping is file-scoped") {
  TempDir c_root;
  write(c_root / "src/nfa.c", "int nfa_get_size(void){return 0;}\n");
  auto ws = testutil::fixture("expert_skeleton");

  mapper::FunctionMapping m;
  m.c_module = "src/nfa.c";
  m.c_function = "nfa_get_size";

  SUBCASE("existing file and declared function") {
    m.rust_module = "src/nfa.rs";
    m.rust_function = "len";
    CHECK(mapper::validate_mapping(m, c_root.path(), ws));
  }
  SUBCASE("hallucinated module path") {
    m.rust_module = "src/imaginary.rs";
    m.rust_function = "len";
    CHECK(!mapper::validate_mapping(m, c_root.path(), ws));
  }
  SUBCASE("function declared in a different file") {
    m.rust_module = "src/bits.rs";
    m.rust_function = "len";
    CHECK(!mapper::validate_mapping(m, c_root.path(), ws));
  }
  SUBCASE("missing c module") {
    m.c_module = "src/gone.c";
    m.rust_module = "src/nfa.rs";
    m.rust_function = "len";
    CHECK(!mapper::validate_mapping(m, c_root.path(), ws));
  }
  SUBCASE("null mapping validates once the c module exists") {
    m.rust_module.reset();
    m.rust_function.reset();
    CHECK(mapper::validate_mapping(m, c_root.path(), ws));
  }
}

namespace {

scanner::FunctionNode c_function(const std::string& path,
                                 const std::string& name) {
  scanner::FunctionNode fn;
  fn.name = name;
  fn.qualified_id = {path, name};
  fn.signature_text = "int " + name + "(void)";
  return fn;
}

std::unique_ptr<agent::MockBackend> mock_of(const std::string& json_text) {
  return agent::MockBackend::from_json(Json::parse(json_text));
}

}  // namespace

TEST_CASE("agent_match validates, retries, and accepts nulls") {
  TempDir c_root;
  write(c_root / "src/nfa.c", "int nfa_get_size(void){return 0;}\n");
  auto ws = testutil::fixture("expert_skeleton");
  mapper::MapperConfig cfg;
  cfg.max_attempts = 2;

  SUBCASE("valid answer commits with tier agent") {
    auto mock = mock_of(R"([
      {"match": {"role": "map", "prompt_contains": "nfa_get_size"},
       "actions": [{"emit_json": {"value": {"rust_module": "src/nfa.rs",
                                              "rust_function": "Nfa::len"}}}],
       "exit": 0}
    ])");
    std::string reason;
    auto m = mapper::agent_match(c_function("src/nfa.c", "nfa_get_size"),
                                 c_root.path(), ws, mock.get(), cfg, &reason);
    REQUIRE(m);
    CHECK(m->tier == MapTier::agent);
    CHECK(m->validated);
    CHECK(*m->rust_function == "len");  // qualified answers reduce to the name
  }
  SUBCASE("null answer is a validated null mapping") {
    auto mock = mock_of(R"([
      {"match": {"role": "map", "prompt_contains": ""},
       "actions": [{"emit_json": {"value": {"rust_module": null,
                                              "rust_function": null}}}],
       "exit": 0}
    ])");
    std::string reason;
    auto m = mapper::agent_match(c_function("src/nfa.c", "nfa_get_size"),
                                 c_root.path(), ws, mock.get(), cfg, &reason);
    REQUIRE(m);
    CHECK(m->is_null());
    CHECK(m->validated);
    CHECK(m->tier == MapTier::none);
  }
  SUBCASE("hallucinations exhaust the retry budget") {
    auto mock = mock_of(R"([
      {"match": {"role": "map", "prompt_contains": ""},
       "actions": [{"emit_json": {"value": {"rust_module": "src/fake.rs",
                                              "rust_function": "nope"}}}],
       "exit": 0},
      {"match": {"role": "map", "prompt_contains": ""},
       "actions": [{"emit_json": {"value": {"rust_module": "src/fake2.rs",
                                              "rust_function": "nope"}}}],
       "exit": 0}
    ])");
    std::string reason;
    auto m = mapper::agent_match(c_function("src/nfa.c", "nfa_get_size"),
                                 c_root.path(), ws, mock.get(), cfg, &reason);
    CHECK(!m);
    CHECK(reason == "exhausted");
    CHECK(mock->calls().size() == 2);
  }
  SUBCASE("backend errors surface immediately") {
    auto mock = mock_of(R"([
      {"match": {"role": "map", "prompt_contains": ""}, "actions": [], "exit": 7}
    ])");
    std::string reason;
    auto m = mapper::agent_match(c_function("src/nfa.c", "nfa_get_size"),
                                 c_root.path(), ws, mock.get(), cfg, &reason);
    CHECK(!m);
    CHECK(reason == "backend_error");
    CHECK(mock->calls().size() == 1);
  }
}

TEST_CASE("map_all: generated skeleton resolves fully static, zero agent calls") {
  auto c_root = testutil::fixture("c_project");
  auto model = scanner::scan_repository(c_root, {});
  Diagnostics diags;
  auto schedule = graph::build_schedule(model, {}, &diags);

  TempDir ws;
  // a faithful generated-style skeleton: every scheduled fn name preserved
  std::string stubs;
  for (const auto& unit : schedule.units)
    for (const auto& member : unit.members)
      stubs += "pub fn " + member.name + "() { unimplemented!() }\n";
  write(ws / "src/all.rs", stubs);

  auto mock = mock_of("[]");  // any invocation would throw ScriptExhausted
  mapper::MapperConfig cfg;
  auto table = mapper::map_all(schedule, model, c_root, ws.path(), mock.get(),
                               cfg, &diags);
  CHECK(table.unresolved.empty());
  CHECK(table.entries.size() == 13);
  for (const auto& e : table.entries) {
    CHECK(e.tier == MapTier::static_exact);
    CHECK(e.validated);
  }
  CHECK(mock->calls().empty());
}

TEST_CASE("map_all: renamed and lifted functions go through the agent") {
  TempDir c_root;
  write(c_root / "src/nfa.c",
        "int nfa_get_size(void){return 0;}\nint bitset_get(int i){return i;}\n");
  auto model = scanner::scan_repository(c_root.path(), {});
  Diagnostics diags;
  auto schedule = graph::build_schedule(model, {}, &diags);

  TempDir ws_dir;
  auto ws = ws_dir / "ws";
  std::filesystem::copy(testutil::fixture("expert_skeleton"), ws,
                        std::filesystem::copy_options::recursive);

  auto mock = mock_of(R"([
    {"match": {"role": "map", "prompt_contains": "nfa_get_size"},
     "actions": [{"emit_json": {"value": {"rust_module": "src/nfa.rs",
                                            "rust_function": "len"}}}],
     "exit": 0},
    {"match": {"role": "map", "prompt_contains": "bitset_get"},
     "actions": [{"emit_json": {"value": {"rust_module": "src/bits.rs",
                                            "rust_function": "bitset_test"}}}],
     "exit": 0}
  ])");
  mapper::MapperConfig cfg;
  auto table =
      mapper::map_all(schedule, model, c_root.path(), ws, mock.get(), cfg, &diags);
  CHECK(table.unresolved.empty());
  REQUIRE(table.entries.size() == 2);
  for (const auto& e : table.entries) {
    CHECK(e.tier == MapTier::agent);
    CHECK(e.validated);
  }
  CHECK(mock->calls().size() == 2);  // exactly the two static misses
}

TEST_CASE("map_all rejects duplicate targets across units") {
  TempDir c_root;
  write(c_root / "a.c", "int alpha(void){return 0;}\n");
  write(c_root / "b.c", "int beta(void){return 0;}\n");
  auto model = scanner::scan_repository(c_root.path(), {});
  Diagnostics diags;
  auto schedule = graph::build_schedule(model, {}, &diags);

  TempDir ws;
  write(ws / "src/only.rs", "pub fn alpha() {}\n");
  auto mock = mock_of(R"([
    {"match": {"role": "map", "prompt_contains": "beta"},
     "actions": [{"emit_json": {"value": {"rust_module": "src/only.rs",
                                            "rust_function": "alpha"}}}],
     "exit": 0}
  ])");
  mapper::MapperConfig cfg;
  cfg.max_attempts = 1;
  auto table = mapper::map_all(schedule, model, c_root.path(), ws.path(),
                               mock.get(), cfg, &diags);
  REQUIRE(table.entries.size() == 1);
  CHECK(table.entries[0].c_function == "alpha");
  REQUIRE(table.unresolved.size() == 1);
  CHECK(table.unresolved[0].c_function == "beta");
  CHECK(table.unresolved[0].reason == "duplicate_target");
}

TEST_CASE("mapping table serialization round-trips") {
  mapper::MappingTable table;
  mapper::FunctionMapping m;
  m.c_module = "src/a.c";
  m.c_function = "f";
  m.rust_module = "src/a.rs";
  m.rust_function = "f";
  m.tier = MapTier::static_exact;
  m.validated = true;
  table.entries.push_back(m);
  mapper::FunctionMapping null_m;
  null_m.c_module = "src/a.c";
  null_m.c_function = "free_f";
  null_m.tier = MapTier::none;
  null_m.validated = true;
  table.entries.push_back(null_m);
  table.unresolved.push_back({"src/a.c", "ghost", "exhausted"});

  auto round = mapper::MappingTable::from_json(table.to_json());
  CHECK(round.to_json().dump() == table.to_json().dump());
  CHECK(round.entries[1].is_null());
}
