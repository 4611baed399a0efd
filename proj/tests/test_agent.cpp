#include <doctest.h>

#include <chrono>

#include "agent.hpp"
#include "error.hpp"
#include "test_util.hpp"

using namespace ctrans;
using agent::MockBackend;
using agent::Request;
using agent::Role;
using agent::Status;
using testutil::TempDir;
using testutil::write;

namespace {

Request make_request(Role role, const std::string& prompt,
                     const std::filesystem::path& ws, double timeout = 30) {
  Request r;
  r.role = role;
  r.prompt = prompt;
  r.workspace_paths = {ws};
  r.timeout_secs = timeout;
  return r;
}

}  // namespace

TEST_CASE("last_json_object picks the final valid object") {
  CHECK(!agent::last_json_object("no json here"));
  auto j = agent::last_json_object(
      "thinking... {\"a\": 1} more prose {\"rust_module\": \"src/nfa.rs\", "
      "\"rust_function\": \"len\"} done");
  REQUIRE(j);
  CHECK((*j)["rust_function"] == "len");
  // braces inside strings do not confuse the extractor
  auto k = agent::last_json_object("{\"s\": \"closing } inside\"} tail");
  REQUIRE(k);
  CHECK((*k)["s"] == "closing } inside");
}

TEST_CASE("mock backend executes scripted file actions") {
  TempDir ws;
  Json script = Json::parse(R"([
    {"match": {"role": "translate", "prompt_contains": "write it"},
     "actions": [{"write_file": {"path": "src/x.rs", "content": "pub fn x() {}\n"}},
                 {"append_file": {"path": "src/x.rs", "content": "// tail\n"}},
                 {"emit_text": {"text": "done"}}],
     "exit": 0}
  ])");
  auto mock = MockBackend::from_json(script);
  auto result = mock->invoke(make_request(Role::translate, "please write it", ws.path()));
  CHECK(result.status == Status::completed);
  CHECK(result.transcript == "done");
  CHECK(fsutil::read_file(ws / "src/x.rs") == "pub fn x() {}\n// tail\n");
  CHECK(mock->calls().size() == 1);
}

TEST_CASE("mock steps are consumed in order and exhaust") {
  TempDir ws;
  Json script = Json::parse(R"([
    {"match": {"role": "translate", "prompt_contains": "same"},
     "actions": [{"emit_text": {"text": "first"}}], "exit": 0},
    {"match": {"role": "translate", "prompt_contains": "same"},
     "actions": [{"emit_text": {"text": "second"}}], "exit": 0}
  ])");
  auto mock = MockBackend::from_json(script);
  auto r1 = mock->invoke(make_request(Role::translate, "same prompt", ws.path()));
  auto r2 = mock->invoke(make_request(Role::translate, "same prompt", ws.path()));
  CHECK(r1.transcript == "first");
  CHECK(r2.transcript == "second");
  try {
    mock->invoke(make_request(Role::translate, "same prompt", ws.path()));
    FAIL("expected ScriptExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::script_exhausted);
  }
}

TEST_CASE("malformed mock scripts are load errors") {
  TempDir dir;
  write(dir / "bad.json", "{ not json ]");
  CHECK_THROWS_AS(MockBackend::load_script(dir / "bad.json"), Error);
  write(dir / "shape.json", "{\"steps\": []}");  // object, not an array
  CHECK_THROWS_AS(MockBackend::load_script(dir / "shape.json"), Error);
  write(dir / "role.json",
        R"([{"match": {"role": "poet", "prompt_contains": ""}}])");
  CHECK_THROWS_AS(MockBackend::load_script(dir / "role.json"), Error);
}

TEST_CASE("mock role mismatch does not consume steps") {
  TempDir ws;
  Json script = Json::parse(R"([
    {"match": {"role": "map", "prompt_contains": ""},
     "actions": [{"emit_json": {"value": {"rust_module": null, "rust_function": null}}}],
     "exit": 0}
  ])");
  auto mock = MockBackend::from_json(script);
  CHECK_THROWS_AS(
      mock->invoke(make_request(Role::translate, "anything", ws.path())),
      Error);
  auto r = mock->invoke(make_request(Role::map, "map this", ws.path()));
  CHECK(r.status == Status::completed);
  REQUIRE(r.structured_payload);
  CHECK((*r.structured_payload)["rust_module"].is_null());
}

TEST_CASE("mock sleep beyond the timeout reports timed_out") {
  TempDir ws;
  Json script = Json::parse(R"([
    {"match": {"role": "translate", "prompt_contains": ""},
     "actions": [{"sleep": {"seconds": 100}},
                 {"write_file": {"path": "never.rs", "content": "x"}}],
     "exit": 0}
  ])");
  auto mock = MockBackend::from_json(script);
  auto start = std::chrono::steady_clock::now();
  auto result = mock->invoke(make_request(Role::translate, "slow", ws.path(), 5));
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  CHECK(result.status == Status::timed_out);
  CHECK(result.wall_secs >= 5);          // reported wall time honors the contract
  CHECK(elapsed < 1.0);                  // virtual clock, no real waiting
  CHECK(!std::filesystem::exists(ws / "never.rs"));  // later actions skipped
}

TEST_CASE("mock rejects actions escaping the declared workspaces") {
  TempDir ws;
  Json script = Json::parse(R"([
    {"match": {"role": "translate", "prompt_contains": ""},
     "actions": [{"write_file": {"path": "../outside.rs", "content": "x"}}],
     "exit": 0}
  ])");
  auto mock = MockBackend::from_json(script);
  CHECK_THROWS_AS(mock->invoke(make_request(Role::translate, "x", ws.path())),
                  Error);
}

TEST_CASE("mock nonzero exit maps to backend_error") {
  TempDir ws;
  Json script = Json::parse(R"([
    {"match": {"role": "translate", "prompt_contains": ""},
     "actions": [], "exit": 3}
  ])");
  auto mock = MockBackend::from_json(script);
  auto r = mock->invoke(make_request(Role::translate, "x", ws.path()));
  CHECK(r.status == Status::backend_error);
}

TEST_CASE("map-role payload is the last JSON object in the transcript") {
  TempDir ws;
  Json script = Json::parse(R"([
    {"match": {"role": "map", "prompt_contains": ""},
     "actions": [{"emit_text": {"text": "narrating {\"bogus\": 1} now "}},
                 {"emit_json": {"value": {"rust_module": "src/nfa.rs",
                                            "rust_function": "len"}}}],
     "exit": 0}
  ])");
  auto mock = MockBackend::from_json(script);
  auto r = mock->invoke(make_request(Role::map, "find it", ws.path()));
  REQUIRE(r.structured_payload);
  CHECK((*r.structured_payload)["rust_module"] == "src/nfa.rs");
  CHECK((*r.structured_payload)["rust_function"] == "len");
}

TEST_CASE("subprocess backend runs a real command with placeholders") {
  TempDir ws;
  agent::SubprocessBackend backend(
      {"/bin/sh", "-c", "cat {PROMPT_FILE} > {WORKSPACE}/echoed.txt"});
  auto r = backend.invoke(make_request(Role::translate, "hello prompt", ws.path()));
  CHECK(r.status == Status::completed);
  CHECK(fsutil::read_file(ws / "echoed.txt") == "hello prompt");
}

TEST_CASE("subprocess backend kills a sleeping agent at the timeout") {
  TempDir ws;
  agent::SubprocessBackend backend({"/bin/sh", "-c", "sleep 60"});
  auto start = std::chrono::steady_clock::now();
  auto r = backend.invoke(make_request(Role::translate, "slow", ws.path(), 1));
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  CHECK(r.status == Status::timed_out);
  CHECK(r.wall_secs >= 1.0);
  CHECK(elapsed < 6.0);  // timeout plus the fixed grace bound
}

TEST_CASE("subprocess backend reports spawn failure as backend_error") {
  TempDir ws;
  agent::SubprocessBackend backend({"/no/such/binary-xyz"});
  auto r = backend.invoke(make_request(Role::translate, "x", ws.path()));
  CHECK(r.status == Status::backend_error);
  CHECK(r.transcript.find("No such file") != std::string::npos);
}

TEST_CASE("subprocess nonzero exit is backend_error, not task failure") {
  TempDir ws;
  agent::SubprocessBackend backend({"/bin/sh", "-c", "exit 9"});
  auto r = backend.invoke(make_request(Role::translate, "x", ws.path()));
  CHECK(r.status == Status::backend_error);
}
