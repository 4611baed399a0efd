#include "prompts.hpp"

#include "error.hpp"
#include "fsutil.hpp"

namespace ctrans::prompts {

namespace {

const char* kScaffoldInit = R"(You are scaffolding a Rust port of a C project.
Scaffolding stage: {STAGE}
C project root: {C_ROOT}
Rust project root: {WORKSPACE}

{TASK}

Constraints:
- Work only inside the Rust project root.
- Do not run tests and do not add external dependencies.
- Keep every module listed in src/lib.rs compiling at all times.
- Prefer safe Rust; avoid raw pointers and unsafe blocks.
)";

const char* kMapFunction = R"(Find the Rust counterpart of one C function.
C function: {C_FUNCTION}
C signature: {C_SIGNATURE}
C module: {C_MODULE}
C project root: {C_ROOT}
Rust project root: {WORKSPACE}

Inspect both projects. Reason about parameter counts, parameter types, and
return types to identify structurally transformed counterparts (for example a
free function lifted into an associated method).

Reply with one JSON object on its own line:
{"rust_module": "<path relative to the Rust project>", "rust_function": "<name>"}
Use null for both fields if the function has no Rust counterpart (for example
a deallocator subsumed by ownership). Do not modify any files.
)";

const char* kTranslateFunction = R"(Translate one C translation unit into Rust.
C project root: {C_ROOT}
Rust project root: {WORKSPACE}
Unit {UNIT_ID} in group {GROUP_ID}.
C functions: {C_FUNCTIONS}
{TARGETS}

C source of the unit:
{C_SOURCE}

Constraints:
- Implement only the functions listed above; leave every other stub untouched.
- Replace each placeholder body with a complete implementation. Leaving
  unimplemented!(), todo!(), or TODO/FIXME comments in the body counts as a
  failure.
- Do not run tests; they will be run for you after translation completes.
- Do not add external dependencies or delete existing tests.
- Prefer safe Rust; avoid raw pointers and unsafe blocks.
)";

const char* kCompileRepair = R"(The Rust project no longer compiles.
Rust project root: {WORKSPACE}

Compiler diagnostics:
{DIAGNOSTICS}

Fix the compilation errors with the smallest change that preserves intended
behavior. Do not delete function bodies, do not reintroduce stubs, and do not
run tests.
)";

const char* kRefactorSafety = R"(Refactor the Rust project toward safe Rust.
Rust project root: {WORKSPACE}

Safety findings:
{FINDINGS}

Remove unsafe blocks and raw pointer signatures by restructuring the affected
code with safe ownership patterns (slices, references, Vec, Box, Option).
Behavior must not change. Do not run tests.
)";

const char* kVerifyTests = R"(The Rust test suite has failures.
Rust project root: {WORKSPACE}

Failing tests:
{FAILED_TESTS}

Test harness output:
{TEST_OUTPUT}

Repair the implementation so the failing tests pass. Fix the code under test,
not the tests, unless a test itself mistranslates the original C test.
)";

const char* kAgentsMd = R"(# Working agreements

This Rust project is a port of a C codebase, produced one translation unit at
a time by an orchestrated pipeline.

- Follow the task prompt exactly; do not expand scope.
- Never run the test suite unless the prompt asks for it.
- Never leave unimplemented!(), todo!(), or TODO/FIXME markers in function
  bodies; a unit is either fully implemented or left as the original stub.
- Do not add external dependencies.
- Prefer safe Rust: no raw pointers, no unsafe blocks. If the C code uses
  pointer arithmetic, restructure with slices and indices.
- Keep module layout and public function names stable; other units depend on
  them.
)";

}  // namespace

std::string render(const std::string& tmpl,
                   const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t close = tmpl.find('}', i + 1);
      if (close != std::string::npos) {
        std::string key = tmpl.substr(i + 1, close - i - 1);
        auto it = vars.find(key);
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

const char* builtin_template(const std::string& name) {
  if (name == "scaffold_init.txt") return kScaffoldInit;
  if (name == "map_function.txt") return kMapFunction;
  if (name == "translate_function.txt") return kTranslateFunction;
  if (name == "compile_repair.txt") return kCompileRepair;
  if (name == "refactor_safety.txt") return kRefactorSafety;
  if (name == "verify_tests.txt") return kVerifyTests;
  if (name == "agents_md.txt") return kAgentsMd;
  return nullptr;
}

std::string load_template(const std::optional<std::filesystem::path>& prompt_dir,
                          const std::string& name) {
  if (prompt_dir) {
    auto path = *prompt_dir / name;
    if (std::filesystem::exists(path)) return fsutil::read_file(path);
  }
  const char* builtin = builtin_template(name);
  if (!builtin) fail(Errc::invalid_argument, "unknown prompt template: " + name);
  return builtin;
}

}  // namespace ctrans::prompts
