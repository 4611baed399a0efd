#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "diag.hpp"
#include "jsonx.hpp"
#include "mapper.hpp"
#include "scanner.hpp"
#include "toolchain.hpp"

namespace ctrans::analyzers {

namespace fs = std::filesystem;

// Rounds 100*num/den to one decimal, half away from zero, as a string.
std::string format_pct(long long num, long long den);

struct SafetyReport {
  long ptr_decls = 0;   // raw pointer type mentions in declaration positions
  long ptr_derefs = 0;  // unary derefs inside unsafe regions
  long unsafe_loc = 0;  // lines in unsafe blocks / unsafe fn bodies
  long total_loc = 0;   // non-blank, non-comment lines, manifests excluded

  std::string pct_unsafe() const { return format_pct(unsafe_loc, total_loc); }
  Json to_json() const;
};

struct CoverageReport {
  int functions_total = 0;  // implemented + stubs + missing + null_mapped
  int functions_implemented = 0;
  int functions_stub = 0;
  int functions_missing = 0;
  int functions_null_mapped = 0;  // excluded from the denominator
  int c_tests_total = 0;
  int rust_tests_present = 0;

  std::string functional_pct() const;
  std::string test_pct() const { return format_pct(rust_tests_present, c_tests_total); }
  Json to_json() const;
};

struct AuditResult {
  SafetyReport safety;
  CoverageReport coverage;
  Json to_json() const;
};

// Per-file metric counts used by both the totals and the unit tests.
struct FileSafety {
  long ptr_decls = 0;
  long ptr_derefs = 0;
  long unsafe_loc = 0;
  long loc = 0;
};

FileSafety analyze_rust_source(const std::string& src);

// Workspace source files considered by the analyzers: *.rs under the
// workspace, dot-directories and the build cache excluded.
std::vector<std::string> workspace_sources(const fs::path& workspace);

long count_unsafe_loc(const fs::path& workspace);
long count_ptr_decls(const fs::path& workspace);
long count_ptr_derefs(const fs::path& workspace);
long count_total_loc(const fs::path& workspace);

// Raw pointer types appearing in fn signatures only (the scaffold safety gate).
long count_signature_ptr_decls(const fs::path& workspace);

SafetyReport safety_report(const fs::path& workspace);

// Names of #[test] functions declared in the workspace.
std::vector<std::string> rust_test_functions(const fs::path& workspace);

CoverageReport coverage_report(const scanner::SourceModel& model,
                               const mapper::MappingTable* table,
                               const fs::path& workspace,
                               const toolchain::Toolchain* toolchain_for_enum);

AuditResult audit(const fs::path& workspace, const scanner::SourceModel& model,
                  const mapper::MappingTable* table,
                  const toolchain::Toolchain* toolchain_for_enum = nullptr);

}  // namespace ctrans::analyzers
