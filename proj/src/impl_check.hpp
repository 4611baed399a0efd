#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ctrans::orchestrate {

enum class FindingKind {
  unimplemented_macro,
  todo_comment,
  missing_function,
  empty_body,
};

const char* finding_kind_name(FindingKind kind);

struct Finding {
  FindingKind kind;
  std::string location;  // "module:line"
};

struct CheckResult {
  bool implemented = false;
  std::vector<Finding> findings;
};

// Static gate confirming a translated body is a genuine implementation:
// no placeholder macro as a code token (unimplemented!/todo!), no TODO or
// FIXME in body comments (a commented-out placeholder counts too), the
// declaration present, and the body more than a bare unit expression.
// String-literal occurrences are ignored.
CheckResult implementation_check(const std::filesystem::path& workspace,
                                 const std::string& rust_module,
                                 const std::string& rust_function);

}  // namespace ctrans::orchestrate
