#include "analyzers.hpp"

#include <algorithm>
#include <set>

#include "fsutil.hpp"
#include "impl_check.hpp"
#include "text.hpp"

namespace ctrans::analyzers {

std::string format_pct(long long num, long long den) {
  if (den <= 0 || num < 0) return "0.0";
  // tenths of a percent, rounded half away from zero
  long long tenths = (2000 * num + den) / (2 * den);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

Json SafetyReport::to_json() const {
  Json j;
  j["ptr_decls"] = ptr_decls;
  j["ptr_derefs"] = ptr_derefs;
  j["unsafe_loc"] = unsafe_loc;
  j["total_loc"] = total_loc;
  j["pct_unsafe"] = pct_unsafe();
  return j;
}

std::string CoverageReport::functional_pct() const {
  return format_pct(functions_implemented,
                    functions_implemented + functions_stub + functions_missing);
}

Json CoverageReport::to_json() const {
  Json j;
  j["functional_pct"] = functional_pct();
  j["functions_total"] = functions_total;
  j["functions_implemented"] = functions_implemented;
  j["functions_stub"] = functions_stub;
  j["functions_missing"] = functions_missing;
  j["functions_null_mapped"] = functions_null_mapped;
  j["test_pct"] = test_pct();
  j["c_tests_total"] = c_tests_total;
  j["rust_tests_present"] = rust_tests_present;
  return j;
}

Json AuditResult::to_json() const {
  Json j;
  j["safety"] = safety.to_json();
  j["coverage"] = coverage.to_json();
  return j;
}

namespace {

bool is_punct(std::string_view t) {
  return t.size() == 1 && !text::is_ident_char(t[0]);
}

// Tokens that can directly precede a unary '*' (deref), as opposed to a
// binary multiply.
bool deref_can_follow(std::string_view prev) {
  if (prev.empty()) return true;
  if (prev == ")" || prev == "]" || prev == "}") return false;
  if (is_punct(prev)) return true;
  if (text::is_identifier(prev)) {
    // keywords that end an expression boundary
    return prev == "return" || prev == "match" || prev == "if" ||
           prev == "while" || prev == "in" || prev == "else";
  }
  return false;  // numeric literal
}

}  // namespace

FileSafety analyze_rust_source(const std::string& src) {
  FileSafety out;
  std::string code_lines = text::strip_rust(src, /*keep_strings=*/true);
  std::string stripped = text::strip_rust(src, /*keep_strings=*/false);
  auto starts = text::line_starts(src);
  int line_count = text::count_lines(src);

  // a line counts toward LoC when something outside comments remains on it
  std::vector<bool> is_code(line_count + 1, false);
  {
    int line = 1;
    bool any = false;
    for (std::size_t i = 0; i <= code_lines.size(); ++i) {
      if (i == code_lines.size() || code_lines[i] == '\n') {
        if (line <= line_count) is_code[line] = any;
        any = false;
        ++line;
      } else if (!std::isspace(static_cast<unsigned char>(code_lines[i]))) {
        any = true;
      }
    }
  }
  for (int l = 1; l <= line_count; ++l)
    if (is_code[l]) ++out.loc;

  auto tokens = text::tokenize(stripped);

  // unsafe regions: `unsafe { .. }` blocks and bodies of `unsafe fn`
  std::vector<bool> unsafe_line(line_count + 1, false);
  std::vector<std::pair<int, int>> regions;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].text != "unsafe") continue;
    if (i + 1 >= tokens.size()) break;
    std::size_t open_tok = std::string::npos;
    if (tokens[i + 1].text == "{") {
      open_tok = i + 1;
    } else if (tokens[i + 1].text == "fn") {
      for (std::size_t j = i + 2; j < tokens.size(); ++j) {
        if (tokens[j].text == "{") {
          open_tok = j;
          break;
        }
        if (tokens[j].text == ";") break;  // declaration without a body
      }
    }
    if (open_tok == std::string::npos) continue;
    int depth = 0;
    std::size_t close_tok = std::string::npos;
    for (std::size_t j = open_tok; j < tokens.size(); ++j) {
      if (tokens[j].text == "{") ++depth;
      if (tokens[j].text == "}" && --depth == 0) {
        close_tok = j;
        break;
      }
    }
    if (close_tok == std::string::npos) close_tok = tokens.size() - 1;
    int first = text::line_of(starts, tokens[i].offset);
    int last = text::line_of(starts, tokens[close_tok].offset);
    regions.push_back({first, last});

    // count non-blank lines of the region; a closing line holding nothing
    // but the brace is a delimiter, not enclosed code
    for (int l = first; l <= last && l <= line_count; ++l) {
      if (!is_code[l]) continue;
      if (l == last && l != first) {
        std::string closer_line = text::slice_lines(stripped, l, l);
        std::string collapsed = text::collapse_ws(closer_line);
        if (collapsed == "}") continue;
      }
      unsafe_line[l] = true;
    }
  }
  for (int l = 1; l <= line_count; ++l)
    if (unsafe_line[l]) ++out.unsafe_loc;

  auto in_unsafe = [&](std::size_t offset) {
    int line = text::line_of(starts, offset);
    for (const auto& [first, last] : regions)
      if (line >= first && line <= last) return true;
    return false;
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].text != "*") continue;
    std::string_view next = i + 1 < tokens.size() ? tokens[i + 1].text : "";
    if (next == "const" || next == "mut") {
      ++out.ptr_decls;
      continue;
    }
    std::string_view prev = i > 0 ? tokens[i - 1].text : "";
    if (!deref_can_follow(prev)) continue;
    if (next == "&") continue;  // deref of a fresh reference is safe plumbing
    if (in_unsafe(tokens[i].offset)) ++out.ptr_derefs;
  }

  return out;
}

std::vector<std::string> workspace_sources(const fs::path& workspace) {
  std::vector<std::string> out;
  for (const auto& rel : fsutil::list_files(workspace)) {
    if (rel.size() < 3 || rel.compare(rel.size() - 3, 3, ".rs") != 0) continue;
    if (rel.rfind("target/", 0) == 0) continue;
    out.push_back(rel);
  }
  return out;
}

namespace {

FileSafety workspace_totals(const fs::path& workspace) {
  FileSafety total;
  for (const auto& rel : workspace_sources(workspace)) {
    FileSafety f = analyze_rust_source(fsutil::read_file(workspace / rel));
    total.ptr_decls += f.ptr_decls;
    total.ptr_derefs += f.ptr_derefs;
    total.unsafe_loc += f.unsafe_loc;
    total.loc += f.loc;
  }
  return total;
}

}  // namespace

long count_unsafe_loc(const fs::path& ws) { return workspace_totals(ws).unsafe_loc; }
long count_ptr_decls(const fs::path& ws) { return workspace_totals(ws).ptr_decls; }
long count_ptr_derefs(const fs::path& ws) { return workspace_totals(ws).ptr_derefs; }
long count_total_loc(const fs::path& ws) { return workspace_totals(ws).loc; }

long count_signature_ptr_decls(const fs::path& workspace) {
  long count = 0;
  for (const auto& rel : workspace_sources(workspace)) {
    std::string stripped =
        text::strip_rust(fsutil::read_file(workspace / rel));
    auto tokens = text::tokenize(stripped);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].text != "fn") continue;
      // signature runs to the opening brace or a terminating semicolon
      for (std::size_t j = i + 1; j < tokens.size(); ++j) {
        if (tokens[j].text == "{" || tokens[j].text == ";") {
          i = j;
          break;
        }
        if (tokens[j].text == "*" && j + 1 < tokens.size() &&
            (tokens[j + 1].text == "const" || tokens[j + 1].text == "mut"))
          ++count;
      }
    }
  }
  return count;
}

SafetyReport safety_report(const fs::path& workspace) {
  FileSafety totals = workspace_totals(workspace);
  SafetyReport report;
  report.ptr_decls = totals.ptr_decls;
  report.ptr_derefs = totals.ptr_derefs;
  report.unsafe_loc = totals.unsafe_loc;
  report.total_loc = totals.loc;
  return report;
}

std::vector<std::string> rust_test_functions(const fs::path& workspace) {
  std::vector<std::string> names;
  for (const auto& rel : workspace_sources(workspace)) {
    std::string stripped =
        text::strip_rust(fsutil::read_file(workspace / rel));
    auto tokens = text::tokenize(stripped);
    for (std::size_t i = 0; i + 3 < tokens.size(); ++i) {
      // #[test], possibly followed by more attributes before `fn name`
      if (tokens[i].text != "#" || tokens[i + 1].text != "[" ||
          tokens[i + 2].text != "test" || tokens[i + 3].text != "]")
        continue;
      for (std::size_t j = i + 4; j + 1 < tokens.size(); ++j) {
        if (tokens[j].text == "fn") {
          if (text::is_identifier(tokens[j + 1].text))
            names.push_back(std::string(tokens[j + 1].text));
          break;
        }
        // attribute lists carry no item boundaries
        if (tokens[j].text == "{" || tokens[j].text == "}" ||
            tokens[j].text == ";")
          break;
      }
    }
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

CoverageReport coverage_report(const scanner::SourceModel& model,
                               const mapper::MappingTable* table,
                               const fs::path& workspace,
                               const toolchain::Toolchain* toolchain_for_enum) {
  CoverageReport report;
  auto decls = mapper::scan_rust_functions(workspace);

  for (const auto& fn : model.functions) {
    if (model.is_test_function(fn.qualified_id)) continue;
    ++report.functions_total;

    std::optional<std::string> rust_module, rust_function;
    bool null_mapped = false;
    if (table) {
      const mapper::FunctionMapping* m =
          table->find(fn.qualified_id.path, fn.name);
      if (m && m->is_null()) {
        null_mapped = true;
      } else if (m) {
        rust_module = m->rust_module;
        rust_function = m->rust_function;
      }
    } else {
      // measurement-only fallback when no table was produced (ablation modes)
      if (auto hit = mapper::static_match(fn.name, decls)) {
        rust_module = hit->rust_module;
        rust_function = hit->rust_function;
      }
    }

    if (null_mapped) {
      ++report.functions_null_mapped;
      continue;
    }
    if (!rust_module) {
      ++report.functions_missing;
      continue;
    }
    auto check =
        orchestrate::implementation_check(workspace, *rust_module, *rust_function);
    bool missing = std::any_of(check.findings.begin(), check.findings.end(),
                               [](const orchestrate::Finding& f) {
                                 return f.kind ==
                                        orchestrate::FindingKind::missing_function;
                               });
    if (missing) {
      ++report.functions_missing;
    } else if (check.implemented) {
      ++report.functions_implemented;
    } else {
      ++report.functions_stub;
    }
  }

  report.c_tests_total = static_cast<int>(model.test_functions.size());
  auto rust_tests = rust_test_functions(workspace);
  std::set<std::string> exact(rust_tests.begin(), rust_tests.end());
  std::map<std::string, std::string> normalized;
  for (const auto& t : rust_tests) normalized[mapper::normalize_name(t)] = t;

  std::set<std::string> enumerated;
  bool have_enumeration = false;
  if (toolchain_for_enum) {
    for (const auto& full : toolchain_for_enum->list_tests(workspace)) {
      std::size_t sep = full.rfind("::");
      enumerated.insert(sep == std::string::npos ? full : full.substr(sep + 2));
    }
    have_enumeration = true;
  }

  for (const auto& id : model.test_functions) {
    std::string matched;
    if (exact.count(id.name)) {
      matched = id.name;
    } else {
      auto it = normalized.find(mapper::normalize_name(id.name));
      if (it != normalized.end()) matched = it->second;
    }
    if (matched.empty()) continue;
    if (have_enumeration && !enumerated.count(matched)) continue;
    ++report.rust_tests_present;
  }
  return report;
}

AuditResult audit(const fs::path& workspace, const scanner::SourceModel& model,
                  const mapper::MappingTable* table,
                  const toolchain::Toolchain* toolchain_for_enum) {
  AuditResult result;
  result.safety = safety_report(workspace);
  result.coverage = coverage_report(model, table, workspace, toolchain_for_enum);
  return result;
}

}  // namespace ctrans::analyzers
