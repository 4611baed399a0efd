#include "impl_check.hpp"

#include <algorithm>
#include <cctype>

#include "fsutil.hpp"
#include "text.hpp"

namespace ctrans::orchestrate {

namespace {

bool contains_ci(std::string_view haystack, std::string_view needle) {
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(),
                        needle.end(), [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) ==
                                 std::tolower(static_cast<unsigned char>(b));
                        });
  return it != haystack.end();
}

// Comment spans (offsets) of a Rust source slice.
std::vector<std::pair<std::size_t, std::size_t>> comment_spans(
    std::string_view src) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::string code_only = text::strip_rust(src, /*keep_strings=*/true);
  // a byte that was non-space in src but space in code_only belonged to a
  // comment (string contents are preserved by keep_strings)
  std::size_t begin = std::string::npos;
  for (std::size_t i = 0; i <= src.size(); ++i) {
    bool in_comment = i < src.size() && src[i] != code_only[i];
    if (in_comment && begin == std::string::npos) begin = i;
    if (!in_comment && begin != std::string::npos) {
      spans.push_back({begin, i});
      begin = std::string::npos;
    }
  }
  return spans;
}

// Offset of the first `fn <name>` declaration in stripped source.
std::size_t find_fn_decl(const std::string& stripped,
                         const std::string& name) {
  auto tokens = text::tokenize(stripped);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i].text == "fn" && tokens[i + 1].text == name)
      return tokens[i].offset;
  }
  return std::string::npos;
}

}  // namespace

const char* finding_kind_name(FindingKind kind) {
  switch (kind) {
    case FindingKind::unimplemented_macro: return "unimplemented_macro";
    case FindingKind::todo_comment: return "todo_comment";
    case FindingKind::missing_function: return "missing_function";
    case FindingKind::empty_body: return "empty_body";
  }
  return "missing_function";
}

CheckResult implementation_check(const std::filesystem::path& workspace,
                                 const std::string& rust_module,
                                 const std::string& rust_function) {
  CheckResult result;
  auto path = workspace / rust_module;
  auto missing = [&](int line) {
    result.findings.push_back(
        {FindingKind::missing_function, rust_module + ":" + std::to_string(line)});
    result.implemented = false;
    return result;
  };
  if (!std::filesystem::exists(path)) return missing(0);

  std::string src = fsutil::read_file(path);
  std::string stripped = text::strip_rust(src, /*keep_strings=*/false);
  auto starts = text::line_starts(src);

  std::size_t decl = find_fn_decl(stripped, rust_function);
  if (decl == std::string::npos) return missing(0);

  // body = braces after the signature; a trait-style `fn name(...);` has none
  std::size_t open = stripped.find('{', decl);
  std::size_t semi = stripped.find(';', decl);
  if (open == std::string::npos || (semi != std::string::npos && semi < open))
    return missing(text::line_of(starts, decl));
  int depth = 0;
  std::size_t close = std::string::npos;
  for (std::size_t i = open; i < stripped.size(); ++i) {
    if (stripped[i] == '{') ++depth;
    if (stripped[i] == '}' && --depth == 0) {
      close = i;
      break;
    }
  }
  if (close == std::string::npos) return missing(text::line_of(starts, decl));

  int decl_line = text::line_of(starts, decl);
  std::string loc = rust_module + ":" + std::to_string(decl_line);

  std::string_view body_stripped =
      std::string_view(stripped).substr(open + 1, close - open - 1);
  auto tokens = text::tokenize(body_stripped);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if ((tokens[i].text == "unimplemented" || tokens[i].text == "todo") &&
        tokens[i + 1].text == "!") {
      result.findings.push_back({FindingKind::unimplemented_macro, loc});
      break;
    }
  }

  std::string_view body_raw =
      std::string_view(src).substr(open + 1, close - open - 1);
  for (const auto& [cb, ce] : comment_spans(body_raw)) {
    std::string_view comment = body_raw.substr(cb, ce - cb);
    if (contains_ci(comment, "todo") || contains_ci(comment, "fixme") ||
        contains_ci(comment, "unimplemented!(")) {
      result.findings.push_back({FindingKind::todo_comment, loc});
      break;
    }
  }

  bool only_unit = tokens.empty() ||
                   (tokens.size() == 2 && tokens[0].text == "(" &&
                    tokens[1].text == ")");
  if (only_unit) result.findings.push_back({FindingKind::empty_body, loc});

  result.implemented = result.findings.empty();
  return result;
}

}  // namespace ctrans::orchestrate
