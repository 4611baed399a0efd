#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "diag.hpp"
#include "jsonx.hpp"

namespace ctrans::scanner {

namespace fs = std::filesystem;

enum class FileKind { c_source, header };

enum class FnFlavor { standard, static_inline, macro_wrapped };

const char* flavor_name(FnFlavor f);

struct QualifiedId {
  std::string path;
  std::string name;
  auto operator<=>(const QualifiedId&) const = default;
  std::string str() const { return path + "::" + name; }
};

struct SourceFile {
  std::string path;  // repo-relative, '/'-separated
  FileKind kind = FileKind::c_source;
  std::string text;
  int line_count = 0;
};

struct FunctionNode {
  std::string name;
  QualifiedId qualified_id;
  std::string signature_text;
  int start_line = 0;  // 1-based, inclusive
  int end_line = 0;
  std::string body_text;  // full definition lines, signature included
  FnFlavor flavor = FnFlavor::standard;
  std::vector<std::string> call_sites;  // sorted, unique
  // Extraction detail used for call-site scanning and duplicate resolution.
  std::size_t brace_open = 0;
  std::size_t brace_close = 0;
  bool in_conditional = false;
};

struct IncludeEdge {
  std::string from_path;
  std::string to_path;
  std::string raw_directive;
};

struct ScanConfig {
  std::vector<std::string> ignore_globs;
  std::vector<std::string> wrapper_macros;
  std::vector<std::string> test_path_globs{"*test*"};
  std::vector<std::string> test_name_prefixes{"test_"};
  std::string test_manifest;  // optional repo-relative "path:function" list
};

struct SourceModel {
  std::vector<SourceFile> files;
  std::vector<FunctionNode> functions;
  std::vector<IncludeEdge> includes;
  std::vector<QualifiedId> test_functions;
  Diagnostics diagnostics;

  const SourceFile* find_file(const std::string& path) const;
  const FunctionNode* find_function(const QualifiedId& id) const;
  bool is_test_function(const QualifiedId& id) const;
  bool is_test_file(const std::string& path, const ScanConfig& cfg) const;

  Json to_json() const;
  std::string hash() const;
};

SourceModel scan_repository(const fs::path& repo_root, const ScanConfig& cfg);

std::vector<FunctionNode> extract_functions(const SourceFile& file,
                                            const ScanConfig& cfg,
                                            Diagnostics* diags);

std::vector<IncludeEdge> extract_includes(const SourceFile& file,
                                          const std::set<std::string>& model_files,
                                          Diagnostics* diags);

// Identifiers followed by '(' in comment/string-stripped body text,
// intersected with known_names, C keywords excluded.
std::set<std::string> extract_call_sites(std::string_view body_text,
                                         const std::set<std::string>& known_names);

std::vector<QualifiedId> detect_test_functions(const SourceModel& model,
                                               const ScanConfig& cfg,
                                               const fs::path& repo_root);

}  // namespace ctrans::scanner
