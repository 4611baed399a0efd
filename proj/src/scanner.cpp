#include "scanner.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "error.hpp"
#include "fsutil.hpp"
#include "hash.hpp"
#include "text.hpp"

namespace ctrans::scanner {

namespace {

// Identifiers that sit in a function-name position without naming a function.
bool is_decorator(std::string_view s) {
  return s == "__attribute__" || s == "__declspec" || s == "_Pragma" ||
         s == "__asm__" || s == "__asm";
}

std::size_t skip_ws_back(std::string_view s, std::size_t i) {
  while (i != std::string_view::npos && i < s.size() &&
         std::isspace(static_cast<unsigned char>(s[i]))) {
    if (i == 0) return std::string_view::npos;
    --i;
  }
  return i;
}

// Finds the '(' matching the ')' at `close`, scanning backwards.
std::size_t match_paren_back(std::string_view s, std::size_t close) {
  int depth = 0;
  for (std::size_t i = close;; --i) {
    if (s[i] == ')') ++depth;
    if (s[i] == '(') {
      if (--depth == 0) return i;
    }
    if (i == 0) break;
  }
  return std::string_view::npos;
}

std::pair<std::string_view, std::size_t> ident_back(std::string_view s,
                                                    std::size_t end) {
  if (end == std::string_view::npos || !text::is_ident_char(s[end]))
    return {{}, std::string_view::npos};
  std::size_t begin = end;
  while (begin > 0 && text::is_ident_char(s[begin - 1])) --begin;
  if (!text::is_ident_start(s[begin])) return {{}, std::string_view::npos};
  return {s.substr(begin, end - begin + 1), begin};
}

// Blank out preprocessor directive lines (with backslash continuations) and
// record, per byte offset, whether it lies inside an #if/#ifdef region.
struct DirectiveScan {
  std::string blanked;
  std::vector<std::size_t> starts;
  std::vector<int> cond_depth_per_line;  // depth at start of each line
};

DirectiveScan blank_directives(const std::string& stripped) {
  DirectiveScan out;
  out.blanked = stripped;
  out.starts = text::line_starts(stripped);
  out.cond_depth_per_line.assign(out.starts.size(), 0);
  int depth = 0;
  for (std::size_t li = 0; li < out.starts.size(); ++li) {
    out.cond_depth_per_line[li] = depth;
    std::size_t begin = out.starts[li];
    std::size_t end = (li + 1 < out.starts.size()) ? out.starts[li + 1] - 1
                                                   : stripped.size();
    std::size_t i = begin;
    while (i < end && std::isspace(static_cast<unsigned char>(stripped[i])))
      ++i;
    if (i >= end || stripped[i] != '#') continue;
    ++i;
    while (i < end && std::isspace(static_cast<unsigned char>(stripped[i])))
      ++i;
    std::size_t kw_end = i;
    while (kw_end < end && text::is_ident_char(stripped[kw_end])) ++kw_end;
    std::string_view kw(stripped.data() + i, kw_end - i);
    if (kw == "if" || kw == "ifdef" || kw == "ifndef") {
      ++depth;
    } else if (kw == "endif") {
      if (depth > 0) --depth;
    }
    // blank this line and any continuation lines
    std::size_t lj = li;
    while (true) {
      std::size_t lb = out.starts[lj];
      std::size_t le = (lj + 1 < out.starts.size()) ? out.starts[lj + 1] - 1
                                                    : stripped.size();
      bool continues = le > lb && stripped[le - 1] == '\\';
      for (std::size_t k = lb; k < le; ++k) out.blanked[k] = ' ';
      if (!continues || lj + 1 >= out.starts.size()) break;
      ++lj;
      out.cond_depth_per_line[lj] = depth;
    }
    li = lj;
  }
  return out;
}

struct Candidate {
  std::string name;
  FnFlavor flavor = FnFlavor::standard;
  std::size_t decl_begin = 0;  // offset of the first declarator token
};

// Inspects the text before a depth-0 '{' and decides what opened it.
enum class BlockKind { function, extern_c, other, knr_suspect };

BlockKind classify_block(std::string_view blanked, std::size_t brace,
                         const ScanConfig& cfg, Candidate* out) {
  if (brace == 0) return BlockKind::other;
  std::size_t i = skip_ws_back(blanked, brace - 1);
  if (i == std::string_view::npos) return BlockKind::other;
  char c = blanked[i];

  if (c == '"') {
    // extern "C" { ... }
    if (i == 0) return BlockKind::other;
    std::size_t open_quote = blanked.rfind('"', i - 1);
    if (open_quote == std::string_view::npos) return BlockKind::other;
    std::size_t j = open_quote == 0 ? std::string_view::npos
                                    : skip_ws_back(blanked, open_quote - 1);
    auto [kw, kw_begin] = ident_back(blanked, j);
    return kw == "extern" ? BlockKind::extern_c : BlockKind::other;
  }

  if (c == ';') return BlockKind::knr_suspect;
  if (c != ')') return BlockKind::other;

  std::size_t args_open = match_paren_back(blanked, i);
  if (args_open == std::string_view::npos || args_open == 0)
    return BlockKind::other;
  std::size_t j = skip_ws_back(blanked, args_open - 1);
  if (j == std::string_view::npos) return BlockKind::other;

  if (text::is_ident_char(blanked[j])) {
    auto [name, name_begin] = ident_back(blanked, j);
    if (name.empty() || text::is_c_keyword(name) || is_decorator(name))
      return BlockKind::other;
    out->name = std::string(name);
    out->flavor = FnFlavor::standard;
    out->decl_begin = name_begin;
    return BlockKind::function;
  }

  if (blanked[j] == ')') {
    // MACRO(name)(args) { ... }
    std::size_t macro_open = match_paren_back(blanked, j);
    if (macro_open == std::string_view::npos || macro_open == 0)
      return BlockKind::other;
    std::string inner = text::collapse_ws(
        blanked.substr(macro_open + 1, j - macro_open - 1));
    if (!text::is_identifier(inner)) return BlockKind::other;
    std::size_t k = skip_ws_back(blanked, macro_open - 1);
    auto [macro, macro_begin] = ident_back(blanked, k);
    if (macro.empty()) return BlockKind::other;
    bool listed = std::find(cfg.wrapper_macros.begin(),
                            cfg.wrapper_macros.end(),
                            std::string(macro)) != cfg.wrapper_macros.end();
    if (!listed) return BlockKind::other;
    out->name = inner;
    out->flavor = FnFlavor::macro_wrapped;
    out->decl_begin = macro_begin;
    return BlockKind::function;
  }

  return BlockKind::other;
}

// Walks back from the declarator to the start of its declaration specifiers.
std::size_t find_signature_begin(std::string_view blanked, std::size_t from) {
  std::size_t i = from;
  while (i > 0) {
    char c = blanked[i - 1];
    if (c == ';' || c == '}' || c == '{') break;
    --i;
  }
  while (i < from && std::isspace(static_cast<unsigned char>(blanked[i]))) ++i;
  return i;
}

bool signature_is_static_inline(std::string_view sig) {
  bool has_static = false, has_inline = false;
  for (const auto& tok : text::tokenize(sig)) {
    if (tok.text == "static") has_static = true;
    if (tok.text == "inline" || tok.text == "__inline" ||
        tok.text == "__inline__")
      has_inline = true;
  }
  return has_static && has_inline;
}

}  // namespace

const char* flavor_name(FnFlavor f) {
  switch (f) {
    case FnFlavor::standard: return "standard";
    case FnFlavor::static_inline: return "static_inline";
    case FnFlavor::macro_wrapped: return "macro_wrapped";
  }
  return "standard";
}

std::vector<FunctionNode> extract_functions(const SourceFile& file,
                                            const ScanConfig& cfg,
                                            Diagnostics* diags) {
  std::string stripped = text::strip_c(file.text);
  DirectiveScan scan = blank_directives(stripped);
  const std::string& blanked = scan.blanked;

  struct OpenBrace {
    bool transparent = false;
    bool pending = false;
    Candidate candidate;
    std::size_t open_pos = 0;
  };
  std::vector<OpenBrace> stack;
  std::vector<FunctionNode> nodes;
  bool unbalanced = false;

  auto effective_depth = [&]() {
    std::size_t d = 0;
    for (const auto& b : stack)
      if (!b.transparent) ++d;
    return d;
  };

  for (std::size_t i = 0; i < blanked.size(); ++i) {
    char c = blanked[i];
    if (c == '{') {
      OpenBrace ob;
      ob.open_pos = i;
      if (effective_depth() == 0) {
        Candidate cand;
        switch (classify_block(blanked, i, cfg, &cand)) {
          case BlockKind::function:
            ob.pending = true;
            ob.candidate = cand;
            break;
          case BlockKind::extern_c:
            ob.transparent = true;
            break;
          case BlockKind::knr_suspect:
            add_diag(diags, "warning", "knr-definition",
                     "possible K&R-style definition is not extracted",
                     file.path, text::line_of(scan.starts, i));
            break;
          case BlockKind::other:
            break;
        }
      }
      stack.push_back(ob);
    } else if (c == '}') {
      if (stack.empty()) {
        unbalanced = true;
        break;
      }
      OpenBrace ob = stack.back();
      stack.pop_back();
      if (ob.pending) {
        FunctionNode node;
        node.name = ob.candidate.name;
        node.flavor = ob.candidate.flavor;
        node.brace_open = ob.open_pos;
        node.brace_close = i;
        std::size_t sig_begin =
            find_signature_begin(blanked, ob.candidate.decl_begin);
        node.signature_text = text::collapse_ws(
            blanked.substr(sig_begin, ob.open_pos - sig_begin));
        if (node.flavor == FnFlavor::standard &&
            signature_is_static_inline(node.signature_text)) {
          node.flavor = FnFlavor::static_inline;
        }
        node.start_line = text::line_of(scan.starts, sig_begin);
        node.end_line = text::line_of(scan.starts, i);
        node.body_text =
            text::slice_lines(file.text, node.start_line, node.end_line);
        node.qualified_id = {file.path, node.name};
        int line_idx = node.start_line - 1;
        node.in_conditional =
            line_idx >= 0 &&
            static_cast<std::size_t>(line_idx) < scan.cond_depth_per_line.size() &&
            scan.cond_depth_per_line[line_idx] > 0;
        nodes.push_back(std::move(node));
      }
    }
  }
  if (!stack.empty()) unbalanced = true;

  if (unbalanced) {
    add_diag(diags, "warning", "unbalanced-braces",
             "brace nesting never returns to zero; no functions extracted",
             file.path);
    return {};
  }

  // Duplicate names within one file: hard error, unless a conditional
  // compilation branch is involved, in which case the first wins.
  std::vector<FunctionNode> result;
  std::map<std::string, std::size_t> seen;
  for (auto& node : nodes) {
    auto it = seen.find(node.name);
    if (it == seen.end()) {
      seen[node.name] = result.size();
      result.push_back(std::move(node));
      continue;
    }
    if (node.in_conditional || result[it->second].in_conditional) {
      add_diag(diags, "warning", "conditional-duplicate",
               "duplicate definition of '" + node.name +
                   "' in a conditional branch; first occurrence kept",
               file.path, node.start_line);
    } else {
      fail(Errc::duplicate_definition,
           file.path + ": function '" + node.name + "' defined twice (lines " +
               std::to_string(result[it->second].start_line) + " and " +
               std::to_string(node.start_line) + ")");
    }
  }
  return result;
}

std::vector<IncludeEdge> extract_includes(const SourceFile& file,
                                          const std::set<std::string>& model_files,
                                          Diagnostics* diags) {
  std::vector<IncludeEdge> edges;
  std::istringstream in(file.text);
  std::string line;
  int line_no = 0;
  fs::path own_dir = fs::path(file.path).parent_path();
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i >= line.size() || line[i] != '#') continue;
    ++i;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (line.compare(i, 7, "include") != 0) continue;
    i += 7;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i >= line.size()) continue;
    if (line[i] == '<') continue;  // system include: never an edge
    if (line[i] != '"') continue;
    std::size_t close = line.find('"', i + 1);
    if (close == std::string::npos) continue;
    std::string target = line.substr(i + 1, close - i - 1);
    std::string raw = line.substr(0, close + 1);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front())))
      raw.erase(raw.begin());

    // resolve relative to the including file's directory, then repo root
    std::string candidate =
        (own_dir / target).lexically_normal().generic_string();
    if (model_files.count(candidate)) {
      edges.push_back({file.path, candidate, raw});
      continue;
    }
    candidate = fs::path(target).lexically_normal().generic_string();
    if (model_files.count(candidate)) {
      edges.push_back({file.path, candidate, raw});
      continue;
    }
    add_diag(diags, "note", "unresolved-include",
             "quoted include does not resolve inside the repository: " + raw,
             file.path, line_no);
  }
  return edges;
}

std::set<std::string> extract_call_sites(std::string_view body_text,
                                         const std::set<std::string>& known_names) {
  std::set<std::string> calls;
  std::string stripped = text::strip_c(body_text);
  auto tokens = text::tokenize(stripped);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    if (!text::is_identifier(tok.text)) continue;
    if (text::is_c_keyword(tok.text)) continue;
    if (tokens[i + 1].text != "(") continue;
    std::string name(tok.text);
    if (known_names.count(name)) calls.insert(std::move(name));
  }
  return calls;
}

std::vector<QualifiedId> detect_test_functions(const SourceModel& model,
                                               const ScanConfig& cfg,
                                               const fs::path& repo_root) {
  std::set<QualifiedId> out;
  for (const auto& fn : model.functions) {
    for (const auto& glob : cfg.test_path_globs) {
      if (fsutil::glob_match(glob, fn.qualified_id.path)) {
        out.insert(fn.qualified_id);
        break;
      }
    }
    for (const auto& prefix : cfg.test_name_prefixes) {
      if (fn.name.rfind(prefix, 0) == 0) {
        out.insert(fn.qualified_id);
        break;
      }
    }
  }
  if (!cfg.test_manifest.empty()) {
    fs::path manifest = repo_root / cfg.test_manifest;
    if (fs::exists(manifest)) {
      std::istringstream in(fsutil::read_file(manifest));
      std::string line;
      while (std::getline(in, line)) {
        std::size_t sep = line.rfind(':');
        if (sep == std::string::npos) continue;
        QualifiedId id{line.substr(0, sep), line.substr(sep + 1)};
        if (model.find_function(id)) out.insert(id);
      }
    }
  }
  return {out.begin(), out.end()};
}

const SourceFile* SourceModel::find_file(const std::string& path) const {
  for (const auto& f : files)
    if (f.path == path) return &f;
  return nullptr;
}

const FunctionNode* SourceModel::find_function(const QualifiedId& id) const {
  for (const auto& fn : functions)
    if (fn.qualified_id == id) return &fn;
  return nullptr;
}

bool SourceModel::is_test_function(const QualifiedId& id) const {
  return std::binary_search(test_functions.begin(), test_functions.end(), id);
}

bool SourceModel::is_test_file(const std::string& path,
                               const ScanConfig& cfg) const {
  for (const auto& glob : cfg.test_path_globs)
    if (fsutil::glob_match(glob, path)) return true;
  return false;
}

SourceModel scan_repository(const fs::path& repo_root, const ScanConfig& cfg) {
  if (!fs::exists(repo_root) || !fs::is_directory(repo_root))
    fail(Errc::io, "repository root not found: " + repo_root.string());

  auto skip = [&cfg](const std::string& rel) {
    for (const auto& glob : cfg.ignore_globs)
      if (fsutil::glob_match(glob, rel)) return true;
    return false;
  };

  SourceModel model;
  for (const auto& rel : fsutil::list_files(repo_root, skip)) {
    FileKind kind;
    if (rel.size() > 2 && rel.compare(rel.size() - 2, 2, ".c") == 0) {
      kind = FileKind::c_source;
    } else if (rel.size() > 2 && rel.compare(rel.size() - 2, 2, ".h") == 0) {
      kind = FileKind::header;
    } else {
      continue;
    }
    SourceFile sf;
    sf.path = rel;
    sf.kind = kind;
    sf.text = text::utf8_lossy(fsutil::read_file(repo_root / rel));
    sf.line_count = text::count_lines(sf.text);
    model.files.push_back(std::move(sf));
  }
  if (model.files.empty())
    fail(Errc::empty_repository,
         "no .c or .h files found under " + repo_root.string());

  std::set<std::string> file_set;
  for (const auto& f : model.files) file_set.insert(f.path);

  for (const auto& f : model.files) {
    auto fns = extract_functions(f, cfg, &model.diagnostics);
    for (auto& fn : fns) model.functions.push_back(std::move(fn));
    auto incs = extract_includes(f, file_set, &model.diagnostics);
    for (auto& e : incs) model.includes.push_back(std::move(e));
  }

  std::set<std::string> known;
  for (const auto& fn : model.functions) known.insert(fn.name);
  std::map<std::string, std::string> stripped_by_file;
  for (const auto& f : model.files) stripped_by_file[f.path] = text::strip_c(f.text);
  for (auto& fn : model.functions) {
    // call sites come from the brace region only, so a function's own
    // signature never registers as a call
    std::string_view region(stripped_by_file[fn.qualified_id.path]);
    region = region.substr(fn.brace_open, fn.brace_close - fn.brace_open + 1);
    auto calls = extract_call_sites(region, known);
    fn.call_sites.assign(calls.begin(), calls.end());
  }

  std::sort(model.functions.begin(), model.functions.end(),
            [](const FunctionNode& a, const FunctionNode& b) {
              return std::tie(a.qualified_id.path, a.start_line) <
                     std::tie(b.qualified_id.path, b.start_line);
            });
  std::sort(model.includes.begin(), model.includes.end(),
            [](const IncludeEdge& a, const IncludeEdge& b) {
              return std::tie(a.from_path, a.to_path) <
                     std::tie(b.from_path, b.to_path);
            });

  model.test_functions = detect_test_functions(model, cfg, repo_root);
  std::sort(model.test_functions.begin(), model.test_functions.end());
  std::sort(model.diagnostics.begin(), model.diagnostics.end());
  return model;
}

Json SourceModel::to_json() const {
  Json j;
  j["files"] = Json::array();
  for (const auto& f : files) {
    Json jf;
    jf["path"] = f.path;
    jf["kind"] = f.kind == FileKind::c_source ? "c_source" : "header";
    jf["line_count"] = f.line_count;
    jf["text"] = f.text;
    j["files"].push_back(std::move(jf));
  }
  j["functions"] = Json::array();
  for (const auto& fn : functions) {
    Json jf;
    jf["path"] = fn.qualified_id.path;
    jf["name"] = fn.name;
    jf["signature"] = fn.signature_text;
    jf["flavor"] = flavor_name(fn.flavor);
    jf["body_span"] = {{"start_line", fn.start_line}, {"end_line", fn.end_line}};
    jf["body_text"] = fn.body_text;
    jf["call_sites"] = fn.call_sites;
    j["functions"].push_back(std::move(jf));
  }
  j["includes"] = Json::array();
  for (const auto& e : includes) {
    j["includes"].push_back(
        {{"from", e.from_path}, {"to", e.to_path}, {"raw", e.raw_directive}});
  }
  j["test_functions"] = Json::array();
  for (const auto& id : test_functions)
    j["test_functions"].push_back({{"path", id.path}, {"name", id.name}});
  j["diagnostics"] = diagnostics_json(diagnostics);
  return j;
}

std::string SourceModel::hash() const { return hash_hex(to_json().dump()); }

}  // namespace ctrans::scanner
