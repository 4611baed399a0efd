#include "mapper.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "error.hpp"
#include "fsutil.hpp"
#include "hash.hpp"
#include "prompts.hpp"
#include "text.hpp"

namespace ctrans::mapper {

const char* tier_name(MapTier tier) {
  switch (tier) {
    case MapTier::static_exact: return "static_exact";
    case MapTier::static_normalized: return "static_normalized";
    case MapTier::agent: return "agent";
    case MapTier::none: return "none";
  }
  return "none";
}

std::optional<MapTier> tier_from_name(std::string_view name) {
  if (name == "static_exact") return MapTier::static_exact;
  if (name == "static_normalized") return MapTier::static_normalized;
  if (name == "agent") return MapTier::agent;
  if (name == "none") return MapTier::none;
  return std::nullopt;
}

std::string normalize_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::vector<RustDecl> scan_rust_functions(const fs::path& workspace) {
  std::vector<RustDecl> decls;
  for (const auto& rel : fsutil::list_files(workspace)) {
    if (rel.size() < 3 || rel.compare(rel.size() - 3, 3, ".rs") != 0) continue;
    std::string stripped =
        text::strip_rust(fsutil::read_file(workspace / rel));
    auto tokens = text::tokenize(stripped);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      if (tokens[i].text != "fn") continue;
      if (!text::is_identifier(tokens[i + 1].text)) continue;
      decls.push_back({rel, std::string(tokens[i + 1].text)});
    }
  }
  std::sort(decls.begin(), decls.end());
  decls.erase(std::unique(decls.begin(), decls.end(),
                          [](const RustDecl& a, const RustDecl& b) {
                            return a.module == b.module && a.name == b.name;
                          }),
              decls.end());
  return decls;
}

std::optional<StaticHit> static_match(const std::string& c_function,
                                      const std::vector<RustDecl>& decls,
                                      std::string* reason) {
  std::set<std::pair<std::string, std::string>> exact, normalized;
  std::string want = normalize_name(c_function);
  for (const auto& d : decls) {
    if (d.name == c_function) exact.insert({d.module, d.name});
    if (normalize_name(d.name) == want) normalized.insert({d.module, d.name});
  }
  if (exact.size() == 1)
    return StaticHit{exact.begin()->first, exact.begin()->second,
                     MapTier::static_exact};
  if (exact.size() > 1) {
    if (reason) *reason = "ambiguous";
    return std::nullopt;
  }
  if (normalized.size() == 1)
    return StaticHit{normalized.begin()->first, normalized.begin()->second,
                     MapTier::static_normalized};
  if (normalized.size() > 1) {
    if (reason) *reason = "ambiguous";
    return std::nullopt;
  }
  if (reason) *reason = "no_match";
  return std::nullopt;
}

std::optional<StaticHit> static_match(const std::string& c_function,
                                      const fs::path& workspace,
                                      std::string* reason) {
  return static_match(c_function, scan_rust_functions(workspace), reason);
}

bool validate_mapping(const FunctionMapping& mapping, const fs::path& c_root,
                      const fs::path& workspace) {
  if (!fs::exists(c_root / mapping.c_module)) return false;
  if (mapping.is_null()) return true;
  if (!mapping.rust_module || !mapping.rust_function) return false;
  fs::path module_path = workspace / *mapping.rust_module;
  if (!fs::exists(module_path)) return false;
  // file-scoped: the function must be declared in this exact module
  std::string stripped = text::strip_rust(fsutil::read_file(module_path));
  auto tokens = text::tokenize(stripped);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i].text == "fn" && tokens[i + 1].text == *mapping.rust_function)
      return true;
  }
  return false;
}

namespace {

// Agents may answer with a qualified path (Type::name); validation applies
// to the bare identifier.
std::string bare_name(const std::string& name) {
  std::size_t sep = name.rfind("::");
  return sep == std::string::npos ? name : name.substr(sep + 2);
}

std::optional<std::string> json_opt_string(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

std::optional<FunctionMapping> agent_match(
    const scanner::FunctionNode& fn, const fs::path& c_root,
    const fs::path& workspace, agent::Backend* backend,
    const MapperConfig& cfg, std::string* reason) {
  std::string tmpl =
      prompts::load_template(cfg.prompt_dir, "map_function.txt");
  std::string prompt = prompts::render(
      tmpl, {{"C_FUNCTION", fn.name},
             {"C_SIGNATURE", fn.signature_text},
             {"C_MODULE", fn.qualified_id.path},
             {"C_ROOT", c_root.string()},
             {"WORKSPACE", workspace.string()}});

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    agent::Request request;
    request.role = agent::Role::map;
    request.prompt = prompt;
    request.workspace_paths = {c_root, workspace};
    request.timeout_secs = cfg.agent_timeout_secs;
    request.attempt_index = attempt;
    agent::Result result = backend->invoke(request);

    if (result.status == agent::Status::backend_error) {
      if (reason) *reason = "backend_error";
      return std::nullopt;
    }
    if (result.status == agent::Status::timed_out) continue;
    if (!result.structured_payload) continue;  // no parseable answer

    FunctionMapping mapping;
    mapping.c_module = fn.qualified_id.path;
    mapping.c_function = fn.name;
    mapping.tier = MapTier::agent;
    auto module = json_opt_string(*result.structured_payload, "rust_module");
    auto function = json_opt_string(*result.structured_payload, "rust_function");
    if (module && function) {
      mapping.rust_module = *module;
      mapping.rust_function = bare_name(*function);
    } else if (module || function) {
      continue;  // half-null answers are invalid
    } else {
      mapping.tier = MapTier::none;  // declared: no counterpart
    }
    if (validate_mapping(mapping, c_root, workspace)) {
      mapping.validated = true;
      return mapping;
    }
  }
  if (reason) *reason = "exhausted";
  return std::nullopt;
}

MappingTable map_all(const graph::TranslationSchedule& schedule,
                     const scanner::SourceModel& model, const fs::path& c_root,
                     const fs::path& workspace, agent::Backend* backend,
                     const MapperConfig& cfg, Diagnostics* diags) {
  MappingTable table;
  auto decls = scan_rust_functions(workspace);
  std::map<std::pair<std::string, std::string>, int> target_owner;  // -> unit

  for (const auto& unit : schedule.units) {
    for (const auto& member : unit.members) {
      const scanner::FunctionNode* fn = model.find_function(member);
      if (!fn) continue;

      std::string reason;
      std::optional<FunctionMapping> mapping;
      if (auto hit = static_match(member.name, decls, &reason)) {
        FunctionMapping m;
        m.c_module = member.path;
        m.c_function = member.name;
        m.rust_module = hit->rust_module;
        m.rust_function = hit->rust_function;
        m.tier = hit->tier;
        m.validated = true;  // found by the same search validation would run
        mapping = std::move(m);
      } else if (backend) {
        mapping = agent_match(*fn, c_root, workspace, backend, cfg, &reason);
      } else if (reason == "no_match" || reason == "ambiguous") {
        reason = "agent_unavailable";
      }

      if (!mapping) {
        table.unresolved.push_back({member.path, member.name, reason});
        add_diag(diags, "warning", "unresolved-mapping",
                 member.str() + ": " + reason, member.path);
        continue;
      }
      if (!mapping->is_null()) {
        auto key = std::make_pair(*mapping->rust_module, *mapping->rust_function);
        auto owner = target_owner.find(key);
        if (owner != target_owner.end() && owner->second != unit.unit_id) {
          table.unresolved.push_back(
              {member.path, member.name, "duplicate_target"});
          add_diag(diags, "warning", "duplicate-target",
                   member.str() + " maps to an already-claimed target " +
                       key.first + "::" + key.second,
                   member.path);
          continue;
        }
        target_owner[key] = unit.unit_id;
      }
      table.entries.push_back(std::move(*mapping));
    }
  }
  return table;
}

const FunctionMapping* MappingTable::find(const std::string& c_module,
                                          const std::string& c_function) const {
  for (const auto& e : entries)
    if (e.c_module == c_module && e.c_function == c_function) return &e;
  return nullptr;
}

bool MappingTable::is_unresolved(const std::string& c_module,
                                 const std::string& c_function) const {
  for (const auto& u : unresolved)
    if (u.c_module == c_module && u.c_function == c_function) return true;
  return false;
}

Json MappingTable::to_json() const {
  Json j;
  j["entries"] = Json::array();
  for (const auto& e : entries) {
    Json je;
    je["c_module"] = e.c_module;
    je["c_function"] = e.c_function;
    je["rust_module"] = e.rust_module ? Json(*e.rust_module) : Json(nullptr);
    je["rust_function"] =
        e.rust_function ? Json(*e.rust_function) : Json(nullptr);
    je["tier"] = tier_name(e.tier);
    je["validated"] = e.validated;
    j["entries"].push_back(std::move(je));
  }
  j["unresolved"] = Json::array();
  for (const auto& u : unresolved) {
    j["unresolved"].push_back({{"c_module", u.c_module},
                               {"c_function", u.c_function},
                               {"reason", u.reason}});
  }
  return j;
}

MappingTable MappingTable::from_json(const Json& j) {
  MappingTable t;
  for (const auto& je : j.at("entries")) {
    FunctionMapping e;
    e.c_module = je.at("c_module").get<std::string>();
    e.c_function = je.at("c_function").get<std::string>();
    if (!je.at("rust_module").is_null())
      e.rust_module = je.at("rust_module").get<std::string>();
    if (!je.at("rust_function").is_null())
      e.rust_function = je.at("rust_function").get<std::string>();
    auto tier = tier_from_name(je.value("tier", "none"));
    e.tier = tier.value_or(MapTier::none);
    e.validated = je.value("validated", false);
    t.entries.push_back(std::move(e));
  }
  for (const auto& ju : j.at("unresolved")) {
    t.unresolved.push_back({ju.at("c_module").get<std::string>(),
                            ju.at("c_function").get<std::string>(),
                            ju.at("reason").get<std::string>()});
  }
  return t;
}

std::string MappingTable::hash() const { return hash_hex(to_json().dump()); }

}  // namespace ctrans::mapper
