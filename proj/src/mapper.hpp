#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agent.hpp"
#include "dep_graph.hpp"
#include "diag.hpp"
#include "jsonx.hpp"
#include "scanner.hpp"

namespace ctrans::mapper {

namespace fs = std::filesystem;

enum class MapTier { static_exact, static_normalized, agent, none };

const char* tier_name(MapTier tier);
std::optional<MapTier> tier_from_name(std::string_view name);

struct FunctionMapping {
  std::string c_module;
  std::string c_function;
  std::optional<std::string> rust_module;    // both present or both absent
  std::optional<std::string> rust_function;
  MapTier tier = MapTier::none;
  bool validated = false;

  bool is_null() const { return !rust_module && !rust_function; }
};

struct MappingTable {
  struct Unresolved {
    std::string c_module;
    std::string c_function;
    std::string reason;  // ambiguous | duplicate_target | exhausted |
                         // backend_error | agent_unavailable
  };
  std::vector<FunctionMapping> entries;  // schedule order
  std::vector<Unresolved> unresolved;

  const FunctionMapping* find(const std::string& c_module,
                              const std::string& c_function) const;
  bool is_unresolved(const std::string& c_module,
                     const std::string& c_function) const;

  Json to_json() const;
  static MappingTable from_json(const Json& j);
  std::string hash() const;
};

// Lowercased with '_' and '-' removed.
std::string normalize_name(std::string_view name);

struct RustDecl {
  std::string module;  // workspace-relative path of the .rs file
  std::string name;    // bare function identifier
  bool operator<(const RustDecl& o) const {
    return std::tie(module, name) < std::tie(o.module, o.name);
  }
};

// Token-aware scan of fn declarations (free functions and impl-block methods)
// across all workspace sources.
std::vector<RustDecl> scan_rust_functions(const fs::path& workspace);

struct StaticHit {
  std::string rust_module;
  std::string rust_function;
  MapTier tier;
};

// Exact-name lookup first, then normalized; a unique hit wins, multiple
// distinct hits at the winning level are ambiguous (no result). Substring and
// prefix matching are never attempted.
std::optional<StaticHit> static_match(const std::string& c_function,
                                      const std::vector<RustDecl>& decls,
                                      std::string* reason = nullptr);
std::optional<StaticHit> static_match(const std::string& c_function,
                                      const fs::path& workspace,
                                      std::string* reason = nullptr);

bool validate_mapping(const FunctionMapping& mapping, const fs::path& c_root,
                      const fs::path& workspace);

struct MapperConfig {
  int max_attempts = 3;
  double agent_timeout_secs = 900;
  std::optional<fs::path> prompt_dir;
};

// Tier-2 fallback: asks the agent, validates the structured answer, retries
// up to max_attempts. Returns either a validated mapping (possibly null) or
// an unresolved marker via `reason`.
std::optional<FunctionMapping> agent_match(
    const scanner::FunctionNode& fn, const fs::path& c_root,
    const fs::path& workspace, agent::Backend* backend,
    const MapperConfig& cfg, std::string* reason);

MappingTable map_all(const graph::TranslationSchedule& schedule,
                     const scanner::SourceModel& model, const fs::path& c_root,
                     const fs::path& workspace, agent::Backend* backend,
                     const MapperConfig& cfg, Diagnostics* diags = nullptr);

}  // namespace ctrans::mapper
