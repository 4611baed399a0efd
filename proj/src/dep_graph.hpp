#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "diag.hpp"
#include "jsonx.hpp"
#include "scanner.hpp"

namespace ctrans::graph {

using scanner::QualifiedId;
using scanner::ScanConfig;
using scanner::SourceModel;

struct ModuleGroup {
  std::string group_id;  // path stem shared by the members
  std::vector<std::string> members;
  bool is_test_group = false;
};

struct CallGraph {
  std::vector<QualifiedId> nodes;
  std::vector<std::pair<int, int>> edges;  // caller index -> callee index
};

struct ModuleGraph {
  std::vector<std::string> nodes;
  std::vector<std::pair<int, int>> edges;  // dependent index -> dependency index
};

struct TranslationUnit {
  int unit_id = 0;
  std::vector<QualifiedId> members;  // source order within the unit
  std::string group_id;
};

struct TranslationSchedule {
  std::vector<TranslationUnit> units;
  std::vector<std::string> group_order;

  Json to_json() const;
  static TranslationSchedule from_json(const Json& j);
  std::string hash() const;
};

struct Condensation {
  std::vector<std::vector<int>> components;  // members sorted ascending
  std::vector<int> component_of;             // input node -> component index
  std::vector<std::pair<int, int>> edges;    // induced, self-loops removed
};

std::vector<ModuleGroup> group_modules(const SourceModel& model,
                                       const ScanConfig& cfg,
                                       Diagnostics* diags = nullptr);

CallGraph build_intra_graph(const ModuleGroup& group, const SourceModel& model,
                            Diagnostics* diags = nullptr);

ModuleGraph build_inter_graph(const std::vector<ModuleGroup>& groups,
                              const SourceModel& model,
                              Diagnostics* diags = nullptr);

// Strongly connected components of a digraph on [0, node_count).
Condensation collapse_cycles(int node_count,
                             const std::vector<std::pair<int, int>>& edges);

// Topological order of an acyclic digraph whose edges point
// dependent -> dependency; dependencies come first. Among ready nodes the
// least key (per `key`) is emitted first, so the output is deterministic.
std::vector<int> kahn_sort(int node_count,
                           const std::vector<std::pair<int, int>>& dep_edges,
                           const std::function<std::string(int)>& key);

TranslationSchedule build_schedule(const SourceModel& model,
                                   const ScanConfig& cfg,
                                   Diagnostics* diags = nullptr);

}  // namespace ctrans::graph
