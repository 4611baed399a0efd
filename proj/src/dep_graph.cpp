#include "dep_graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "error.hpp"
#include "hash.hpp"

namespace ctrans::graph {

namespace {

std::string path_stem(const std::string& path) {
  std::size_t dot = path.rfind('.');
  return dot == std::string::npos ? path : path.substr(0, dot);
}

bool is_c_file(const std::string& path) {
  return path.size() > 2 && path.compare(path.size() - 2, 2, ".c") == 0;
}

}  // namespace

std::vector<ModuleGroup> group_modules(const SourceModel& model,
                                       const ScanConfig& cfg,
                                       Diagnostics* diags) {
  std::map<std::string, ModuleGroup> by_stem;
  std::vector<std::string> lone_headers;

  for (const auto& f : model.files) {
    std::string stem = path_stem(f.path);
    if (is_c_file(f.path)) {
      by_stem[stem].group_id = stem;
      by_stem[stem].members.push_back(f.path);
    }
  }
  for (const auto& f : model.files) {
    if (is_c_file(f.path)) continue;
    std::string stem = path_stem(f.path);
    auto it = by_stem.find(stem);
    if (it != by_stem.end()) {
      it->second.members.push_back(f.path);
    } else {
      lone_headers.push_back(f.path);
    }
  }

  // A header with no stem partner joins its sole non-test includer, if any.
  for (const auto& h : lone_headers) {
    std::set<std::string> includers;
    for (const auto& e : model.includes) {
      if (e.to_path == h && is_c_file(e.from_path) &&
          !model.is_test_file(e.from_path, cfg)) {
        includers.insert(e.from_path);
      }
    }
    if (includers.size() == 1) {
      std::string stem = path_stem(*includers.begin());
      by_stem[stem].members.push_back(h);
      add_diag(diags, "note", "header-joined-group",
               h + " grouped with its sole includer " + *includers.begin(), h);
    } else {
      ModuleGroup g;
      g.group_id = path_stem(h);
      g.members.push_back(h);
      by_stem[g.group_id] = std::move(g);
    }
  }

  std::vector<ModuleGroup> groups;
  for (auto& [stem, g] : by_stem) {
    g.group_id = stem;
    std::sort(g.members.begin(), g.members.end());
    g.is_test_group = std::any_of(
        g.members.begin(), g.members.end(),
        [&](const std::string& m) { return model.is_test_file(m, cfg); });
    groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(),
            [](const ModuleGroup& a, const ModuleGroup& b) {
              return a.group_id < b.group_id;
            });
  return groups;
}

CallGraph build_intra_graph(const ModuleGroup& group, const SourceModel& model,
                            Diagnostics* diags) {
  CallGraph g;
  std::set<std::string> member_files(group.members.begin(),
                                     group.members.end());
  std::map<QualifiedId, int> index_of;
  std::map<std::string, std::vector<int>> by_name;
  for (const auto& fn : model.functions) {
    if (!member_files.count(fn.qualified_id.path)) continue;
    int idx = static_cast<int>(g.nodes.size());
    index_of[fn.qualified_id] = idx;
    by_name[fn.name].push_back(idx);
    g.nodes.push_back(fn.qualified_id);
  }

  std::set<std::pair<int, int>> edge_set;
  for (const auto& fn : model.functions) {
    auto caller_it = index_of.find(fn.qualified_id);
    if (caller_it == index_of.end()) continue;
    for (const auto& callee : fn.call_sites) {
      auto hits = by_name.find(callee);
      if (hits == by_name.end()) continue;
      int target = -1;
      if (hits->second.size() == 1) {
        target = hits->second[0];
      } else {
        // same-file definition wins; otherwise the name is ambiguous
        for (int idx : hits->second) {
          if (g.nodes[idx].path == fn.qualified_id.path) {
            target = idx;
            break;
          }
        }
        if (target < 0) {
          add_diag(diags, "warning", "ambiguous-callee",
                   "'" + callee + "' called from " + fn.qualified_id.str() +
                       " is defined in multiple files of group " +
                       group.group_id,
                   fn.qualified_id.path);
          continue;
        }
      }
      edge_set.insert({caller_it->second, target});
    }
  }
  g.edges.assign(edge_set.begin(), edge_set.end());
  return g;
}

ModuleGraph build_inter_graph(const std::vector<ModuleGroup>& groups,
                              const SourceModel& model, Diagnostics* diags) {
  ModuleGraph g;
  std::map<std::string, int> group_of_file;
  std::map<std::string, int> group_index;
  for (const auto& grp : groups) {
    int idx = static_cast<int>(g.nodes.size());
    group_index[grp.group_id] = idx;
    g.nodes.push_back(grp.group_id);
    for (const auto& m : grp.members) group_of_file[m] = idx;
  }

  std::set<std::pair<int, int>> edge_set;
  for (const auto& e : model.includes) {
    int from = group_of_file.at(e.from_path);
    int to = group_of_file.at(e.to_path);
    if (from != to) edge_set.insert({from, to});
  }

  // name -> defining groups
  std::map<std::string, std::set<int>> defined_in;
  for (const auto& fn : model.functions)
    defined_in[fn.name].insert(group_of_file.at(fn.qualified_id.path));

  for (const auto& fn : model.functions) {
    int caller_group = group_of_file.at(fn.qualified_id.path);
    for (const auto& callee : fn.call_sites) {
      const auto& owners = defined_in.at(callee);
      if (owners.count(caller_group)) continue;  // resolved within the group
      if (owners.size() == 1) {
        edge_set.insert({caller_group, *owners.begin()});
      } else {
        add_diag(diags, "warning", "ambiguous-callee",
                 "'" + callee + "' called from " + fn.qualified_id.str() +
                     " is defined in " + std::to_string(owners.size()) +
                     " other groups; no inter-module edge added",
                 fn.qualified_id.path);
      }
    }
  }
  g.edges.assign(edge_set.begin(), edge_set.end());
  return g;
}

Condensation collapse_cycles(int node_count,
                             const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(node_count);
  for (const auto& [from, to] : edges) adj[from].push_back(to);

  // Tarjan, iterative so deep chains cannot overflow the stack.
  Condensation result;
  result.component_of.assign(node_count, -1);
  std::vector<int> index(node_count, -1), low(node_count, 0);
  std::vector<bool> on_stack(node_count, false);
  std::vector<int> stack;
  int next_index = 0;

  struct Frame {
    int v;
    std::size_t edge_i;
  };
  for (int root = 0; root < node_count; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.edge_i < adj[f.v].size()) {
        int w = adj[f.v][f.edge_i++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<int> comp;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == f.v) break;
          }
          std::sort(comp.begin(), comp.end());
          int comp_id = static_cast<int>(result.components.size());
          for (int w : comp) result.component_of[w] = comp_id;
          result.components.push_back(std::move(comp));
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }

  std::set<std::pair<int, int>> comp_edges;
  for (const auto& [from, to] : edges) {
    int cf = result.component_of[from], ct = result.component_of[to];
    if (cf != ct) comp_edges.insert({cf, ct});
  }
  result.edges.assign(comp_edges.begin(), comp_edges.end());
  return result;
}

std::vector<int> kahn_sort(int node_count,
                           const std::vector<std::pair<int, int>>& dep_edges,
                           const std::function<std::string(int)>& key) {
  std::vector<int> pending(node_count, 0);  // unresolved dependencies
  std::vector<std::vector<int>> dependents(node_count);
  for (const auto& [dependent, dependency] : dep_edges) {
    ++pending[dependent];
    dependents[dependency].push_back(dependent);
  }

  using Entry = std::pair<std::string, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  for (int v = 0; v < node_count; ++v)
    if (pending[v] == 0) ready.push({key(v), v});

  std::vector<int> order;
  order.reserve(node_count);
  while (!ready.empty()) {
    int v = ready.top().second;
    ready.pop();
    order.push_back(v);
    for (int d : dependents[v]) {
      if (--pending[d] == 0) ready.push({key(d), d});
    }
  }
  if (static_cast<int>(order.size()) != node_count)
    fail(Errc::cycle_detected, "kahn_sort: input graph contains a cycle");
  return order;
}

TranslationSchedule build_schedule(const SourceModel& model,
                                   const ScanConfig& cfg, Diagnostics* diags) {
  TranslationSchedule schedule;
  auto groups = group_modules(model, cfg, diags);
  ModuleGraph inter = build_inter_graph(groups, model, diags);

  Condensation inter_cond =
      collapse_cycles(static_cast<int>(inter.nodes.size()), inter.edges);
  auto comp_key = [&](int comp) {
    return inter.nodes[inter_cond.components[comp][0]];
  };
  auto comp_order = kahn_sort(static_cast<int>(inter_cond.components.size()),
                              inter_cond.edges, comp_key);
  for (int comp : comp_order) {
    std::vector<std::string> ids;
    for (int g : inter_cond.components[comp]) ids.push_back(inter.nodes[g]);
    std::sort(ids.begin(), ids.end());
    for (auto& id : ids) schedule.group_order.push_back(std::move(id));
  }

  std::map<std::string, const ModuleGroup*> group_by_id;
  for (const auto& g : groups) group_by_id[g.group_id] = &g;
  std::map<QualifiedId, int> start_line_of;
  for (const auto& fn : model.functions)
    start_line_of[fn.qualified_id] = fn.start_line;

  int unit_id = 0;
  for (const auto& group_id : schedule.group_order) {
    const ModuleGroup* group = group_by_id.at(group_id);
    if (group->is_test_group) continue;

    CallGraph intra = build_intra_graph(*group, model, diags);
    // the schedule covers non-test functions only
    std::vector<int> keep;
    std::vector<int> remap(intra.nodes.size(), -1);
    for (std::size_t i = 0; i < intra.nodes.size(); ++i) {
      if (!model.is_test_function(intra.nodes[i])) {
        remap[i] = static_cast<int>(keep.size());
        keep.push_back(static_cast<int>(i));
      }
    }
    std::vector<std::pair<int, int>> kept_edges;
    for (const auto& [a, b] : intra.edges)
      if (remap[a] >= 0 && remap[b] >= 0)
        kept_edges.push_back({remap[a], remap[b]});

    Condensation cond =
        collapse_cycles(static_cast<int>(keep.size()), kept_edges);
    auto unit_key = [&](int comp) {
      return intra.nodes[keep[cond.components[comp][0]]].str();
    };
    auto order = kahn_sort(static_cast<int>(cond.components.size()),
                           cond.edges, unit_key);
    for (int comp : order) {
      TranslationUnit unit;
      unit.unit_id = unit_id++;
      unit.group_id = group_id;
      for (int local : cond.components[comp])
        unit.members.push_back(intra.nodes[keep[local]]);
      std::sort(unit.members.begin(), unit.members.end(),
                [&](const QualifiedId& a, const QualifiedId& b) {
                  return std::tie(a.path, start_line_of[a]) <
                         std::tie(b.path, start_line_of[b]);
                });
      schedule.units.push_back(std::move(unit));
    }
  }
  return schedule;
}

Json TranslationSchedule::to_json() const {
  Json j;
  j["group_order"] = group_order;
  j["units"] = Json::array();
  for (const auto& u : units) {
    Json ju;
    ju["unit_id"] = u.unit_id;
    ju["group_id"] = u.group_id;
    ju["members"] = Json::array();
    for (const auto& m : u.members)
      ju["members"].push_back({{"path", m.path}, {"name", m.name}});
    j["units"].push_back(std::move(ju));
  }
  return j;
}

TranslationSchedule TranslationSchedule::from_json(const Json& j) {
  TranslationSchedule s;
  for (const auto& g : j.at("group_order"))
    s.group_order.push_back(g.get<std::string>());
  for (const auto& ju : j.at("units")) {
    TranslationUnit u;
    u.unit_id = ju.at("unit_id").get<int>();
    u.group_id = ju.at("group_id").get<std::string>();
    for (const auto& m : ju.at("members"))
      u.members.push_back(
          {m.at("path").get<std::string>(), m.at("name").get<std::string>()});
    s.units.push_back(std::move(u));
  }
  return s;
}

std::string TranslationSchedule::hash() const {
  return hash_hex(to_json().dump());
}

}  // namespace ctrans::graph
