#pragma once

// Independent oracles used by both the unit and acceptance suites. These
// stay deliberately naive (reachability closures, exhaustive enumeration) so
// they cannot share a bug with the implementations they check.

#include <random>
#include <set>
#include <vector>

#include "scanner.hpp"

namespace oracles {

// Brute-force SCC: x ~ y iff x reaches y and y reaches x.
inline std::vector<std::vector<int>> scc_oracle(
    int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) reach[i][i] = true;
  for (const auto& [a, b] : edges) reach[a][b] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) {
    if (comp[i] != -1) continue;
    std::vector<int> members;
    for (int j = 0; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) {
        comp[j] = static_cast<int>(out.size());
        members.push_back(j);
      }
    }
    out.push_back(members);
  }
  return out;
}

inline std::set<std::set<int>> as_partition(
    const std::vector<std::vector<int>>& comps) {
  std::set<std::set<int>> out;
  for (const auto& c : comps) out.insert(std::set<int>(c.begin(), c.end()));
  return out;
}

// SourceModel with random call structure; text fields stay empty because the
// graph layer only consumes names, paths, and call sites.
inline ctrans::scanner::SourceModel random_model(std::mt19937& rng,
                                                 int max_functions,
                                                 int max_groups) {
  ctrans::scanner::SourceModel model;
  int group_count = 1 + static_cast<int>(rng() % max_groups);
  int fn_total = 1 + static_cast<int>(rng() % max_functions);

  std::vector<std::string> fn_names;
  for (int i = 0; i < fn_total; ++i)
    fn_names.push_back("fn" + std::to_string(i));

  for (int g = 0; g < group_count; ++g) {
    ctrans::scanner::SourceFile f;
    f.path = "g" + std::to_string(g) + ".c";
    f.kind = ctrans::scanner::FileKind::c_source;
    f.line_count = 0;
    model.files.push_back(f);
  }

  for (int i = 0; i < fn_total; ++i) {
    ctrans::scanner::FunctionNode fn;
    fn.name = fn_names[i];
    fn.qualified_id = {model.files[rng() % group_count].path, fn.name};
    fn.start_line = i + 1;
    fn.end_line = i + 1;
    int calls = static_cast<int>(rng() % 4);
    std::set<std::string> sites;
    for (int c = 0; c < calls; ++c)
      sites.insert(fn_names[rng() % fn_total]);
    fn.call_sites.assign(sites.begin(), sites.end());
    model.functions.push_back(fn);
  }
  return model;
}

}  // namespace oracles
