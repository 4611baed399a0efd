#pragma once

#include <string>
#include <vector>

#include "jsonx.hpp"

namespace ctrans {

// Non-fatal findings collected while scanning/analyzing. Severity is
// "warning" or "note"; `code` is a short machine tag, e.g. "unresolved-include".
struct Diagnostic {
  std::string severity;
  std::string code;
  std::string message;
  std::string path;
  int line = 0;

  bool operator<(const Diagnostic& o) const {
    return std::tie(path, line, code, message) <
           std::tie(o.path, o.line, o.code, o.message);
  }
};

using Diagnostics = std::vector<Diagnostic>;

inline void add_diag(Diagnostics* sink, std::string severity, std::string code,
                     std::string message, std::string path = "", int line = 0) {
  if (!sink) return;
  sink->push_back({std::move(severity), std::move(code), std::move(message),
                   std::move(path), line});
}

inline Json diagnostics_json(const Diagnostics& diags) {
  Json arr = Json::array();
  for (const auto& d : diags) {
    Json j;
    j["severity"] = d.severity;
    j["code"] = d.code;
    j["message"] = d.message;
    if (!d.path.empty()) j["path"] = d.path;
    if (d.line > 0) j["line"] = d.line;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace ctrans
