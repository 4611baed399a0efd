#pragma once

#include <stdexcept>
#include <string>

namespace ctrans {

enum class Errc {
  config_invalid,
  io,
  empty_repository,
  duplicate_definition,
  path_occupied,
  toolchain_missing,
  build_failed,
  cycle_detected,
  script_exhausted,
  agent_backend,
  hash_mismatch,
  aborted,
  invalid_argument,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ctrans
