#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace ctrans::prompts {

// Substitutes {KEY} markers. Unknown markers are left in place.
std::string render(const std::string& tmpl,
                   const std::map<std::string, std::string>& vars);

// Returns the template text, preferring <prompt_dir>/<name> when present.
// Built-in defaults exist for: scaffold_init.txt, map_function.txt,
// translate_function.txt, compile_repair.txt, refactor_safety.txt,
// verify_tests.txt, agents_md.txt.
std::string load_template(const std::optional<std::filesystem::path>& prompt_dir,
                          const std::string& name);

const char* builtin_template(const std::string& name);

}  // namespace ctrans::prompts
