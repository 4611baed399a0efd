#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace ctrans::fsutil {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path);

// Creates parent directories as needed.
void write_file(const fs::path& path, std::string_view content);

// Temp file + rename so readers never observe a partial write.
void atomic_write_file(const fs::path& path, std::string_view content);

// Repo-relative paths with '/' separators, sorted. Directories whose name
// starts with '.' are skipped, as are entries matched by `skip`.
std::vector<std::string> list_files(
    const fs::path& root,
    const std::function<bool(const std::string&)>& skip = nullptr);

// Glob where '*' matches any run (including '/') and '?' one character.
bool glob_match(std::string_view pattern, std::string_view str);

// Content hash over relative paths + file bytes, dot-dirs excluded. Used to
// verify toolchain runs leave the source tree untouched.
std::uint64_t tree_hash(const fs::path& root);

bool dir_is_empty_or_absent(const fs::path& path);

std::string to_rel_slash(const fs::path& base, const fs::path& p);

}  // namespace ctrans::fsutil
