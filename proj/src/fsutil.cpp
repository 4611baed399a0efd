#include "fsutil.hpp"

#include <algorithm>
#include <fstream>
#include <system_error>

#include "error.hpp"
#include "hash.hpp"

namespace ctrans::fsutil {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot read file: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot write file: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(Errc::io, "short write: " + path.string());
}

void atomic_write_file(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, content);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(Errc::io, "atomic rename failed: " + path.string() + ": " +
                             ec.message());
}

std::vector<std::string> list_files(
    const fs::path& root, const std::function<bool(const std::string&)>& skip) {
  std::vector<std::string> out;
  if (!fs::exists(root)) return out;
  fs::recursive_directory_iterator it(
      root, fs::directory_options::skip_permission_denied);
  for (auto end = fs::end(it); it != end; ++it) {
    const auto& entry = *it;
    std::string name = entry.path().filename().string();
    if (entry.is_directory()) {
      if (!name.empty() && name[0] == '.') it.disable_recursion_pending();
      continue;
    }
    if (!entry.is_regular_file()) continue;
    if (!name.empty() && name[0] == '.') continue;
    std::string rel = to_rel_slash(root, entry.path());
    if (skip && skip(rel)) continue;
    out.push_back(std::move(rel));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool glob_match(std::string_view pattern, std::string_view str) {
  std::size_t p = 0, s = 0;
  std::size_t star_p = std::string_view::npos, star_s = 0;
  while (s < str.size()) {
    if (p < pattern.size() &&
        (pattern[p] == '?' || pattern[p] == str[s])) {
      ++p;
      ++s;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star_p = p++;
      star_s = s;
    } else if (star_p != std::string_view::npos) {
      p = star_p + 1;
      s = ++star_s;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::uint64_t tree_hash(const fs::path& root) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& rel : list_files(root)) {
    h = fnv1a64(rel, h);
    h = fnv1a64(read_file(root / rel), h);
  }
  return h;
}

bool dir_is_empty_or_absent(const fs::path& path) {
  if (!fs::exists(path)) return true;
  if (!fs::is_directory(path)) return false;
  return fs::directory_iterator(path) == fs::directory_iterator();
}

std::string to_rel_slash(const fs::path& base, const fs::path& p) {
  std::error_code ec;
  fs::path rel = fs::relative(p, base, ec);
  if (ec) rel = p;
  return rel.generic_string();
}

}  // namespace ctrans::fsutil
