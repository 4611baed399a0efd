#include "text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace ctrans::text {

namespace {

void blank(std::string& s, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to && i < s.size(); ++i) {
    if (s[i] != '\n') s[i] = ' ';
  }
}

}  // namespace

std::string strip_c(std::string_view src) {
  std::string out(src);
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    char c = src[i];
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      std::size_t j = i;
      while (j < n && src[j] != '\n') ++j;
      blank(out, i, j);
      i = j;
    } else if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      std::size_t j = i + 2;
      while (j + 1 < n && !(src[j] == '*' && src[j + 1] == '/')) ++j;
      std::size_t end = (j + 1 < n) ? j + 2 : n;
      blank(out, i, end);
      i = end;
    } else if (c == '"' || c == '\'') {
      char quote = c;
      std::size_t j = i + 1;
      while (j < n && src[j] != quote) {
        if (src[j] == '\\' && j + 1 < n) ++j;
        if (src[j] == '\n') break;  // unterminated literal: stop at EOL
        ++j;
      }
      // keep the quotes, blank the contents
      blank(out, i + 1, j);
      i = (j < n && src[j] == quote) ? j + 1 : j;
    } else {
      ++i;
    }
  }
  return out;
}

std::string strip_rust(std::string_view src, bool keep_strings) {
  std::string out(src);
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    char c = src[i];
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      std::size_t j = i;
      while (j < n && src[j] != '\n') ++j;
      blank(out, i, j);
      i = j;
    } else if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      int depth = 1;
      std::size_t j = i + 2;
      while (j < n && depth > 0) {
        if (j + 1 < n && src[j] == '/' && src[j + 1] == '*') {
          ++depth;
          j += 2;
        } else if (j + 1 < n && src[j] == '*' && src[j + 1] == '/') {
          --depth;
          j += 2;
        } else {
          ++j;
        }
      }
      blank(out, i, j);
      i = j;
    } else if ((c == 'r' || c == 'b') &&
               (i == 0 || !is_ident_char(src[i - 1]))) {
      // raw / byte string prefixes: r"", r#""#, br"", b"", b''
      std::size_t j = i;
      bool has_b = false, has_r = false;
      if (src[j] == 'b') {
        has_b = true;
        ++j;
      }
      if (j < n && src[j] == 'r') {
        has_r = true;
        ++j;
      }
      if (has_r) {
        std::size_t hashes = 0;
        while (j < n && src[j] == '#') {
          ++hashes;
          ++j;
        }
        if (j < n && src[j] == '"') {
          std::size_t k = j + 1;
          std::string closer = "\"" + std::string(hashes, '#');
          std::size_t endpos = src.find(closer, k);
          std::size_t end = (endpos == std::string_view::npos)
                                ? n
                                : endpos + closer.size();
          if (!keep_strings) blank(out, j + 1, end == n ? n : endpos);
          i = end;
          continue;
        }
        i += 1;  // plain identifier starting with r/br
        continue;
      }
      if (has_b && j < n && (src[j] == '"' || src[j] == '\'')) {
        char quote = src[j];
        std::size_t k = j + 1;
        while (k < n && src[k] != quote) {
          if (src[k] == '\\' && k + 1 < n) ++k;
          ++k;
        }
        if (!keep_strings) blank(out, j + 1, k);
        i = (k < n) ? k + 1 : n;
        continue;
      }
      ++i;
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < n && src[j] != '"') {
        if (src[j] == '\\' && j + 1 < n) ++j;
        ++j;
      }
      if (!keep_strings) blank(out, i + 1, j);
      i = (j < n) ? j + 1 : n;
    } else if (c == '\'') {
      // distinguish char literal from lifetime
      if (i + 1 < n && (is_ident_start(src[i + 1]))) {
        std::size_t j = i + 1;
        while (j < n && is_ident_char(src[j])) ++j;
        if (j < n && src[j] == '\'') {
          blank(out, i + 1, j);  // 'a' style char literal
          i = j + 1;
        } else {
          i = j;  // lifetime: leave as-is
        }
      } else if (i + 1 < n && src[i + 1] == '\\') {
        std::size_t j = i + 2;
        if (j < n) ++j;  // escaped char
        while (j < n && src[j] != '\'') ++j;
        blank(out, i + 1, j);
        i = (j < n) ? j + 1 : n;
      } else if (i + 2 < n && src[i + 2] == '\'') {
        blank(out, i + 1, i + 2);  // '(' style char literal
        i = i + 3;
      } else {
        ++i;
      }
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<std::size_t> line_starts(std::string_view src) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == '\n') starts.push_back(i + 1);
  }
  return starts;
}

int line_of(const std::vector<std::size_t>& starts, std::size_t offset) {
  auto it = std::upper_bound(starts.begin(), starts.end(), offset);
  return static_cast<int>(it - starts.begin());
}

std::string slice_lines(std::string_view src, int first_line, int last_line) {
  auto starts = line_starts(src);
  if (first_line < 1 || static_cast<std::size_t>(first_line) > starts.size())
    return "";
  std::size_t begin = starts[first_line - 1];
  std::size_t end;
  if (static_cast<std::size_t>(last_line) >= starts.size()) {
    end = src.size();
    if (end > begin && src[end - 1] == '\n') --end;
  } else {
    end = starts[last_line] - 1;  // drop the trailing newline
  }
  return std::string(src.substr(begin, end - begin));
}

int count_lines(std::string_view src) {
  if (src.empty()) return 0;
  int lines = 1;
  for (char c : src)
    if (c == '\n') ++lines;
  if (src.back() == '\n') --lines;
  return lines;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

bool is_c_keyword(std::string_view s) {
  static const std::set<std::string_view> kw = {
      "auto",     "break",    "case",     "char",   "const",    "continue",
      "default",  "do",       "double",   "else",   "enum",     "extern",
      "float",    "for",      "goto",     "if",     "inline",   "int",
      "long",     "register", "restrict", "return", "short",    "signed",
      "sizeof",   "static",   "struct",   "switch", "typedef",  "union",
      "unsigned", "void",     "volatile", "while",  "_Alignas", "_Alignof",
      "_Atomic",  "_Bool",    "_Generic", "_Noreturn", "_Static_assert",
      "_Thread_local"};
  return kw.count(s) > 0;
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = true;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_ws) out.push_back(' ');
      in_ws = true;
    } else {
      out.push_back(c);
      in_ws = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string utf8_lossy(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  auto cont = [&](std::size_t k) {
    return k < n && (static_cast<unsigned char>(bytes[k]) & 0xC0) == 0x80;
  };
  while (i < n) {
    unsigned char c = bytes[i];
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
    } else if ((c & 0xE0) == 0xC0 && cont(i + 1)) {
      out.append(bytes.substr(i, 2));
      i += 2;
    } else if ((c & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
      out.append(bytes.substr(i, 3));
      i += 3;
    } else if ((c & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
      out.append(bytes.substr(i, 4));
      i += 4;
    } else {
      out.append("\xEF\xBF\xBD");  // U+FFFD
      ++i;
    }
  }
  return out;
}

std::vector<Token> tokenize(std::string_view stripped) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = stripped.size();
  while (i < n) {
    char c = stripped[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && is_ident_char(stripped[j])) ++j;
      tokens.push_back({stripped.substr(i, j - i), i});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < n && (is_ident_char(stripped[j]) || stripped[j] == '.')) ++j;
      tokens.push_back({stripped.substr(i, j - i), i});
      i = j;
    } else {
      tokens.push_back({stripped.substr(i, 1), i});
      ++i;
    }
  }
  return tokens;
}

}  // namespace ctrans::text
