#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctrans::text {

// Replaces C comments and string/char literal contents with spaces while
// preserving length, newlines, and the quote characters themselves. The
// result lines up offset-for-offset with the input.
std::string strip_c(std::string_view src);

// Rust flavor: nested block comments, raw strings (r"", r#""#), byte strings,
// char literals vs lifetimes. `keep_strings` leaves string literal contents
// in place (used for line counting, where a literal-only line is still code).
std::string strip_rust(std::string_view src, bool keep_strings = false);

// Byte offsets of the first character of each line (line 1 at index 0).
std::vector<std::size_t> line_starts(std::string_view src);

// 1-based line number of `offset` given the line_starts table.
int line_of(const std::vector<std::size_t>& starts, std::size_t offset);

// Exact substring covering 1-based inclusive [first_line, last_line], without
// the trailing newline of last_line.
std::string slice_lines(std::string_view src, int first_line, int last_line);

int count_lines(std::string_view src);

bool is_ident_start(char c);
bool is_ident_char(char c);
bool is_identifier(std::string_view s);
bool is_c_keyword(std::string_view s);

// Collapses whitespace runs to single spaces and trims the ends.
std::string collapse_ws(std::string_view s);

// Decodes bytes as UTF-8, replacing invalid sequences with U+FFFD.
std::string utf8_lossy(std::string_view bytes);

struct Token {
  std::string_view text;
  std::size_t offset;
};

// Splits already-stripped source into identifier/number/punctuation tokens.
std::vector<Token> tokenize(std::string_view stripped);

}  // namespace ctrans::text
