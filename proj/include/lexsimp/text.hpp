#pragma once

// UTF-8 helpers shared by every module. Strings are UTF-8 std::string
// throughout; invalid sequences decode to U+FFFD.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lexsimp::text {

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

/// Number of Unicode scalar values.
std::size_t char_count(std::string_view s);

/// Simple case folding for Latin, Greek and Cyrillic scripts.
char32_t fold_case(char32_t c);
std::string casefold(std::string_view s);

bool is_space(char32_t c);
bool is_letter(char32_t c);
bool is_punct(char32_t c);

std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool contains_whitespace(std::string_view s);

}  // namespace lexsimp::text

namespace lexsimp {

/// Matching key for substitutes: casefold, trim, collapse internal
/// whitespace, strip leading/trailing punctuation. Used by gold dedup,
/// candidate filtering and every metric.
std::string normalize_term(std::string_view s);

}  // namespace lexsimp
