#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// ASCII-level text helpers shared by the graph store, the deterministic
// backend and the retrieval path. Bytes >= 0x80 pass through unchanged.
namespace hmem::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// Lowercase, trim, collapse inner whitespace runs to one space.
std::string canonicalize(std::string_view s);

// Maximal runs of word bytes (alnum, apostrophe, hyphen, UTF-8 continuation).
struct Token {
  std::string_view text;
  std::size_t begin = 0;
  std::size_t end = 0;
};
std::vector<Token> tokenize(std::string_view s);

// Lowercased alnum word runs, used for hashing and keyword fallback.
std::vector<std::string> words(std::string_view s);

bool is_stopword(std::string_view lowercase_word);

// Non-stopword lowercased words, first occurrence order, deduplicated.
std::vector<std::string> content_words(std::string_view s);

// Crude suffix stripping ("-ing", "-ed", "-es", "-s", then a final "e") so
// that inflections of one word share a feature. Input must be lowercase.
std::string light_stem(std::string_view lowercase_word);

std::vector<std::string_view> split_lines(std::string_view s);

// Whitespace-separated token count.
std::size_t whitespace_tokens(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace hmem::text

namespace hmem::text {

// Default token estimate: ceil(1.3 * whitespace token count), in integers.
inline std::size_t estimate_tokens(std::string_view s) {
  return (whitespace_tokens(s) * 13 + 9) / 10;
}

}  // namespace hmem::text
