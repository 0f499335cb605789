#include "hmem/text.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

namespace hmem::text {

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '\'' || c == '-' || c >= 0x80;
}

bool is_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> kWords = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and",
      "any", "are", "aren't", "as", "at", "be", "because", "been", "before", "being", "below",
      "between", "both", "but", "by", "can", "can't", "could", "did", "didn't", "do", "does",
      "doesn't", "doing", "don't", "down", "during", "each", "even", "ever", "few", "for",
      "from", "further", "get", "got", "had", "has", "have", "having", "he", "he's", "her",
      "here", "hers", "herself", "hey", "hi", "him", "himself", "his", "how", "i", "i'd",
      "i'll", "i'm", "i've", "if", "in", "into", "is", "isn't", "it", "it's", "its", "itself",
      "just", "let's", "like", "me", "more", "most", "much", "my", "myself", "no", "nor",
      "not", "now", "of", "off", "oh", "ok", "okay", "on", "once", "only", "or", "other",
      "our", "ours", "ourselves", "out", "over", "own", "really", "same", "she", "she's",
      "should", "so", "some", "such", "than", "that", "that's", "the", "their", "theirs",
      "them", "themselves", "then", "there", "there's", "these", "they", "they're", "this",
      "those", "through", "to", "too", "under", "until", "up", "very", "was", "wasn't", "we",
      "we're", "were", "weren't", "what", "what's", "when", "where", "which", "while", "who",
      "whom", "why", "will", "with", "won't", "would", "yeah", "yes", "you", "you're",
      "you've", "your", "yours", "yourself", "yourselves", "thanks", "thank", "well", "wow",
      "tell", "know", "think", "said", "say", "says", "one", "many", "lot", "way", "thing",
      "things", "been", "being", "going", "want", "sure", "great", "good", "nice", "recently",
      "recent", "last", "first", "time", "times", "day", "days", "anything", "something",
      "everything", "still", "yet"};
  return kWords;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string canonicalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char ch : trim(s)) {
    auto c = static_cast<unsigned char>(ch);
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
  }
  return out;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_byte(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < s.size() && is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t e = i;
    // Strip edge apostrophes/hyphens ("'quoted'", "--").
    while (b < e && (s[b] == '\'' || s[b] == '-')) ++b;
    while (e > b && (s[e - 1] == '\'' || s[e - 1] == '-')) --e;
    if (b < e) out.push_back({s.substr(b, e - b), b, e});
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  for (const Token& t : tokenize(s)) {
    bool any_alnum = std::any_of(t.text.begin(), t.text.end(),
                                 [](char c) { return is_alnum(static_cast<unsigned char>(c)); });
    if (any_alnum) out.push_back(to_lower(t.text));
  }
  return out;
}

bool is_stopword(std::string_view w) { return stopwords().count(w) > 0; }

std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (std::string& w : words(s)) {
    if (is_stopword(w)) continue;
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      std::string_view line = s.substr(b, i - b);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      out.push_back(line);
      b = i + 1;
    }
  }
  return out;
}

std::size_t whitespace_tokens(std::string_view s) {
  std::size_t n = 0;
  bool in_token = false;
  for (char c : s) {
    if (is_space(static_cast<unsigned char>(c))) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++n;
    }
  }
  return n;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string light_stem(std::string_view w) {
  std::string s(w);
  auto strip = [&](std::string_view suffix, std::size_t min_rest) {
    if (s.size() >= suffix.size() + min_rest && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      s.resize(s.size() - suffix.size());
      return true;
    }
    return false;
  };
  if (!strip("ing", 3) && !strip("ed", 3) && !strip("es", 3)) {
    if (!(s.size() >= 2 && s.compare(s.size() - 2, 2, "ss") == 0)) strip("s", 3);
  }
  strip("e", 3);
  return s;
}

}  // namespace hmem::text
