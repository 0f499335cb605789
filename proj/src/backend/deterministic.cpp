#include "hmem/backend/deterministic.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "hmem/error.hpp"
#include "hmem/text.hpp"

namespace hmem {

namespace {

constexpr std::array<std::string_view, 24> kMonths = {
    "january", "february", "march", "april", "may", "june", "july", "august",
    "september", "october", "november", "december", "jan", "feb", "mar", "apr",
    "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec"};
constexpr std::array<std::string_view, 7> kWeekdays = {
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
constexpr std::array<std::string_view, 12> kOrgSuffixes = {
    "inc", "corp", "corporation", "ltd", "llc", "company", "university", "college",
    "club", "team", "group", "institute"};
constexpr std::array<std::string_view, 4> kLocatives = {"in", "at", "from", "near"};
constexpr std::array<std::string_view, 12> kMotionVerbs = {
    "moved", "move", "moving", "went", "go", "going", "travelled", "traveled",
    "flew", "relocated", "relocating", "drove"};
constexpr std::array<std::string_view, 3> kArticles = {"a", "an", "the"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& a, std::string_view w) {
  return std::find(a.begin(), a.end(), w) != a.end();
}

bool is_month(std::string_view lower) { return contains(kMonths, lower); }
bool is_weekday(std::string_view lower) { return contains(kWeekdays, lower); }

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool has_digit(std::string_view s) { return std::any_of(s.begin(), s.end(), is_digit); }

bool is_alpha_word(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '\'' || c == '-';
  });
}

// 1-31 with an optional ordinal suffix.
bool is_day_number(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && is_digit(s[n])) ++n;
  if (n == 0 || n > 2) return false;
  std::string rest = text::to_lower(s.substr(n));
  if (!rest.empty() && rest != "st" && rest != "nd" && rest != "rd" && rest != "th") return false;
  int v = std::stoi(std::string(s.substr(0, n)));
  return v >= 1 && v <= 31;
}

bool is_year(std::string_view s) {
  return s.size() == 4 && std::all_of(s.begin(), s.end(), is_digit);
}

bool only_spaces_or_comma(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == ','; });
}

bool only_spaces(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

bool is_first_person(std::string_view tok) {
  return tok == "I" || tok == "I'm" || tok == "I've" || tok == "I'd" || tok == "I'll" ||
         tok == "me" || tok == "Me";
}

// "Carol: hello" -> {"Carol", "hello"}
std::pair<std::string, std::string_view> split_speaker(std::string_view line) {
  std::size_t colon = line.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon > 48) return {"", line};
  std::string_view label = text::trim(line.substr(0, colon));
  if (label.empty() || !is_upper(label[0])) return {"", line};
  for (char c : label) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || is_digit(c) || c == ' ' ||
              c == '-' || c == '_' || c == '.' || c == '\'';
    if (!ok) return {"", line};
  }
  std::string_view rest = line.substr(colon + 1);
  if (!rest.empty() && rest[0] != ' ' && rest[0] != '\t') return {"", line};
  return {std::string(label), text::trim(rest)};
}

std::vector<std::string_view> split_sentences(std::string_view body) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == body.size() || body[i + 1] == ' ' || body[i + 1] == '\t')) {
      std::string_view s = text::trim(body.substr(b, i + 1 - b));
      if (!s.empty()) out.push_back(s);
      b = i + 1;
    }
  }
  std::string_view tail = text::trim(body.substr(std::min(b, body.size())));
  if (!tail.empty()) out.push_back(tail);
  return out;
}

struct TextStats {
  std::set<std::string> speakers;                 // canonical
  std::unordered_map<std::string, int> word_count;  // lowercase words
};

TextStats collect_stats(std::string_view text) {
  TextStats st;
  for (std::string_view line : text::split_lines(text)) {
    auto [speaker, body] = split_speaker(text::trim(line));
    if (!speaker.empty()) st.speakers.insert(text::canonicalize(speaker));
    for (std::string& w : text::words(body)) ++st.word_count[w];
  }
  return st;
}

std::vector<Mention> find_mentions(std::string_view sentence, const std::string& speaker,
                                   const TextStats& st) {
  std::vector<Mention> out;
  std::vector<text::Token> toks = text::tokenize(sentence);
  auto lower_at = [&](std::size_t i) { return text::to_lower(toks[i].text); };
  auto gap = [&](std::size_t i) {  // text between token i-1 and token i
    return sentence.substr(toks[i - 1].end, toks[i].begin - toks[i - 1].end);
  };
  auto emit = [&](std::size_t first, std::size_t last, std::string type) {
    Mention m;
    m.begin = toks[first].begin;
    m.end = toks[last].end;
    m.name = std::string(sentence.substr(m.begin, m.end - m.begin));
    m.type = std::move(type);
    out.push_back(std::move(m));
  };

  std::size_t i = 0;
  while (i < toks.size()) {
    std::string_view tok = toks[i].text;
    std::string lower = lower_at(i);

    if (is_upper(tok[0]) && is_month(lower)) {
      std::size_t j = i;
      if (j + 1 < toks.size() && only_spaces(gap(j + 1)) && is_day_number(toks[j + 1].text)) ++j;
      if (j + 1 < toks.size() && only_spaces_or_comma(gap(j + 1)) && is_year(toks[j + 1].text)) ++j;
      emit(i, j, "time");
      i = j + 1;
      continue;
    }
    if (is_upper(tok[0]) && is_weekday(lower)) {
      emit(i, i, "time");
      ++i;
      continue;
    }
    if (has_digit(tok)) {
      emit(i, i, "time");
      ++i;
      continue;
    }
    if (!speaker.empty() && is_first_person(tok)) {
      Mention m;
      m.begin = toks[i].begin;
      m.end = toks[i].end;
      m.name = speaker;
      m.type = "person";
      out.push_back(std::move(m));
      ++i;
      continue;
    }
    if (is_upper(tok[0]) && !text::is_stopword(lower)) {
      std::size_t j = i;
      while (j + 1 < toks.size() && only_spaces(gap(j + 1))) {
        std::string_view next = toks[j + 1].text;
        std::string next_lower = text::to_lower(next);
        if (!is_upper(next[0]) || text::is_stopword(next_lower) || is_month(next_lower) ||
            is_weekday(next_lower) || has_digit(next)) {
          break;
        }
        ++j;
      }
      std::string canonical = text::canonicalize(sentence.substr(toks[i].begin, toks[j].end - toks[i].begin));
      std::string type = "other";
      std::string last = lower_at(j);
      std::string prev = i > 0 ? lower_at(i - 1) : "";
      std::string prev2 = i > 1 ? lower_at(i - 2) : "";
      if (st.speakers.count(canonical)) {
        type = "person";
      } else if (contains(kOrgSuffixes, last)) {
        type = "organization";
      } else if (contains(kLocatives, prev) || (prev == "to" && contains(kMotionVerbs, prev2))) {
        type = "place";
      }
      emit(i, j, std::move(type));
      i = j + 1;
      continue;
    }
    if (!is_upper(tok[0]) && lower.size() >= 4 && is_alpha_word(tok) &&
        !text::is_stopword(lower)) {
      auto it = st.word_count.find(lower);
      if (it != st.word_count.end() && it->second >= 2) {
        emit(i, i, "topic");
        ++i;
        continue;
      }
    }
    ++i;
  }
  return out;
}

std::string clip_words(std::string_view s, std::size_t max_chars) {
  if (s.size() <= max_chars) return std::string(s);
  std::string_view cut = s.substr(0, max_chars);
  std::size_t sp = cut.rfind(' ');
  if (sp != std::string_view::npos && sp > 0) cut = cut.substr(0, sp);
  return std::string(text::trim(cut));
}

void require_text(std::string_view text) {
  if (text::trim(text).empty()) throw InvalidArgument("extraction input text is empty");
}

}  // namespace

std::uint64_t feature_hash(std::uint64_t seed, std::string_view feature) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (int i = 0; i < 8; ++i) {
    h ^= (seed >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
  for (char c : feature) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

DeterministicBackend::DeterministicBackend(std::uint64_t seed, std::size_t dim,
                                           std::size_t summary_max_chars)
    : seed_(seed), dim_(dim), summary_max_chars_(summary_max_chars) {
  if (dim_ == 0) throw InvalidArgument("embedding dimension must be > 0");
  if (summary_max_chars_ < 16) throw InvalidArgument("summary_max_chars must be >= 16");
}

std::vector<Sentence> DeterministicBackend::analyze(std::string_view text) const {
  TextStats st = collect_stats(text);
  std::vector<Sentence> out;
  for (std::string_view raw : text::split_lines(text)) {
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    auto [speaker, body] = split_speaker(line);
    for (std::string_view s : split_sentences(body)) {
      Sentence sent;
      sent.speaker = speaker;
      sent.text = std::string(s);
      sent.mentions = find_mentions(sent.text, speaker, st);
      out.push_back(std::move(sent));
    }
    if (!speaker.empty() && split_sentences(body).empty()) {
      out.push_back(Sentence{speaker, "", {}});
    }
  }
  return out;
}

std::vector<ExtractedEntity> DeterministicBackend::extract_entities(std::string_view text) {
  require_text(text);
  std::vector<ExtractedEntity> out;
  std::unordered_set<std::string> seen;
  auto add = [&](const std::string& name, const std::string& type) {
    std::string c = text::canonicalize(name);
    if (c.empty() || !seen.insert(c).second) return;
    out.push_back({std::string(text::trim(name)), type});
  };
  std::string last_speaker;
  for (const Sentence& s : analyze(text)) {
    if (!s.speaker.empty() && s.speaker != last_speaker) add(s.speaker, "person");
    last_speaker = s.speaker;
    for (const Mention& m : s.mentions) add(m.name, m.type);
  }
  return out;
}

std::vector<ExtractedTriple> DeterministicBackend::extract_triples(std::string_view text) {
  require_text(text);
  std::vector<ExtractedTriple> out;
  for (const Sentence& s : analyze(text)) {
    const auto& ms = s.mentions;
    if (ms.size() < 2) continue;
    std::vector<text::Token> toks = text::tokenize(s.text);
    auto relation_between = [&](const Mention& a, const Mention& b) -> std::string {
      std::vector<std::string> words;
      for (const text::Token& t : toks) {
        if (t.begin < a.end || t.end > b.begin) continue;
        std::string w = text::to_lower(t.text);
        if (contains(kArticles, w)) continue;
        words.push_back(std::move(w));
      }
      if (words.empty() || words.size() > kMaxRelationWords) return {};
      return text::join(words, " ");
    };
    const Mention& subject = ms[0];
    for (std::size_t j = 1; j < ms.size(); ++j) {
      std::string rel = relation_between(ms[j - 1], ms[j]);
      if (rel.empty()) continue;
      out.push_back({subject.name, rel, ms[j].name, subject.type, ms[j].type});
    }
  }
  return out;
}

SummaryResult DeterministicBackend::summarize(std::string_view text,
                                              const std::optional<std::string>& prior_summary,
                                              std::span<const std::string> prior_keys) {
  (void)prior_summary;  // refinement is carried by the keys
  require_text(text);

  std::vector<std::string> fresh;
  std::unordered_set<std::string> seen;
  auto push = [&](std::vector<std::string>& dst, const std::string& k) {
    std::string c = text::canonicalize(k);
    if (!c.empty() && seen.insert(c).second) dst.push_back(std::move(c));
  };
  for (const ExtractedEntity& e : extract_entities(text)) push(fresh, e.name);

  // Frequency-ranked content words, ties by first position.
  std::vector<std::string> ws = text::words(text);
  std::map<std::string, std::pair<int, std::size_t>> freq;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const std::string& w = ws[i];
    if (w.size() < 4 || text::is_stopword(w) || !is_alpha_word(w)) continue;
    auto [it, inserted] = freq.try_emplace(w, 0, i);
    ++it->second.first;
  }
  std::vector<std::pair<std::string, std::pair<int, std::size_t>>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) return a.second.first > b.second.first;
    return a.second.second < b.second.second;
  });
  for (std::size_t i = 0; i < ranked.size() && i < 8; ++i) push(fresh, ranked[i].first);
  if (fresh.size() > kMaxNewKeys) fresh.resize(kMaxNewKeys);

  if (fresh.empty()) {
    for (const std::string& w : text::content_words(text)) {
      if (fresh.size() == 8) break;
      push(fresh, w);
    }
  }
  if (fresh.empty()) {
    for (const std::string& w : text::words(text)) {
      if (fresh.size() == 8) break;
      push(fresh, w);
    }
  }
  if (fresh.empty()) throw ExtractionError("no keywords could be extracted");

  // Retained prior keys first, then the new ones, then the rest of the prior.
  std::set<std::string> fresh_set(fresh.begin(), fresh.end());
  std::vector<std::string> keys;
  std::unordered_set<std::string> taken;
  auto take = [&](const std::string& k) {
    std::string c = text::canonicalize(k);
    if (!c.empty() && keys.size() < kMaxKeys && taken.insert(c).second) keys.push_back(std::move(c));
  };
  for (const std::string& k : prior_keys) {
    if (fresh_set.count(text::canonicalize(k))) take(k);
  }
  for (const std::string& k : fresh) take(k);
  for (const std::string& k : prior_keys) take(k);

  std::string first_sentence;
  for (std::string_view line : text::split_lines(text)) {
    line = text::trim(line);
    if (line.empty()) continue;
    auto [speaker, body] = split_speaker(line);
    auto sentences = split_sentences(body);
    first_sentence = speaker.empty() ? std::string() : speaker + ": ";
    first_sentence += sentences.empty() ? std::string(body) : std::string(sentences.front());
    break;
  }

  std::vector<std::string> shown(keys.begin(), keys.begin() + std::min<std::size_t>(keys.size(), 10));
  std::string summary = "Topics: " + text::join(shown, ", ") + ". Latest: " + first_sentence;
  return {clip_words(summary, summary_max_chars_), std::move(keys)};
}

Embedding DeterministicBackend::embed(std::string_view text) {
  require_text(text);
  std::vector<float> v(dim_, 0.0f);
  auto add = [&](std::string_view feature) {
    std::uint64_t h = feature_hash(seed_, feature);
    std::size_t idx = static_cast<std::size_t>(h % dim_);
    v[idx] += (h >> 63) ? -1.0f : 1.0f;
  };
  std::vector<std::string> ws;
  for (const std::string& w : text::words(text)) {
    if (!text::is_stopword(w)) ws.push_back(text::light_stem(w));
  }
  if (ws.empty()) {
    for (const std::string& w : text::words(text)) ws.push_back(text::light_stem(w));
  }
  for (std::size_t i = 0; i < ws.size(); ++i) {
    add(ws[i]);
    if (i + 1 < ws.size()) add(ws[i] + " " + ws[i + 1]);
  }
  if (std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; })) {
    add(text::canonicalize(text));
  }
  return Embedding::normalize(std::move(v));
}

}  // namespace hmem
