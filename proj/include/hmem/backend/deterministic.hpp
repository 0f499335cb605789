#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hmem/backend/backend.hpp"

namespace hmem {

// A single entity occurrence inside one sentence.
struct Mention {
  std::string name;
  std::string type;
  std::size_t begin = 0;  // byte offsets inside the sentence
  std::size_t end = 0;
};

struct Sentence {
  std::string speaker;  // empty when the line has no "NAME:" label
  std::string text;
  std::vector<Mention> mentions;  // ordered by position
};

// Offline backend built from fixed heuristics. All four operations are pure
// functions of (input, seed).
//
//  entities   capitalized-token runs, month/day/year phrases and digit-bearing
//             tokens (typed "time"), speaker labels and first-person pronouns
//             (typed "person"), and lowercase content words seen at least
//             twice (typed "topic").
//  triples    per sentence: first mention as subject, the words up to the next
//             mention as the relation, that mention as object; later mentions
//             chain onto the same subject.
//  summary    "Topics: <keys>. Latest: <first sentence>", keys refined by
//             merging with the prior keys.
//  embed      signed feature hashing of stemmed non-stopword unigrams and
//             bigrams; all words when every word is a stopword.
class DeterministicBackend final : public ExtractionBackend {
 public:
  static constexpr std::size_t kDefaultDim = 256;
  static constexpr std::size_t kMaxRelationWords = 8;
  static constexpr std::size_t kMaxNewKeys = 16;
  static constexpr std::size_t kMaxKeys = 32;

  explicit DeterministicBackend(std::uint64_t seed = 0, std::size_t dim = kDefaultDim,
                                std::size_t summary_max_chars = 512);

  SummaryResult summarize(std::string_view text, const std::optional<std::string>& prior_summary,
                          std::span<const std::string> prior_keys) override;
  std::vector<ExtractedEntity> extract_entities(std::string_view text) override;
  std::vector<ExtractedTriple> extract_triples(std::string_view text) override;
  Embedding embed(std::string_view text) override;

  std::size_t dimension() const noexcept override { return dim_; }
  std::string_view name() const noexcept override { return "deterministic"; }

  // Sentence segmentation with mentions resolved; exposed for tests.
  std::vector<Sentence> analyze(std::string_view text) const;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
  std::size_t summary_max_chars_;
};

// 64-bit FNV-1a over the seed's little-endian bytes followed by the feature.
std::uint64_t feature_hash(std::uint64_t seed, std::string_view feature) noexcept;

}  // namespace hmem
