#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hmem/backend/backend.hpp"
#include "hmem/core/graph.hpp"
#include "hmem/scoring/scoring.hpp"

namespace hmem {

struct Query {
  std::string text;
  std::optional<Timestamp> query_ts;  // wall clock unless a time hint applies
  std::optional<std::size_t> top_k;
  std::optional<std::set<std::string>> session_filter;
  std::optional<std::size_t> budget_tokens;
};

// A parsed "June 2023" / "2021" / "June 5, 2023" period.
struct TimeHint {
  std::string text;
  Timestamp begin = 0;
  Timestamp end = 0;  // inclusive, last second of the period

  friend bool operator==(const TimeHint&, const TimeHint&) = default;
};

std::optional<TimeHint> parse_time_hint(std::string_view phrase);

struct QueryAnalysis {
  std::vector<ExtractedEntity> entities;
  std::set<std::string> keys;  // canonical anchors; keyword fallback when no entities
  std::vector<TimeHint> hints;
  Embedding embedding;
  Timestamp query_ts = 0;
  bool keyword_fallback = false;
  bool degraded = false;  // a backend call failed and a fallback was used
};

struct SessionRanking {
  std::vector<SessionScore> all;  // every eligible session, ranked
  std::size_t entry_count = 0;    // prefix of `all` used as entry points

  std::vector<SessionScore> entries() const {
    return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(entry_count)};
  }
};

struct GatheredCandidate {
  const Triple* triple = nullptr;
  double session_score = 0.0;
  double triple_score = 0.0;
  std::int64_t delta_tau = 0;
};

using TokenCounter = std::function<std::size_t(std::string_view)>;

struct StructuredContext {
  static constexpr int kFormatVersion = 1;

  std::string text;
  std::size_t token_estimate = 0;
  std::vector<std::string> session_ids;     // SESSION SUMMARIES, in order
  std::vector<std::string> fact_ids;        // FACTS, in rank order
  std::vector<std::string> chunk_ids;       // SOURCE DIALOGUE, chronological
  std::vector<std::string> dropped_chunks;  // removed by the token budget
  bool truncated() const noexcept { return !dropped_chunks.empty(); }
};

struct StageTimings {
  double process_query_ms = 0;
  double select_sessions_ms = 0;
  double gather_ms = 0;
  double rerank_ms = 0;
  double assemble_ms = 0;
  double total_ms = 0;
};

struct RetrievalResult {
  std::vector<ScoredCandidate> ranked;
  std::vector<SessionScore> sessions_used;
  StructuredContext context;
  StageTimings timings;
  TemporalContext temporal;
  QueryAnalysis analysis;
  std::size_t candidate_count = 0;
  std::uint64_t graph_version = 0;
};

struct RetrievalConfig {
  ScoringParams scoring;
  std::size_t entry_limit = 5;
  std::optional<std::size_t> budget_tokens;
  // Score every triple when anchoring finds nothing. Off by default.
  bool chunk_fallback = false;
  TokenCounter token_counter;  // empty: text::estimate_tokens
};

class Retriever {
 public:
  Retriever(ExtractionBackend& backend, RetrievalConfig config);

  const RetrievalConfig& config() const noexcept { return config_; }

  QueryAnalysis process_query(const Query& q) const;

  SessionRanking select_sessions(const QueryAnalysis& analysis, const GraphState& graph,
                                 const std::optional<std::set<std::string>>& filter,
                                 std::size_t limit) const;

  // Anchored neighbors plus every triple linked to an entry session.
  std::vector<GatheredCandidate> gather_candidates(
      const QueryAnalysis& analysis, const SessionRanking& sessions, const GraphState& graph,
      const std::optional<std::set<std::string>>& filter) const;

  std::vector<ScoredCandidate> rerank(const std::vector<GatheredCandidate>& candidates,
                                      const ScoringParams& params, Timestamp query_ts,
                                      TemporalContext* temporal = nullptr) const;

  StructuredContext assemble_context(const std::vector<ScoredCandidate>& ranked,
                                     const GraphState& graph,
                                     std::optional<std::size_t> budget_tokens) const;

  // All stages against one snapshot.
  RetrievalResult retrieve(const Query& q, const GraphSnapshot& snapshot) const;

 private:
  std::size_t count_tokens(std::string_view s) const;

  ExtractionBackend& backend_;
  RetrievalConfig config_;
};

}  // namespace hmem
