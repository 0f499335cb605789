#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hmem/core/embedding.hpp"
#include "hmem/core/types.hpp"
#include "hmem/time.hpp"

namespace hmem {

// Relevance knobs. The Weibull shape must lie strictly inside (0, 1).
class ScoringParams {
 public:
  static constexpr double kDefaultShape = 0.5;
  static constexpr std::size_t kDefaultTopK = 15;
  static constexpr double kDefaultSessionKeyWeight = 0.5;

  ScoringParams() = default;
  // Throws InvalidArgument on out-of-range values.
  ScoringParams(double shape, std::size_t top_k, double session_key_weight,
                bool temporal_decay = true);

  double shape() const noexcept { return shape_; }
  std::size_t top_k() const noexcept { return top_k_; }
  double session_key_weight() const noexcept { return session_key_weight_; }

  // When false the temporal weight is pinned to 1 and ranking is purely
  // semantic. Exists for ablation runs.
  bool temporal_decay() const noexcept { return temporal_decay_; }

  ScoringParams with_top_k(std::size_t top_k) const;
  ScoringParams with_temporal_decay(bool enabled) const;

 private:
  double shape_ = kDefaultShape;
  std::size_t top_k_ = kDefaultTopK;
  double session_key_weight_ = kDefaultSessionKeyWeight;
  bool temporal_decay_ = true;
};

struct TemporalContext {
  Timestamp query_ts = 0;
  double tau_hat = 1.0;  // seconds, > 0
};

// Harmonic mean of two similarities in [0, 1]; 0 when both are 0.
double semantic_fusion(double session_score, double triple_score);

// exp(-(delta_tau / tau_hat)^shape).
double temporal_weight(double delta_tau, double tau_hat, double shape);

// Median with the even-length mean rule, clamped to >= 1 second.
double median_gap(std::span<const double> gaps);
double median_gap(std::span<const std::int64_t> gaps);

// max(0, query_ts - ts); future-dated facts count as fresh.
inline std::int64_t time_gap(Timestamp query_ts, Timestamp ts) noexcept {
  return query_ts > ts ? query_ts - ts : 0;
}

struct Relevance {
  double semantic = 0.0;  // S_sem
  double weight = 1.0;    // w(delta_tau)
  double score = 0.0;     // R = S_sem * w
};

Relevance relevance(double session_score, double triple_score, double delta_tau,
                    const TemporalContext& ctx, const ScoringParams& params);

// A triple with every scoring component exposed for auditing.
struct ScoredCandidate {
  std::string triple_id;
  Timestamp ts = 0;
  double session_score = 0.0;  // S_s
  double triple_score = 0.0;   // S_t
  double semantic = 0.0;       // S_sem
  std::int64_t delta_tau = 0;
  double weight = 1.0;         // w
  double relevance = 0.0;      // R

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

struct SessionScore {
  std::string session_id;
  double score = 0.0;
  Timestamp last_ts = 0;

  friend bool operator==(const SessionScore&, const SessionScore&) = default;
};

// |query_keys ∩ keys| / max(1, |query_keys|)
double key_overlap(const std::set<std::string>& query_keys, const std::set<std::string>& keys);

// alpha * overlap + (1 - alpha) * (cos + 1) / 2; a session with no summary
// embedding contributes a cosine of 0.
double session_score(const std::set<std::string>& query_keys, const Embedding& query_embedding,
                     const SessionNode& session, double alpha);

// Descending S_s; ties by last_ts descending, then session_id ascending.
std::vector<SessionScore> rank_sessions(const std::set<std::string>& query_keys,
                                        const Embedding& query_embedding,
                                        std::span<const SessionNode* const> sessions,
                                        double alpha);

// Strict weak order used by rank_candidates: R desc, ts desc, triple_id asc.
bool candidate_before(const ScoredCandidate& a, const ScoredCandidate& b) noexcept;

std::vector<ScoredCandidate> rank_candidates(std::vector<ScoredCandidate> candidates,
                                             std::size_t top_k);

}  // namespace hmem
