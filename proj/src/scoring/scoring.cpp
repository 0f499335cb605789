#include "hmem/scoring/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "formulas.hpp"
#include "hmem/error.hpp"

namespace hmem {

namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InvalidArgument(std::string(name) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

void check_shape(double shape) {
  if (!(shape > 0.0 && shape < 1.0)) {
    throw InvalidArgument("Weibull shape k must lie in (0, 1), got " + std::to_string(shape));
  }
}

}  // namespace

ScoringParams::ScoringParams(double shape, std::size_t top_k, double session_key_weight,
                             bool temporal_decay)
    : shape_(shape),
      top_k_(top_k),
      session_key_weight_(session_key_weight),
      temporal_decay_(temporal_decay) {
  check_shape(shape);
  if (top_k < 1) throw InvalidArgument("top_k must be >= 1");
  check_unit_interval(session_key_weight, "session key weight alpha");
}

ScoringParams ScoringParams::with_top_k(std::size_t top_k) const {
  return ScoringParams(shape_, top_k, session_key_weight_, temporal_decay_);
}

ScoringParams ScoringParams::with_temporal_decay(bool enabled) const {
  return ScoringParams(shape_, top_k_, session_key_weight_, enabled);
}

double semantic_fusion(double session_score, double triple_score) {
  check_unit_interval(session_score, "S_s");
  check_unit_interval(triple_score, "S_t");
  return detail::harmonic(session_score, triple_score);
}

double temporal_weight(double delta_tau, double tau_hat, double shape) {
  check_shape(shape);
  if (!(tau_hat > 0.0)) throw InvalidArgument("tau_hat must be > 0");
  if (!(delta_tau >= 0.0)) throw InvalidArgument("delta_tau must be >= 0");
  return detail::weibull(delta_tau, tau_hat, shape);
}

double median_gap(std::span<const double> gaps) {
  if (gaps.empty()) throw InvalidArgument("median_gap of an empty list");
  std::vector<double> v(gaps.begin(), gaps.end());
  for (double g : v) {
    if (!(g >= 0.0)) throw InvalidArgument("time gaps must be >= 0");
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  double m = n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  return std::max(m, 1.0);
}

double median_gap(std::span<const std::int64_t> gaps) {
  std::vector<double> v(gaps.begin(), gaps.end());
  return median_gap(std::span<const double>(v));
}

Relevance relevance(double session_score, double triple_score, double delta_tau,
                    const TemporalContext& ctx, const ScoringParams& params) {
  Relevance r;
  r.semantic = semantic_fusion(session_score, triple_score);
  r.weight = params.temporal_decay() ? temporal_weight(delta_tau, ctx.tau_hat, params.shape()) : 1.0;
  r.score = r.semantic * r.weight;
  return r;
}

double key_overlap(const std::set<std::string>& query_keys, const std::set<std::string>& keys) {
  std::size_t hits = 0;
  for (const std::string& k : query_keys) hits += keys.count(k);
  return static_cast<double>(hits) / static_cast<double>(std::max<std::size_t>(1, query_keys.size()));
}

double session_score(const std::set<std::string>& query_keys, const Embedding& query_embedding,
                     const SessionNode& session, double alpha) {
  check_unit_interval(alpha, "alpha");
  double c = 0.0;
  if (!query_embedding.empty() && !session.summary_embedding.empty()) {
    c = cosine(query_embedding, session.summary_embedding);
  }
  double s = alpha * key_overlap(query_keys, session.keys) + (1.0 - alpha) * cosine_to_unit(c);
  return std::clamp(s, 0.0, 1.0);
}

std::vector<SessionScore> rank_sessions(const std::set<std::string>& query_keys,
                                        const Embedding& query_embedding,
                                        std::span<const SessionNode* const> sessions,
                                        double alpha) {
  std::vector<SessionScore> out;
  out.reserve(sessions.size());
  for (const SessionNode* s : sessions) {
    out.push_back({s->session_id, session_score(query_keys, query_embedding, *s, alpha), s->last_ts});
  }
  std::sort(out.begin(), out.end(), [](const SessionScore& a, const SessionScore& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.last_ts != b.last_ts) return a.last_ts > b.last_ts;
    return a.session_id < b.session_id;
  });
  return out;
}

bool candidate_before(const ScoredCandidate& a, const ScoredCandidate& b) noexcept {
  if (a.relevance != b.relevance) return a.relevance > b.relevance;
  if (a.ts != b.ts) return a.ts > b.ts;
  return a.triple_id < b.triple_id;
}

std::vector<ScoredCandidate> rank_candidates(std::vector<ScoredCandidate> candidates,
                                             std::size_t top_k) {
  std::sort(candidates.begin(), candidates.end(), candidate_before);
  if (candidates.size() > top_k) candidates.resize(top_k);
  return candidates;
}

}  // namespace hmem
