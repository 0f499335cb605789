#include "hmem/scoring/kernels.hpp"

#include <string>

#include "formulas.hpp"
#include "hmem/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hmem::kernels {

namespace {

void check_rows(const Embedding& query, std::span<const Embedding* const> rows,
                std::span<double> out) {
  if (out.size() != rows.size()) throw InvalidArgument("cosine_batch: output size mismatch");
  if (query.empty()) return;
  for (const Embedding* row : rows) {
    if (!row->empty() && row->dim() != query.dim()) {
      throw InvalidArgument("cosine_batch: dimension mismatch " + std::to_string(row->dim()) +
                            " vs " + std::to_string(query.dim()));
    }
  }
}

inline double cosine_one(const Embedding& query, const Embedding& row) noexcept {
  if (query.empty() || row.empty()) return 0.0;
  double c = dot(query.values(), row.values());
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

inline Relevance score_one(const CandidateInput& in, double tau_hat, double shape,
                           bool decay) noexcept {
  Relevance r;
  r.semantic = detail::harmonic(in.session_score, in.triple_score);
  r.weight = decay ? detail::weibull(static_cast<double>(in.delta_tau), tau_hat, shape) : 1.0;
  r.score = r.semantic * r.weight;
  return r;
}

void check_scores(std::span<const CandidateInput> in, const TemporalContext& ctx,
                  std::span<Relevance> out) {
  if (out.size() != in.size()) throw InvalidArgument("score_batch: output size mismatch");
  if (!(ctx.tau_hat > 0.0)) throw InvalidArgument("tau_hat must be > 0");
  for (const CandidateInput& c : in) {
    if (!(c.session_score >= 0.0 && c.session_score <= 1.0) ||
        !(c.triple_score >= 0.0 && c.triple_score <= 1.0)) {
      throw InvalidArgument("score_batch: similarity outside [0, 1]");
    }
    if (c.delta_tau < 0) throw InvalidArgument("score_batch: negative delta_tau");
  }
}

}  // namespace

namespace serial {

void cosine_batch(const Embedding& query, std::span<const Embedding* const> rows,
                  std::span<double> out) {
  check_rows(query, rows, out);
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = cosine_one(query, *rows[i]);
}

void score_batch(std::span<const CandidateInput> in, const TemporalContext& ctx,
                 const ScoringParams& params, std::span<Relevance> out) {
  check_scores(in, ctx, out);
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = score_one(in[i], ctx.tau_hat, params.shape(), params.temporal_decay());
  }
}

}  // namespace serial

namespace parallel {

void cosine_batch(const Embedding& query, std::span<const Embedding* const> rows,
                  std::span<double> out) {
  check_rows(query, rows, out);
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static) if (rows.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = cosine_one(query, *rows[i]);
}

void score_batch(std::span<const CandidateInput> in, const TemporalContext& ctx,
                 const ScoringParams& params, std::span<Relevance> out) {
  check_scores(in, ctx, out);
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  const double tau_hat = ctx.tau_hat;
  const double shape = params.shape();
  const bool decay = params.temporal_decay();
#pragma omp parallel for schedule(static) if (in.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = score_one(in[i], tau_hat, shape, decay);
}

}  // namespace parallel

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hmem::kernels
