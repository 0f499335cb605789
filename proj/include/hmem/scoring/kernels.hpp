#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "hmem/core/embedding.hpp"
#include "hmem/scoring/scoring.hpp"

// Batch kernels behind retrieval and deduplication. Every kernel has an
// OpenMP version and a serial reference; per-element work is identical, so the
// two produce bitwise-equal output and the serial one serves as the test oracle.
namespace hmem::kernels {

struct CandidateInput {
  double session_score = 0.0;
  double triple_score = 0.0;
  std::int64_t delta_tau = 0;
};

// Below this many elements the parallel variants run inline.
inline constexpr std::size_t kParallelThreshold = 512;

namespace serial {

// out[i] = cosine(query, rows[i]), clamped to [-1, 1].
void cosine_batch(const Embedding& query, std::span<const Embedding* const> rows,
                  std::span<double> out);

void score_batch(std::span<const CandidateInput> in, const TemporalContext& ctx,
                 const ScoringParams& params, std::span<Relevance> out);

}  // namespace serial

namespace parallel {

void cosine_batch(const Embedding& query, std::span<const Embedding* const> rows,
                  std::span<double> out);

void score_batch(std::span<const CandidateInput> in, const TemporalContext& ctx,
                 const ScoringParams& params, std::span<Relevance> out);

}  // namespace parallel

// Largest team OpenMP would use; 1 when built without it.
int max_threads() noexcept;

}  // namespace hmem::kernels
