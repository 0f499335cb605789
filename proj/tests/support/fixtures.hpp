#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hmem/backend/deterministic.hpp"
#include "hmem/core/graph.hpp"
#include "hmem/pipeline/update.hpp"
#include "hmem/retrieval/retriever.hpp"

namespace hmem::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Deterministic backend with per-operation overrides and outage switches.
class StubBackend final : public ExtractionBackend {
 public:
  explicit StubBackend(std::size_t dim = DeterministicBackend::kDefaultDim) : inner_(0, dim) {}

  SummaryResult summarize(std::string_view text, const std::optional<std::string>& prior,
                          std::span<const std::string> prior_keys) override;
  std::vector<ExtractedEntity> extract_entities(std::string_view text) override;
  std::vector<ExtractedTriple> extract_triples(std::string_view text) override;
  Embedding embed(std::string_view text) override;

  std::size_t dimension() const noexcept override { return inner_.dimension(); }
  std::string_view name() const noexcept override { return "stub"; }

  std::function<std::vector<ExtractedEntity>(std::string_view)> entities_fn;
  std::function<std::vector<ExtractedTriple>(std::string_view)> triples_fn;
  std::function<Embedding(std::string_view)> embed_fn;

  std::atomic<bool> fail_summarize{false};
  std::atomic<bool> fail_entities{false};
  std::atomic<bool> fail_triples{false};
  std::atomic<bool> fail_embed{false};
  std::atomic<int> calls{0};

 private:
  DeterministicBackend inner_;
};

IngestRequest make_chunk(std::string session_id, Timestamp ts,
                         std::vector<std::pair<std::string, std::string>> turns,
                         std::optional<std::string> key = std::nullopt);

// n chunks of two turns each, every one naming entities from fixed pools.
std::vector<IngestRequest> synthetic_session(const std::string& session_id, std::size_t n_chunks,
                                             std::uint64_t seed, Timestamp start);

std::vector<IngestRequest> synthetic_corpus(std::size_t sessions, std::size_t chunks_per_session,
                                            std::uint64_t seed, Timestamp start);

Embedding random_embedding(std::mt19937_64& rng, std::size_t dim);

// A graph built straight through transactions: random entities, relations,
// sessions and embeddings. No backend involved. Coarse graphs draw embeddings
// and timestamps from tiny pools so that exact score ties are common.
GraphState random_graph(std::uint64_t seed, std::size_t n_triples, std::size_t dim = 16,
                        bool coarse = false);

// Dangling ids and missing back links; empty when the graph is consistent.
std::vector<std::string> walk_graph(const GraphState& g);

// Independent scalar oracles.
double oracle_harmonic(double a, double b);
double oracle_weight(double delta_tau, double tau_hat, double shape);
double oracle_median(std::vector<double> xs);

// Triple ids in ranked order recomputed from scratch.
std::vector<std::string> oracle_rank(const std::vector<GatheredCandidate>& candidates, double shape,
                                     std::size_t top_k, bool decay);

// Membership predicate of the candidate set, applied to every triple.
std::set<std::string> oracle_candidate_ids(const GraphState& g, const std::set<std::string>& keys,
                                           const std::vector<std::string>& entry_sessions);

}  // namespace hmem::testing
