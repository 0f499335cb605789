#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hmem/backend/backend.hpp"
#include "hmem/core/graph.hpp"
#include "hmem/pipeline/dedup.hpp"

namespace hmem {

struct IngestRequest {
  std::string session_id;
  std::vector<SpeakerTurn> speaker_turns;
  Timestamp ts = 0;
  std::optional<std::string> idempotency_key;
};

// Throws InvalidArgument naming the offending field.
void validate(const IngestRequest& req);

struct SummaryUpdate {
  std::string summary;
  std::set<std::string> keys;
  bool created = false;
  bool changed = false;
};

struct IntegrationCounts {
  std::size_t added = 0;
  std::size_t merged = 0;
};

// Ticket lock: writers enter in arrival order.
class FifoGate {
 public:
  void lock();
  void unlock();
  std::size_t waiting() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t serving_ = 0;
  std::size_t waiting_ = 0;
};

// Receives every batch before it becomes visible; throwing aborts the commit.
using CommitHook = std::function<void(const std::vector<GraphEvent>&)>;

// Real-time ingestion. Each chunk becomes one atomic graph transition.
class UpdatePipeline {
 public:
  UpdatePipeline(GraphStore& store, ExtractionBackend& backend, DedupPolicy policy = {});

  void set_commit_hook(CommitHook hook) { hook_ = std::move(hook); }

  // Summary refresh, chunk insert, triple extraction and dedup, then commit.
  // A replayed idempotency key returns the stored report without writing.
  IngestReport ingest_chunk(const IngestRequest& req);

  // Stages, exposed so that tests can drive them on a transaction.
  SummaryUpdate update_summary(Transaction& txn, std::string_view session_id,
                               std::string_view new_text, Timestamp ts);
  IntegrationCounts integrate_triples(Transaction& txn,
                                      const std::vector<ExtractedTriple>& extracted,
                                      std::string_view chunk_id, std::string_view session_id,
                                      Timestamp ts);

  const DedupPolicy& policy() const noexcept { return policy_; }
  std::size_t queue_depth() const { return gate_.waiting(); }

 private:
  GraphStore& store_;
  ExtractionBackend& backend_;
  DedupPolicy policy_;
  CommitHook hook_;
  FifoGate gate_;
};

}  // namespace hmem
