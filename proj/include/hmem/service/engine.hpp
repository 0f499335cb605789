#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hmem/backend/backend.hpp"
#include "hmem/core/graph.hpp"
#include "hmem/persistence/event_log.hpp"
#include "hmem/persistence/snapshot.hpp"
#include "hmem/pipeline/update.hpp"
#include "hmem/retrieval/retriever.hpp"
#include "hmem/service/config.hpp"

namespace hmem {

struct EngineStats {
  std::size_t sessions = 0;
  std::size_t entities = 0;
  std::size_t triples = 0;
  std::size_t chunks = 0;
  std::size_t hyperlinks = 0;
  std::uint64_t graph_version = 0;
  std::size_t queue_depth = 0;
  std::uint64_t log_seq = 0;
};

// Graph store, pipelines and persistence wired together. With an empty
// data_dir the engine is purely in-memory.
class MemoryEngine {
 public:
  // A null backend is built from config.backend. Recovers from data_dir.
  explicit MemoryEngine(EngineConfig config, std::unique_ptr<ExtractionBackend> backend = nullptr);
  ~MemoryEngine();

  MemoryEngine(const MemoryEngine&) = delete;
  MemoryEngine& operator=(const MemoryEngine&) = delete;

  // FIFO-serialized; logged and fsynced before it returns.
  IngestReport ingest(const IngestRequest& req);

  RetrievalResult query(const Query& q) const;

  GraphSnapshot snapshot() const { return store_.snapshot(); }
  EngineStats stats() const;

  // Writes a snapshot of the current state. Null without a data_dir.
  std::optional<SnapshotInfo> write_snapshot_now();

  // Waits for queued ingestions, snapshots if anything changed since the last
  // one, then refuses further writes. Idempotent.
  void shutdown();
  bool is_shut_down() const noexcept { return closed_.load(); }

  const EngineConfig& config() const noexcept { return config_; }
  ExtractionBackend& backend() noexcept { return *backend_; }
  const Retriever& retriever() const noexcept { return retriever_; }
  const std::optional<RecoveryResult>& recovery() const noexcept { return recovery_; }

 private:
  std::optional<SnapshotInfo> snapshot_locked();

  EngineConfig config_;
  std::unique_ptr<ExtractionBackend> backend_;
  GraphStore store_;
  std::unique_ptr<EventLog> log_;
  UpdatePipeline pipeline_;
  Retriever retriever_;
  FifoGate gate_;
  std::size_t events_since_snapshot_ = 0;
  std::uint64_t snapshot_seq_ = 0;
  std::optional<RecoveryResult> recovery_;
  std::atomic<bool> closed_{false};
};

RetrievalConfig retrieval_config(const EngineConfig& c);

}  // namespace hmem
