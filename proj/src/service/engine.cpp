#include "hmem/service/engine.hpp"

#include <iostream>
#include <mutex>

#include "hmem/error.hpp"

namespace hmem {

RetrievalConfig retrieval_config(const EngineConfig& c) {
  RetrievalConfig r;
  r.scoring = c.scoring;
  r.entry_limit = c.entry_limit;
  r.budget_tokens = c.budget_tokens;
  r.chunk_fallback = c.chunk_fallback;
  return r;
}

MemoryEngine::MemoryEngine(EngineConfig config, std::unique_ptr<ExtractionBackend> backend)
    : config_(std::move(config)),
      backend_(backend ? std::move(backend) : make_backend(config_.backend)),
      pipeline_(store_, *backend_, config_.dedup),
      retriever_(*backend_, retrieval_config(config_)) {
  if (config_.data_dir.empty()) return;

  std::filesystem::create_directories(config_.data_dir);
  recovery_ = recover(config_.data_dir, backend_->dimension());
  for (const std::string& w : recovery_->warnings) std::cerr << "hmem: " << w << "\n";
  snapshot_seq_ = recovery_->snapshot ? recovery_->snapshot->last_seq : 0;
  events_since_snapshot_ = recovery_->events_replayed;
  store_.reset(recovery_->state);
  log_ = std::make_unique<EventLog>(config_.data_dir / "memory.log");
  if (log_->size_bytes() == 0) log_->continue_from(recovery_->last_seq);
  if (log_->last_seq() != recovery_->last_seq) {
    throw CorruptData("memory.log ends at seq " + std::to_string(log_->last_seq()) +
                          " but recovery reached seq " + std::to_string(recovery_->last_seq),
                      recovery_->log_corrupt_position.value_or(0));
  }
  pipeline_.set_commit_hook([this](const std::vector<GraphEvent>& events) {
    log_->append(events, now_utc());
    events_since_snapshot_ += events.size();
  });
}

MemoryEngine::~MemoryEngine() {
  try {
    shutdown();
  } catch (const std::exception& e) {
    std::cerr << "hmem: shutdown failed: " << e.what() << "\n";
  }
}

IngestReport MemoryEngine::ingest(const IngestRequest& req) {
  validate(req);
  std::lock_guard lock(gate_);
  if (closed_.load()) throw IoError("engine is shut down");
  IngestReport report = pipeline_.ingest_chunk(req);
  if (log_ && config_.snapshot_every > 0 && events_since_snapshot_ >= config_.snapshot_every) {
    try {
      snapshot_locked();
    } catch (const Error& e) {
      // The batch is already durable in the log; retry on the next write.
      std::cerr << "hmem: snapshot failed: " << e.what() << "\n";
    }
  }
  return report;
}

RetrievalResult MemoryEngine::query(const Query& q) const { return retriever_.retrieve(q, store_.snapshot()); }

EngineStats MemoryEngine::stats() const {
  GraphSnapshot g = store_.snapshot();
  EngineStats s;
  s.sessions = g->sessions().size();
  s.entities = g->entities().size();
  s.triples = g->triples().size();
  s.chunks = g->chunks().size();
  s.hyperlinks = g->hyperlink_count();
  s.graph_version = g->version();
  s.queue_depth = gate_.waiting() + pipeline_.queue_depth();
  s.log_seq = log_ ? log_->last_seq() : 0;
  return s;
}

std::optional<SnapshotInfo> MemoryEngine::snapshot_locked() {
  if (!log_) return std::nullopt;
  SnapshotInfo info = write_snapshot(*store_.snapshot(), log_->last_seq(), backend_->dimension(), config_.data_dir);
  snapshot_seq_ = info.last_seq;
  events_since_snapshot_ = 0;
  return info;
}

std::optional<SnapshotInfo> MemoryEngine::write_snapshot_now() {
  std::lock_guard lock(gate_);
  return snapshot_locked();
}

void MemoryEngine::shutdown() {
  std::lock_guard lock(gate_);
  if (closed_.exchange(true)) return;
  if (log_ && (events_since_snapshot_ > 0 || log_->last_seq() != snapshot_seq_)) snapshot_locked();
}

}  // namespace hmem
