#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hmem/core/events.hpp"
#include "hmem/core/types.hpp"

namespace hmem {

// Copy-on-write id map: copying the map shares every node, and writers swap
// in freshly built nodes. Snapshots stay immutable at O(n) pointer cost per
// transaction instead of O(total bytes).
template <class T>
using NodeMap = std::map<std::string, std::shared_ptr<const T>, std::less<>>;

using IdSet = std::set<std::string, std::less<>>;

// One version of the three-layer graph. Read methods are safe on a shared
// const instance; the mutators are for transactions and replay only.
class GraphState {
 public:
  std::uint64_t version() const noexcept { return version_; }

  const SessionNode* find_session(std::string_view id) const;
  const EntityNode* find_entity(std::string_view id) const;
  const Triple* find_triple(std::string_view id) const;
  const Chunk* find_chunk(std::string_view id) const;

  const NodeMap<SessionNode>& sessions() const noexcept { return sessions_; }
  const NodeMap<EntityNode>& entities() const noexcept { return entities_; }
  const NodeMap<Triple>& triples() const noexcept { return triples_; }
  const NodeMap<Chunk>& chunks() const noexcept { return chunks_; }

  // Triples with subject or object equal to canonicalize(entity_id). Each
  // triple appears once, self-loops included. Ordered by triple id.
  std::vector<const Triple*> neighbors(std::string_view entity_id) const;

  // Triple ids sharing the exact (subject_id, object_id) pair.
  std::vector<std::string> pair_bucket(std::string_view subject_id,
                                       std::string_view object_id) const;

  // Sum over triples of |session_ids| + |chunk_ids|.
  std::size_t hyperlink_count() const noexcept { return hyperlinks_; }

  const std::map<std::string, IngestReport, std::less<>>& idempotency() const noexcept {
    return idempotency_;
  }
  const IngestReport* find_idempotent(std::string_view key) const;

  std::uint64_t next_chunk_seq() const noexcept { return next_chunk_; }
  std::uint64_t next_triple_seq() const noexcept { return next_triple_; }

  // Mutators. Each validates its preconditions before touching state.

  // Returns the node and whether it was newly created.
  std::pair<const SessionNode*, bool> upsert_session(std::string_view session_id,
                                                     std::string summary,
                                                     const std::set<std::string>& keys,
                                                     Timestamp ts,
                                                     Embedding summary_embedding = {});

  // An empty chunk_id allocates the next sequential id.
  const Chunk& insert_chunk(std::string_view session_id, std::string text,
                            std::vector<SpeakerTurn> speaker_turns, Timestamp ts,
                            std::string_view chunk_id = {});

  const Triple& insert_triple(std::string_view subject, std::string_view subject_type,
                              std::string_view relation, std::string_view object,
                              std::string_view object_type, std::string_view session_id,
                              std::string_view chunk_id, Timestamp ts, Embedding embedding,
                              std::string_view triple_id = {});

  // Returns true when at least one new link was created.
  bool add_hyperlink(std::string_view triple_id, std::string_view session_id,
                     std::string_view chunk_id);

  void remember_idempotent(std::string key, IngestReport report);
  void bump_version() noexcept { ++version_; }
  void set_version(std::uint64_t v) noexcept { version_ = v; }
  void set_counters(std::uint64_t next_chunk, std::uint64_t next_triple) noexcept {
    next_chunk_ = next_chunk;
    next_triple_ = next_triple;
  }

  // Restores nodes verbatim (snapshot load). Indexes are rebuilt.
  void restore(std::vector<SessionNode> sessions, std::vector<EntityNode> entities,
               std::vector<Triple> triples, std::vector<Chunk> chunks);

 private:
  void index_triple(const Triple& t);
  const EntityNode& upsert_entity(std::string_view name, std::string_view type);

  std::uint64_t version_ = 0;
  std::uint64_t next_chunk_ = 1;
  std::uint64_t next_triple_ = 1;
  std::size_t hyperlinks_ = 0;

  NodeMap<SessionNode> sessions_;
  NodeMap<EntityNode> entities_;
  NodeMap<Triple> triples_;
  NodeMap<Chunk> chunks_;

  NodeMap<IdSet> by_entity_;
  NodeMap<IdSet> by_pair_;
  std::map<std::string, IngestReport, std::less<>> idempotency_;
};

using GraphSnapshot = std::shared_ptr<const GraphState>;

std::string make_chunk_id(std::uint64_t seq);
std::string make_triple_id(std::uint64_t seq);

// A private copy of the current graph plus the events that describe every
// mutation applied to it. Nothing is visible to readers until commit.
class Transaction {
 public:
  explicit Transaction(const GraphState& base) : state_(base), base_version_(base.version()) {}

  const GraphState& state() const noexcept { return state_; }
  const std::vector<GraphEvent>& events() const noexcept { return events_; }
  std::uint64_t base_version() const noexcept { return base_version_; }

  std::pair<const SessionNode*, bool> upsert_session(std::string_view session_id,
                                                     std::string summary,
                                                     const std::set<std::string>& keys,
                                                     Timestamp ts,
                                                     Embedding summary_embedding = {});

  const Chunk& insert_chunk(std::string_view session_id, std::string text,
                            std::vector<SpeakerTurn> speaker_turns, Timestamp ts,
                            std::optional<std::string> idempotency_key = std::nullopt);

  const Triple& insert_triple(std::string_view subject, std::string_view subject_type,
                              std::string_view relation, std::string_view object,
                              std::string_view object_type, std::string_view session_id,
                              std::string_view chunk_id, Timestamp ts, Embedding embedding);

  bool add_hyperlink(std::string_view triple_id, std::string_view session_id,
                     std::string_view chunk_id);

  // Attaches the final report to the chunk event that carries the key.
  void record_report(const std::string& idempotency_key, const IngestReport& report);

 private:
  friend class GraphStore;
  GraphState state_;
  std::uint64_t base_version_;
  std::vector<GraphEvent> events_;
};

// Single-writer, multi-reader holder of the current graph version.
class GraphStore {
 public:
  GraphStore() : current_(std::make_shared<const GraphState>()) {}
  explicit GraphStore(GraphState initial)
      : current_(std::make_shared<const GraphState>(std::move(initial))) {}

  GraphSnapshot snapshot() const;

  Transaction begin() const { return Transaction(*snapshot()); }

  // Publishes the transaction as version base+1. Throws std::logic_error if
  // another commit landed since begin(); writers must be serialized.
  std::uint64_t commit(Transaction&& txn);

  // begin + fn + commit; returns the committed events.
  std::vector<GraphEvent> write(const std::function<void(Transaction&)>& fn);

  void reset(GraphState state);

 private:
  mutable std::mutex mu_;
  GraphSnapshot current_;
};

}  // namespace hmem
