#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hmem/core/types.hpp"

namespace hmem {

// Payloads are self-contained: replay never consults a backend.
struct SessionUpserted {
  std::string session_id;
  std::string summary;
  std::set<std::string> keys;
  Timestamp ts = 0;
  Embedding summary_embedding;

  friend bool operator==(const SessionUpserted&, const SessionUpserted&) = default;
};

struct ChunkInserted {
  std::string chunk_id;
  std::string session_id;
  std::string text;
  std::vector<SpeakerTurn> speaker_turns;
  Timestamp ts = 0;
  std::optional<std::string> idempotency_key;
  std::optional<IngestReport> report;

  friend bool operator==(const ChunkInserted&, const ChunkInserted&) = default;
};

struct TripleInserted {
  std::string triple_id;
  std::string subject;
  std::string subject_type;
  std::string relation;
  std::string object;
  std::string object_type;
  std::string session_id;
  std::string chunk_id;
  Timestamp ts = 0;
  Embedding relation_embedding;

  friend bool operator==(const TripleInserted&, const TripleInserted&) = default;
};

struct HyperlinkAdded {
  std::string triple_id;
  std::string session_id;
  std::string chunk_id;

  friend bool operator==(const HyperlinkAdded&, const HyperlinkAdded&) = default;
};

using GraphEvent =
    std::variant<SessionUpserted, ChunkInserted, TripleInserted, HyperlinkAdded>;

// "session_upserted", "chunk_inserted", "triple_inserted", "hyperlink_added"
std::string_view event_kind(const GraphEvent& event) noexcept;

class GraphState;

// Re-applies a logged mutation. Replay of a full log through this function
// reproduces the graph that emitted it.
void apply_event(GraphState& state, const GraphEvent& event);

}  // namespace hmem
