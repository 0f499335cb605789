#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hmem/core/embedding.hpp"
#include "hmem/time.hpp"

namespace hmem {

// Fixed entity-type vocabulary; anything else collapses to "other".
inline constexpr std::string_view kEntityTypes[] = {
    "person", "place", "organization", "topic", "time", "other"};

std::string normalize_entity_type(std::string_view label);

struct SpeakerTurn {
  std::string speaker;
  std::string utterance;

  friend bool operator==(const SpeakerTurn&, const SpeakerTurn&) = default;
};

// "SPEAKER: utterance" lines joined by '\n'.
std::string render_turns(const std::vector<SpeakerTurn>& turns);

struct SessionNode {
  std::string session_id;
  std::string summary;
  std::set<std::string> keys;
  Timestamp first_ts = 0;
  Timestamp last_ts = 0;
  std::set<std::string> triple_ids;
  std::vector<std::string> chunk_ids;  // insertion order
  Embedding summary_embedding;         // empty until the first summary

  friend bool operator==(const SessionNode&, const SessionNode&) = default;
};

struct EntityNode {
  std::string entity_id;  // canonicalize(name)
  std::string name;
  std::string entity_type;

  friend bool operator==(const EntityNode&, const EntityNode&) = default;
};

struct Triple {
  std::string triple_id;
  std::string subject_id;
  std::string relation;
  std::string object_id;
  std::set<std::string> session_ids;
  std::set<std::string> chunk_ids;
  Timestamp ts = 0;
  Embedding relation_embedding;

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct Chunk {
  std::string chunk_id;
  std::string session_id;
  std::string text;
  Timestamp ts = 0;
  std::vector<SpeakerTurn> speaker_turns;
  std::set<std::string> triple_ids;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

// Outcome of one committed ingestion, retained for idempotent replays.
struct IngestReport {
  std::string chunk_id;
  bool session_created = false;
  std::size_t triples_added = 0;
  std::size_t triples_merged = 0;
  bool summary_updated = false;
  std::int64_t elapsed_ms = 0;
  std::size_t token_estimate = 0;

  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

// "subject relation object", lowercased. The single sentence form shared by
// deduplication and retrieval.
std::string canonical_triple_sentence(std::string_view subject,
                                      std::string_view relation,
                                      std::string_view object);

}  // namespace hmem
