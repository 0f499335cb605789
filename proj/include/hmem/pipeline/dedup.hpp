#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hmem/backend/backend.hpp"
#include "hmem/core/embedding.hpp"
#include "hmem/core/graph.hpp"

namespace hmem {

struct DedupPolicy {
  double similarity_threshold = 0.90;  // theta, in (0, 1]
  bool require_type_match = true;
  bool require_same_entity_pair = true;

  // Throws InvalidArgument when theta is outside (0, 1].
  void validate() const;
};

// An extracted triple after canonicalization, with its sentence embedding.
struct CandidateTriple {
  ExtractedTriple triple;
  Embedding embedding;
};

// Trims the surface forms, canonicalizes the relation and normalizes types.
// Returns nullopt when any part is empty afterwards.
std::optional<ExtractedTriple> canonicalize_triple(const ExtractedTriple& t);

// "other" is the unknown label and is compatible with every type.
bool types_compatible(std::string_view a, std::string_view b) noexcept;

// The existing triple the candidate duplicates, if any: among triples passing
// the entity-pair and type gates, the one with the highest cosine >= theta.
// Ties go to the smallest triple id.
std::optional<std::string> find_duplicate(const CandidateTriple& candidate,
                                          const DedupPolicy& policy, const GraphState& graph);

}  // namespace hmem
