#include "hmem/pipeline/dedup.hpp"

#include <vector>

#include "hmem/error.hpp"
#include "hmem/scoring/kernels.hpp"
#include "hmem/text.hpp"

namespace hmem {

void DedupPolicy::validate() const {
  if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0)) {
    throw InvalidArgument("dedup similarity threshold must lie in (0, 1]");
  }
}

std::optional<ExtractedTriple> canonicalize_triple(const ExtractedTriple& t) {
  ExtractedTriple c;
  c.subject = std::string(text::trim(t.subject));
  c.object = std::string(text::trim(t.object));
  c.relation = text::canonicalize(t.relation);
  c.subject_type = normalize_entity_type(t.subject_type);
  c.object_type = normalize_entity_type(t.object_type);
  if (text::canonicalize(c.subject).empty() || text::canonicalize(c.object).empty() ||
      c.relation.empty()) {
    return std::nullopt;
  }
  return c;
}

bool types_compatible(std::string_view a, std::string_view b) noexcept {
  return a == b || a == "other" || b == "other";
}

std::optional<std::string> find_duplicate(const CandidateTriple& candidate,
                                          const DedupPolicy& policy, const GraphState& graph) {
  const std::string subject_id = text::canonicalize(candidate.triple.subject);
  const std::string object_id = text::canonicalize(candidate.triple.object);

  std::vector<const Triple*> pool;
  if (policy.require_same_entity_pair) {
    for (const std::string& id : graph.pair_bucket(subject_id, object_id)) {
      pool.push_back(graph.find_triple(id));
    }
  } else {
    pool.reserve(graph.triples().size());
    for (const auto& [id, t] : graph.triples()) pool.push_back(t.get());
  }

  if (policy.require_type_match) {
    std::erase_if(pool, [&](const Triple* t) {
      const EntityNode* s = graph.find_entity(t->subject_id);
      const EntityNode* o = graph.find_entity(t->object_id);
      return !types_compatible(s->entity_type, candidate.triple.subject_type) ||
             !types_compatible(o->entity_type, candidate.triple.object_type);
    });
  }
  if (pool.empty()) return std::nullopt;

  std::vector<const Embedding*> rows;
  rows.reserve(pool.size());
  for (const Triple* t : pool) rows.push_back(&t->relation_embedding);
  std::vector<double> sims(pool.size());
  kernels::parallel::cosine_batch(candidate.embedding, rows, sims);

  // Pool is in ascending id order, so a strict comparison keeps the smallest
  // id among equal similarities.
  const Triple* best = nullptr;
  double best_sim = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    double sim = pool[i]->relation_embedding == candidate.embedding ? 1.0 : sims[i];
    if (sim >= policy.similarity_threshold && (!best || sim > best_sim)) {
      best = pool[i];
      best_sim = sim;
    }
  }
  if (!best) return std::nullopt;
  return best->triple_id;
}

}  // namespace hmem
