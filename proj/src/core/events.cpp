#include "hmem/core/events.hpp"

#include "hmem/core/graph.hpp"

namespace hmem {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

std::string_view event_kind(const GraphEvent& event) noexcept {
  switch (event.index()) {
    case 0: return "session_upserted";
    case 1: return "chunk_inserted";
    case 2: return "triple_inserted";
    default: return "hyperlink_added";
  }
}

void apply_event(GraphState& state, const GraphEvent& event) {
  std::visit(Overloaded{
                 [&](const SessionUpserted& e) {
                   state.upsert_session(e.session_id, e.summary, e.keys, e.ts,
                                        e.summary_embedding);
                 },
                 [&](const ChunkInserted& e) {
                   state.insert_chunk(e.session_id, e.text, e.speaker_turns, e.ts, e.chunk_id);
                   if (e.idempotency_key && e.report) {
                     state.remember_idempotent(*e.idempotency_key, *e.report);
                   }
                 },
                 [&](const TripleInserted& e) {
                   state.insert_triple(e.subject, e.subject_type, e.relation, e.object,
                                       e.object_type, e.session_id, e.chunk_id, e.ts,
                                       e.relation_embedding, e.triple_id);
                 },
                 [&](const HyperlinkAdded& e) {
                   state.add_hyperlink(e.triple_id, e.session_id, e.chunk_id);
                 },
             },
             event);
}

}  // namespace hmem
