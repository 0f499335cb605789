#include "hmem/pipeline/update.hpp"

#include <chrono>

#include "hmem/error.hpp"
#include "hmem/text.hpp"

namespace hmem {

void validate(const IngestRequest& req) {
  if (text::trim(req.session_id).empty()) throw InvalidArgument("session_id: must be non-empty");
  if (req.speaker_turns.empty()) throw InvalidArgument("turns: must be non-empty");
  for (std::size_t i = 0; i < req.speaker_turns.size(); ++i) {
    const SpeakerTurn& t = req.speaker_turns[i];
    std::string field = "turns[" + std::to_string(i) + "]";
    if (text::trim(t.speaker).empty()) throw InvalidArgument(field + ".speaker: must be non-empty");
    if (t.speaker.find_first_of(":\n\r") != std::string::npos) {
      throw InvalidArgument(field + ".speaker: must not contain ':' or line breaks");
    }
    if (text::trim(t.utterance).empty()) throw InvalidArgument(field + ".text: must be non-empty");
  }
}

void FifoGate::lock() {
  std::unique_lock lock(mu_);
  const std::uint64_t ticket = next_ticket_++;
  ++waiting_;
  cv_.wait(lock, [&] { return serving_ == ticket; });
  --waiting_;
}

void FifoGate::unlock() {
  {
    std::lock_guard lock(mu_);
    ++serving_;
  }
  cv_.notify_all();
}

std::size_t FifoGate::waiting() const {
  std::lock_guard lock(mu_);
  return waiting_;
}

UpdatePipeline::UpdatePipeline(GraphStore& store, ExtractionBackend& backend, DedupPolicy policy)
    : store_(store), backend_(backend), policy_(policy) {
  policy_.validate();
}

SummaryUpdate UpdatePipeline::update_summary(Transaction& txn, std::string_view session_id,
                                             std::string_view new_text, Timestamp ts) {
  const SessionNode* prior = txn.state().find_session(session_id);
  std::optional<std::string> prior_summary;
  std::vector<std::string> prior_keys;
  if (prior) {
    if (!prior->summary.empty()) prior_summary = prior->summary;
    prior_keys.assign(prior->keys.begin(), prior->keys.end());
  }
  SummaryResult res = backend_.summarize(new_text, prior_summary, prior_keys);
  Embedding embedding = backend_.embed(res.summary);

  SummaryUpdate out;
  out.created = prior == nullptr;
  out.summary = res.summary;
  for (const std::string& k : res.keys) {
    std::string c = text::canonicalize(k);
    if (!c.empty()) out.keys.insert(std::move(c));
  }
  if (out.keys.empty()) throw ExtractionError("summary returned no keys");
  out.changed = out.created || prior->summary != out.summary || prior->keys != out.keys;
  txn.upsert_session(session_id, out.summary, out.keys, ts, std::move(embedding));
  return out;
}

IntegrationCounts UpdatePipeline::integrate_triples(Transaction& txn,
                                                    const std::vector<ExtractedTriple>& extracted,
                                                    std::string_view chunk_id,
                                                    std::string_view session_id, Timestamp ts) {
  IntegrationCounts counts;
  for (const ExtractedTriple& raw : extracted) {
    std::optional<ExtractedTriple> t = canonicalize_triple(raw);
    if (!t) continue;
    CandidateTriple cand{*t, backend_.embed(canonical_triple_sentence(t->subject, t->relation, t->object))};
    if (auto dup = find_duplicate(cand, policy_, txn.state())) {
      txn.add_hyperlink(*dup, session_id, chunk_id);
      ++counts.merged;
    } else {
      txn.insert_triple(t->subject, t->subject_type, t->relation, t->object, t->object_type,
                        session_id, chunk_id, ts, std::move(cand.embedding));
      ++counts.added;
    }
  }
  return counts;
}

IngestReport UpdatePipeline::ingest_chunk(const IngestRequest& req) {
  validate(req);
  std::lock_guard lock(gate_);
  const auto start = std::chrono::steady_clock::now();

  if (req.idempotency_key) {
    GraphSnapshot snap = store_.snapshot();
    if (const IngestReport* prior = snap->find_idempotent(*req.idempotency_key)) return *prior;
  }

  Transaction txn = store_.begin();
  const std::string text = render_turns(req.speaker_turns);

  SummaryUpdate summary = update_summary(txn, req.session_id, text, req.ts);
  const std::string chunk_id =
      txn.insert_chunk(req.session_id, text, req.speaker_turns, req.ts, req.idempotency_key).chunk_id;
  std::vector<ExtractedTriple> extracted = backend_.extract_triples(text);
  IntegrationCounts counts = integrate_triples(txn, extracted, chunk_id, req.session_id, req.ts);

  IngestReport report;
  report.chunk_id = chunk_id;
  report.session_created = summary.created;
  report.triples_added = counts.added;
  report.triples_merged = counts.merged;
  report.summary_updated = summary.changed;
  // Two prompt inputs (summary, triples) plus the produced summary and facts.
  std::size_t tokens = 2 * text::estimate_tokens(text) + text::estimate_tokens(summary.summary);
  for (const ExtractedTriple& t : extracted) {
    tokens += text::estimate_tokens(t.subject + " " + t.relation + " " + t.object);
  }
  report.token_estimate = tokens;
  report.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  if (req.idempotency_key) txn.record_report(*req.idempotency_key, report);

  if (hook_) hook_(txn.events());
  store_.commit(std::move(txn));
  return report;
}

}  // namespace hmem
