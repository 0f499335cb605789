#include "hmem/core/graph.hpp"

#include <cstdio>
#include <stdexcept>

#include "hmem/error.hpp"
#include "hmem/text.hpp"

namespace hmem {

namespace {

template <class T>
const T* lookup(const NodeMap<T>& m, std::string_view id) {
  auto it = m.find(id);
  return it == m.end() ? nullptr : it->second.get();
}

std::string pair_key(std::string_view s, std::string_view o) {
  std::string k(s);
  k.push_back('\x1f');
  k.append(o);
  return k;
}

void add_to_index(NodeMap<IdSet>& index, const std::string& key, const std::string& id) {
  auto it = index.find(key);
  auto set = it == index.end() ? std::make_shared<IdSet>() : std::make_shared<IdSet>(*it->second);
  set->insert(id);
  index[key] = std::move(set);
}

std::uint64_t parse_seq(std::string_view id, char prefix) {
  if (id.size() < 2 || id[0] != prefix) return 0;
  std::uint64_t v = 0;
  for (char c : id.substr(1)) {
    if (c < '0' || c > '9') return 0;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

std::string make_chunk_id(std::uint64_t seq) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "c%010llu", static_cast<unsigned long long>(seq));
  return buf;
}

std::string make_triple_id(std::uint64_t seq) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "t%010llu", static_cast<unsigned long long>(seq));
  return buf;
}

const SessionNode* GraphState::find_session(std::string_view id) const { return lookup(sessions_, id); }
const EntityNode* GraphState::find_entity(std::string_view id) const { return lookup(entities_, id); }
const Triple* GraphState::find_triple(std::string_view id) const { return lookup(triples_, id); }
const Chunk* GraphState::find_chunk(std::string_view id) const { return lookup(chunks_, id); }

const IngestReport* GraphState::find_idempotent(std::string_view key) const {
  auto it = idempotency_.find(key);
  return it == idempotency_.end() ? nullptr : &it->second;
}

std::vector<const Triple*> GraphState::neighbors(std::string_view entity_id) const {
  std::vector<const Triple*> out;
  auto it = by_entity_.find(text::canonicalize(entity_id));
  if (it == by_entity_.end()) return out;
  out.reserve(it->second->size());
  for (const std::string& id : *it->second) out.push_back(find_triple(id));
  return out;
}

std::vector<std::string> GraphState::pair_bucket(std::string_view subject_id,
                                                 std::string_view object_id) const {
  auto it = by_pair_.find(pair_key(subject_id, object_id));
  if (it == by_pair_.end()) return {};
  return {it->second->begin(), it->second->end()};
}

std::pair<const SessionNode*, bool> GraphState::upsert_session(std::string_view session_id,
                                                               std::string summary,
                                                               const std::set<std::string>& keys,
                                                               Timestamp ts,
                                                               Embedding summary_embedding) {
  if (session_id.empty()) throw InvalidArgument("session_id is empty");
  std::set<std::string> canonical_keys;
  for (const std::string& k : keys) {
    std::string c = text::canonicalize(k);
    if (!c.empty()) canonical_keys.insert(std::move(c));
  }
  if (!text::trim(summary).empty() && canonical_keys.empty()) {
    throw InvalidArgument("session " + std::string(session_id) + ": keys must be non-empty when summary is set");
  }

  std::shared_ptr<SessionNode> node;
  bool created = false;
  if (const SessionNode* existing = find_session(session_id)) {
    node = std::make_shared<SessionNode>(*existing);
    node->last_ts = std::max(node->last_ts, ts);
  } else {
    node = std::make_shared<SessionNode>();
    node->session_id = std::string(session_id);
    node->first_ts = node->last_ts = ts;
    created = true;
  }
  node->summary = std::move(summary);
  node->keys = std::move(canonical_keys);
  if (!summary_embedding.empty()) node->summary_embedding = std::move(summary_embedding);
  const SessionNode* raw = node.get();
  sessions_[std::string(session_id)] = std::move(node);
  return {raw, created};
}

const Chunk& GraphState::insert_chunk(std::string_view session_id, std::string text,
                                      std::vector<SpeakerTurn> speaker_turns, Timestamp ts,
                                      std::string_view chunk_id) {
  const SessionNode* session = find_session(session_id);
  if (!session) throw NotFound("session " + std::string(session_id) + " does not exist");
  if (text::trim(text).empty()) throw InvalidArgument("chunk text is empty");
  if (!speaker_turns.empty() && render_turns(speaker_turns) != text) {
    throw InvalidArgument("chunk text does not match its speaker turns");
  }

  std::string id;
  if (chunk_id.empty()) {
    id = make_chunk_id(next_chunk_++);
  } else {
    id = std::string(chunk_id);
    if (find_chunk(id)) throw InvalidArgument("chunk " + id + " already exists");
    if (parse_seq(id, 'c') >= next_chunk_) next_chunk_ = parse_seq(id, 'c') + 1;
  }

  auto chunk = std::make_shared<Chunk>();
  chunk->chunk_id = id;
  chunk->session_id = std::string(session_id);
  chunk->text = std::move(text);
  chunk->ts = ts;
  chunk->speaker_turns = std::move(speaker_turns);

  auto s = std::make_shared<SessionNode>(*session);
  s->chunk_ids.push_back(id);
  s->first_ts = std::min(s->first_ts, ts);
  s->last_ts = std::max(s->last_ts, ts);
  sessions_[s->session_id] = std::move(s);

  const Chunk& ref = *chunk;
  chunks_[id] = std::move(chunk);
  return ref;
}

const EntityNode& GraphState::upsert_entity(std::string_view name, std::string_view type) {
  std::string id = text::canonicalize(name);
  if (id.empty()) throw InvalidArgument("entity name is empty");
  if (const EntityNode* existing = find_entity(id)) return *existing;
  auto node = std::make_shared<EntityNode>();
  node->entity_id = id;
  node->name = std::string(text::trim(name));
  node->entity_type = normalize_entity_type(type);
  const EntityNode& ref = *node;
  entities_[id] = std::move(node);
  return ref;
}

void GraphState::index_triple(const Triple& t) {
  add_to_index(by_entity_, t.subject_id, t.triple_id);
  if (t.object_id != t.subject_id) add_to_index(by_entity_, t.object_id, t.triple_id);
  add_to_index(by_pair_, pair_key(t.subject_id, t.object_id), t.triple_id);
}

const Triple& GraphState::insert_triple(std::string_view subject, std::string_view subject_type,
                                        std::string_view relation, std::string_view object,
                                        std::string_view object_type, std::string_view session_id,
                                        std::string_view chunk_id, Timestamp ts,
                                        Embedding embedding, std::string_view triple_id) {
  const SessionNode* session = find_session(session_id);
  if (!session) throw NotFound("session " + std::string(session_id) + " does not exist");
  const Chunk* chunk = find_chunk(chunk_id);
  if (!chunk) throw NotFound("chunk " + std::string(chunk_id) + " does not exist");
  std::string rel = text::canonicalize(relation);
  if (rel.empty()) throw InvalidArgument("relation is empty");
  if (embedding.empty()) throw InvalidArgument("triple embedding is empty");
  if (text::canonicalize(subject).empty() || text::canonicalize(object).empty()) {
    throw InvalidArgument("triple subject/object is empty");
  }
  // Re-validate: Embedding guarantees the norm only at construction time.
  Embedding::from_unit(std::vector<float>(embedding.values().begin(), embedding.values().end()));

  std::string id;
  if (triple_id.empty()) {
    id = make_triple_id(next_triple_++);
  } else {
    id = std::string(triple_id);
    if (find_triple(id)) throw InvalidArgument("triple " + id + " already exists");
    if (parse_seq(id, 't') >= next_triple_) next_triple_ = parse_seq(id, 't') + 1;
  }

  const EntityNode& s = upsert_entity(subject, subject_type);
  const EntityNode& o = upsert_entity(object, object_type);

  auto t = std::make_shared<Triple>();
  t->triple_id = id;
  t->subject_id = s.entity_id;
  t->object_id = o.entity_id;
  t->relation = std::move(rel);
  t->session_ids.insert(std::string(session_id));
  t->chunk_ids.insert(std::string(chunk_id));
  t->ts = ts;
  t->relation_embedding = std::move(embedding);
  hyperlinks_ += 2;

  auto sess = std::make_shared<SessionNode>(*session);
  sess->triple_ids.insert(id);
  sessions_[sess->session_id] = std::move(sess);
  auto ch = std::make_shared<Chunk>(*chunk);
  ch->triple_ids.insert(id);
  chunks_[ch->chunk_id] = std::move(ch);

  index_triple(*t);
  const Triple& ref = *t;
  triples_[id] = std::move(t);
  return ref;
}

bool GraphState::add_hyperlink(std::string_view triple_id, std::string_view session_id,
                               std::string_view chunk_id) {
  const Triple* triple = find_triple(triple_id);
  if (!triple) throw NotFound("triple " + std::string(triple_id) + " does not exist");
  const SessionNode* session = find_session(session_id);
  if (!session) throw NotFound("session " + std::string(session_id) + " does not exist");
  const Chunk* chunk = find_chunk(chunk_id);
  if (!chunk) throw NotFound("chunk " + std::string(chunk_id) + " does not exist");

  bool new_session = !triple->session_ids.count(std::string(session_id));
  bool new_chunk = !triple->chunk_ids.count(std::string(chunk_id));
  if (!new_session && !new_chunk) return false;

  auto t = std::make_shared<Triple>(*triple);
  if (new_session) {
    t->session_ids.insert(std::string(session_id));
    auto s = std::make_shared<SessionNode>(*session);
    s->triple_ids.insert(t->triple_id);
    sessions_[s->session_id] = std::move(s);
    ++hyperlinks_;
  }
  if (new_chunk) {
    t->chunk_ids.insert(std::string(chunk_id));
    auto c = std::make_shared<Chunk>(*chunk);
    c->triple_ids.insert(t->triple_id);
    chunks_[c->chunk_id] = std::move(c);
    ++hyperlinks_;
  }
  triples_[t->triple_id] = std::move(t);
  return true;
}

void GraphState::remember_idempotent(std::string key, IngestReport report) {
  idempotency_[std::move(key)] = std::move(report);
}

void GraphState::restore(std::vector<SessionNode> sessions, std::vector<EntityNode> entities,
                         std::vector<Triple> triples, std::vector<Chunk> chunks) {
  sessions_.clear();
  entities_.clear();
  triples_.clear();
  chunks_.clear();
  by_entity_.clear();
  by_pair_.clear();
  hyperlinks_ = 0;
  for (auto& s : sessions) {
    std::string id = s.session_id;
    sessions_[id] = std::make_shared<SessionNode>(std::move(s));
  }
  for (auto& e : entities) {
    std::string id = e.entity_id;
    entities_[id] = std::make_shared<EntityNode>(std::move(e));
  }
  for (auto& c : chunks) {
    std::string id = c.chunk_id;
    chunks_[id] = std::make_shared<Chunk>(std::move(c));
  }
  for (auto& t : triples) {
    std::string id = t.triple_id;
    hyperlinks_ += t.session_ids.size() + t.chunk_ids.size();
    index_triple(t);
    triples_[id] = std::make_shared<Triple>(std::move(t));
  }
}

// Transaction

std::pair<const SessionNode*, bool> Transaction::upsert_session(std::string_view session_id,
                                                                std::string summary,
                                                                const std::set<std::string>& keys,
                                                                Timestamp ts,
                                                                Embedding summary_embedding) {
  auto result = state_.upsert_session(session_id, summary, keys, ts, summary_embedding);
  events_.push_back(SessionUpserted{std::string(session_id), std::move(summary),
                                    result.first->keys, ts, std::move(summary_embedding)});
  return result;
}

const Chunk& Transaction::insert_chunk(std::string_view session_id, std::string text,
                                       std::vector<SpeakerTurn> speaker_turns, Timestamp ts,
                                       std::optional<std::string> idempotency_key) {
  const Chunk& c = state_.insert_chunk(session_id, text, speaker_turns, ts);
  events_.push_back(ChunkInserted{c.chunk_id, std::string(session_id), std::move(text),
                                  std::move(speaker_turns), ts, std::move(idempotency_key),
                                  std::nullopt});
  return c;
}

const Triple& Transaction::insert_triple(std::string_view subject, std::string_view subject_type,
                                         std::string_view relation, std::string_view object,
                                         std::string_view object_type,
                                         std::string_view session_id, std::string_view chunk_id,
                                         Timestamp ts, Embedding embedding) {
  const Triple& t = state_.insert_triple(subject, subject_type, relation, object, object_type,
                                         session_id, chunk_id, ts, embedding);
  const EntityNode* s = state_.find_entity(t.subject_id);
  const EntityNode* o = state_.find_entity(t.object_id);
  events_.push_back(TripleInserted{t.triple_id, std::string(text::trim(subject)),
                                   s->entity_type, t.relation, std::string(text::trim(object)),
                                   o->entity_type, std::string(session_id),
                                   std::string(chunk_id), ts, std::move(embedding)});
  return t;
}

bool Transaction::add_hyperlink(std::string_view triple_id, std::string_view session_id,
                                std::string_view chunk_id) {
  bool changed = state_.add_hyperlink(triple_id, session_id, chunk_id);
  if (changed) {
    events_.push_back(HyperlinkAdded{std::string(triple_id), std::string(session_id),
                                     std::string(chunk_id)});
  }
  return changed;
}

void Transaction::record_report(const std::string& idempotency_key, const IngestReport& report) {
  for (GraphEvent& e : events_) {
    if (auto* c = std::get_if<ChunkInserted>(&e);
        c && c->idempotency_key && *c->idempotency_key == idempotency_key) {
      c->report = report;
      state_.remember_idempotent(idempotency_key, report);
      return;
    }
  }
  throw std::logic_error("no chunk event carries idempotency key " + idempotency_key);
}

// GraphStore

GraphSnapshot GraphStore::snapshot() const {
  std::lock_guard lock(mu_);
  return current_;
}

std::uint64_t GraphStore::commit(Transaction&& txn) {
  std::lock_guard lock(mu_);
  if (txn.base_version_ != current_->version()) {
    throw std::logic_error("stale transaction: base version " + std::to_string(txn.base_version_) +
                           ", current " + std::to_string(current_->version()));
  }
  if (txn.events_.empty()) return current_->version();
  txn.state_.bump_version();
  current_ = std::make_shared<const GraphState>(std::move(txn.state_));
  return current_->version();
}

std::vector<GraphEvent> GraphStore::write(const std::function<void(Transaction&)>& fn) {
  Transaction txn = begin();
  fn(txn);
  std::vector<GraphEvent> events = txn.events();
  commit(std::move(txn));
  return events;
}

void GraphStore::reset(GraphState state) {
  std::lock_guard lock(mu_);
  current_ = std::make_shared<const GraphState>(std::move(state));
}

}  // namespace hmem
