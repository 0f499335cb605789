#include "hmem/persistence/codec.hpp"

#include "hmem/error.hpp"

namespace hmem::codec {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <class T>
T field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw CorruptData(std::string("missing field ") + key);
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw CorruptData(std::string("bad type for field ") + key);
  }
}

Embedding embedding_field(const Json& j, const char* key) {
  return Embedding::from_hex(field<std::string>(j, key));
}

Json encode_session(const SessionNode& s) {
  return {{"session_id", s.session_id},
          {"summary", s.summary},
          {"keys", s.keys},
          {"first_ts", s.first_ts},
          {"last_ts", s.last_ts},
          {"triple_ids", s.triple_ids},
          {"chunk_ids", s.chunk_ids},
          {"summary_embedding", s.summary_embedding.to_hex()}};
}

SessionNode decode_session(const Json& j) {
  SessionNode s;
  s.session_id = field<std::string>(j, "session_id");
  s.summary = field<std::string>(j, "summary");
  s.keys = field<std::set<std::string>>(j, "keys");
  s.first_ts = field<Timestamp>(j, "first_ts");
  s.last_ts = field<Timestamp>(j, "last_ts");
  s.triple_ids = field<std::set<std::string>>(j, "triple_ids");
  s.chunk_ids = field<std::vector<std::string>>(j, "chunk_ids");
  s.summary_embedding = embedding_field(j, "summary_embedding");
  return s;
}

Json encode_triple(const Triple& t) {
  return {{"triple_id", t.triple_id},
          {"subject_id", t.subject_id},
          {"relation", t.relation},
          {"object_id", t.object_id},
          {"session_ids", t.session_ids},
          {"chunk_ids", t.chunk_ids},
          {"ts", t.ts},
          {"relation_embedding", t.relation_embedding.to_hex()}};
}

Triple decode_triple(const Json& j) {
  Triple t;
  t.triple_id = field<std::string>(j, "triple_id");
  t.subject_id = field<std::string>(j, "subject_id");
  t.relation = field<std::string>(j, "relation");
  t.object_id = field<std::string>(j, "object_id");
  t.session_ids = field<std::set<std::string>>(j, "session_ids");
  t.chunk_ids = field<std::set<std::string>>(j, "chunk_ids");
  t.ts = field<Timestamp>(j, "ts");
  t.relation_embedding = embedding_field(j, "relation_embedding");
  return t;
}

Json encode_chunk(const Chunk& c) {
  return {{"chunk_id", c.chunk_id},         {"session_id", c.session_id},
          {"text", c.text},                 {"ts", c.ts},
          {"speaker_turns", encode_turns(c.speaker_turns)}, {"triple_ids", c.triple_ids}};
}

Chunk decode_chunk(const Json& j) {
  Chunk c;
  c.chunk_id = field<std::string>(j, "chunk_id");
  c.session_id = field<std::string>(j, "session_id");
  c.text = field<std::string>(j, "text");
  c.ts = field<Timestamp>(j, "ts");
  c.speaker_turns = decode_turns(field<Json>(j, "speaker_turns"));
  c.triple_ids = field<std::set<std::string>>(j, "triple_ids");
  return c;
}

}  // namespace

Json encode_turns(const std::vector<SpeakerTurn>& turns) {
  Json out = Json::array();
  for (const SpeakerTurn& t : turns) out.push_back({{"speaker", t.speaker}, {"utterance", t.utterance}});
  return out;
}

std::vector<SpeakerTurn> decode_turns(const Json& j) {
  if (!j.is_array()) throw CorruptData("speaker_turns must be an array");
  std::vector<SpeakerTurn> out;
  for (const Json& t : j) out.push_back({field<std::string>(t, "speaker"), field<std::string>(t, "utterance")});
  return out;
}

Json encode_report(const IngestReport& r) {
  return {{"chunk_id", r.chunk_id},
          {"session_created", r.session_created},
          {"triples_added", r.triples_added},
          {"triples_merged", r.triples_merged},
          {"summary_updated", r.summary_updated},
          {"elapsed_ms", r.elapsed_ms},
          {"token_estimate", r.token_estimate}};
}

IngestReport decode_report(const Json& j) {
  IngestReport r;
  r.chunk_id = field<std::string>(j, "chunk_id");
  r.session_created = field<bool>(j, "session_created");
  r.triples_added = field<std::size_t>(j, "triples_added");
  r.triples_merged = field<std::size_t>(j, "triples_merged");
  r.summary_updated = field<bool>(j, "summary_updated");
  r.elapsed_ms = field<std::int64_t>(j, "elapsed_ms");
  r.token_estimate = field<std::size_t>(j, "token_estimate");
  return r;
}

Json encode_payload(const GraphEvent& event) {
  return std::visit(
      Overloaded{
          [](const SessionUpserted& e) -> Json {
            return {{"session_id", e.session_id},
                    {"summary", e.summary},
                    {"keys", e.keys},
                    {"ts", e.ts},
                    {"summary_embedding", e.summary_embedding.to_hex()}};
          },
          [](const ChunkInserted& e) -> Json {
            Json j = {{"chunk_id", e.chunk_id},
                      {"session_id", e.session_id},
                      {"text", e.text},
                      {"speaker_turns", encode_turns(e.speaker_turns)},
                      {"ts", e.ts},
                      {"idempotency_key", nullptr},
                      {"report", nullptr}};
            if (e.idempotency_key) j["idempotency_key"] = *e.idempotency_key;
            if (e.report) j["report"] = encode_report(*e.report);
            return j;
          },
          [](const TripleInserted& e) -> Json {
            return {{"triple_id", e.triple_id},
                    {"subject", e.subject},
                    {"subject_type", e.subject_type},
                    {"relation", e.relation},
                    {"object", e.object},
                    {"object_type", e.object_type},
                    {"session_id", e.session_id},
                    {"chunk_id", e.chunk_id},
                    {"ts", e.ts},
                    {"relation_embedding", e.relation_embedding.to_hex()}};
          },
          [](const HyperlinkAdded& e) -> Json {
            return {{"triple_id", e.triple_id}, {"session_id", e.session_id}, {"chunk_id", e.chunk_id}};
          },
      },
      event);
}

GraphEvent decode_payload(std::string_view kind, const Json& p) {
  if (!p.is_object()) throw CorruptData("payload must be an object");
  if (kind == "session_upserted") {
    return SessionUpserted{field<std::string>(p, "session_id"), field<std::string>(p, "summary"),
                           field<std::set<std::string>>(p, "keys"), field<Timestamp>(p, "ts"),
                           embedding_field(p, "summary_embedding")};
  }
  if (kind == "chunk_inserted") {
    ChunkInserted e;
    e.chunk_id = field<std::string>(p, "chunk_id");
    e.session_id = field<std::string>(p, "session_id");
    e.text = field<std::string>(p, "text");
    e.speaker_turns = decode_turns(field<Json>(p, "speaker_turns"));
    e.ts = field<Timestamp>(p, "ts");
    Json key = field<Json>(p, "idempotency_key");
    if (!key.is_null()) e.idempotency_key = field<std::string>(p, "idempotency_key");
    Json report = field<Json>(p, "report");
    if (!report.is_null()) e.report = decode_report(report);
    return e;
  }
  if (kind == "triple_inserted") {
    return TripleInserted{field<std::string>(p, "triple_id"),  field<std::string>(p, "subject"),
                          field<std::string>(p, "subject_type"), field<std::string>(p, "relation"),
                          field<std::string>(p, "object"),     field<std::string>(p, "object_type"),
                          field<std::string>(p, "session_id"), field<std::string>(p, "chunk_id"),
                          field<Timestamp>(p, "ts"),           embedding_field(p, "relation_embedding")};
  }
  if (kind == "hyperlink_added") {
    return HyperlinkAdded{field<std::string>(p, "triple_id"), field<std::string>(p, "session_id"),
                          field<std::string>(p, "chunk_id")};
  }
  throw CorruptData("unknown event kind " + std::string(kind));
}

std::string encode_record(const LogRecord& r) {
  Json j = {{"format_version", kFormatVersion},
            {"seq", r.seq},
            {"kind", std::string(event_kind(r.event))},
            {"payload", encode_payload(r.event)},
            {"wall_ts", r.wall_ts},
            {"batch", r.batch},
            {"batch_len", r.batch_len}};
  return j.dump();
}

LogRecord decode_record(std::string_view line) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw CorruptData("log line is not a JSON object");
  if (field<int>(j, "format_version") != kFormatVersion) {
    throw CorruptData("unsupported log format_version");
  }
  LogRecord r;
  r.seq = field<std::uint64_t>(j, "seq");
  r.event = decode_payload(field<std::string>(j, "kind"), field<Json>(j, "payload"));
  r.wall_ts = field<Timestamp>(j, "wall_ts");
  r.batch = field<std::uint64_t>(j, "batch");
  r.batch_len = field<std::uint32_t>(j, "batch_len");
  if (r.seq == 0 || r.batch == 0 || r.batch > r.seq || r.batch_len == 0 ||
      r.seq - r.batch >= r.batch_len) {
    throw CorruptData("inconsistent seq/batch fields");
  }
  return r;
}

Json encode_graph(const GraphState& g) {
  Json sessions = Json::array(), entities = Json::array(), triples = Json::array(),
       chunks = Json::array(), idem = Json::object();
  for (const auto& [id, s] : g.sessions()) sessions.push_back(encode_session(*s));
  for (const auto& [id, e] : g.entities()) {
    entities.push_back({{"entity_id", e->entity_id}, {"name", e->name}, {"entity_type", e->entity_type}});
  }
  for (const auto& [id, t] : g.triples()) triples.push_back(encode_triple(*t));
  for (const auto& [id, c] : g.chunks()) chunks.push_back(encode_chunk(*c));
  for (const auto& [key, r] : g.idempotency()) idem[key] = encode_report(r);
  return {{"graph_version", g.version()},
          {"counters", {{"next_chunk", g.next_chunk_seq()}, {"next_triple", g.next_triple_seq()}}},
          {"sessions", std::move(sessions)},
          {"entities", std::move(entities)},
          {"triples", std::move(triples)},
          {"chunks", std::move(chunks)},
          {"idempotency", std::move(idem)}};
}

GraphState decode_graph(const Json& j) {
  if (!j.is_object()) throw CorruptData("graph must be an object");
  std::vector<SessionNode> sessions;
  std::vector<EntityNode> entities;
  std::vector<Triple> triples;
  std::vector<Chunk> chunks;
  for (const Json& s : field<Json>(j, "sessions")) sessions.push_back(decode_session(s));
  for (const Json& e : field<Json>(j, "entities")) {
    entities.push_back({field<std::string>(e, "entity_id"), field<std::string>(e, "name"),
                        field<std::string>(e, "entity_type")});
  }
  for (const Json& t : field<Json>(j, "triples")) triples.push_back(decode_triple(t));
  for (const Json& c : field<Json>(j, "chunks")) chunks.push_back(decode_chunk(c));

  GraphState g;
  g.restore(std::move(sessions), std::move(entities), std::move(triples), std::move(chunks));
  Json counters = field<Json>(j, "counters");
  g.set_counters(field<std::uint64_t>(counters, "next_chunk"), field<std::uint64_t>(counters, "next_triple"));
  const Json idem = field<Json>(j, "idempotency");
  if (!idem.is_object()) throw CorruptData("idempotency must be an object");
  for (const auto& [key, r] : idem.items()) g.remember_idempotent(key, decode_report(r));
  g.set_version(field<std::uint64_t>(j, "graph_version"));
  return g;
}

std::string canonical_serialize(const GraphState& g) { return encode_graph(g).dump(); }

}  // namespace hmem::codec
