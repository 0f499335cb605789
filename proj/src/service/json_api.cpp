#include "hmem/service/json_api.hpp"

#include <algorithm>

#include "hmem/error.hpp"
#include "hmem/text.hpp"
#include "hmem/persistence/codec.hpp"

namespace hmem::api {

namespace {

void require_object(const Json& body) {
  if (!body.is_object()) throw InvalidArgument("body: must be a JSON object");
}

void reject_unknown(const Json& body, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : body.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidArgument(key + ": unknown field");
    }
  }
}

std::string string_field(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end()) throw InvalidArgument(std::string(key) + ": required");
  if (!it->is_string()) throw InvalidArgument(std::string(key) + ": must be a string");
  return it->get<std::string>();
}

std::size_t positive_integer(const Json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw InvalidArgument(field + ": must be a positive integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

Timestamp parse_timestamp(const Json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<Timestamp>();
  if (v.is_string()) {
    if (auto ts = parse_iso8601(v.get<std::string>())) return *ts;
    throw InvalidArgument(field + ": not an ISO-8601 timestamp: \"" + v.get<std::string>() + "\"");
  }
  throw InvalidArgument(field + ": must be integer seconds or an ISO-8601 string");
}

IngestRequest parse_ingest_request(const Json& body) {
  require_object(body);
  reject_unknown(body, {"session_id", "speaker_turns", "ts", "idempotency_key"});
  IngestRequest req;
  req.session_id = string_field(body, "session_id");
  auto turns = body.find("speaker_turns");
  if (turns == body.end()) throw InvalidArgument("speaker_turns: required");
  if (!turns->is_array()) throw InvalidArgument("speaker_turns: must be an array");
  for (std::size_t i = 0; i < turns->size(); ++i) {
    const Json& t = (*turns)[i];
    const std::string at = "speaker_turns[" + std::to_string(i) + "]";
    if (!t.is_object()) throw InvalidArgument(at + ": must be an object");
    auto sp = t.find("speaker");
    auto ut = t.find("utterance");
    if (sp == t.end() || !sp->is_string()) throw InvalidArgument(at + ".speaker: must be a string");
    if (ut == t.end() || !ut->is_string()) throw InvalidArgument(at + ".utterance: must be a string");
    req.speaker_turns.push_back({sp->get<std::string>(), ut->get<std::string>()});
  }
  auto ts = body.find("ts");
  if (ts == body.end()) throw InvalidArgument("ts: required");
  req.ts = parse_timestamp(*ts, "ts");
  auto key = body.find("idempotency_key");
  if (key != body.end() && !key->is_null()) {
    if (!key->is_string()) throw InvalidArgument("idempotency_key: must be a string");
    req.idempotency_key = key->get<std::string>();
  }
  try {
    validate(req);
  } catch (const InvalidArgument& e) {
    // Report the shared validation failure under this API's field names.
    std::string msg = e.what();
    if (msg.rfind("turns", 0) == 0) msg = "speaker_" + msg;
    if (auto p = msg.find(".text:"); p != std::string::npos) msg.replace(p, 5, ".utterance");
    throw InvalidArgument(msg);
  }
  return req;
}

Json to_json(const IngestReport& report) { return codec::encode_report(report); }

QueryRequest parse_query_request(const Json& body) {
  require_object(body);
  reject_unknown(body, {"text", "ts", "top_k", "session_filter", "budget_tokens", "with_timings"});
  QueryRequest r;
  r.query.text = string_field(body, "text");
  if (text::trim(r.query.text).empty()) throw InvalidArgument("text: must be non-empty");
  if (auto it = body.find("ts"); it != body.end() && !it->is_null()) r.query.query_ts = parse_timestamp(*it, "ts");
  if (auto it = body.find("top_k"); it != body.end() && !it->is_null()) {
    r.query.top_k = positive_integer(*it, "top_k");
  }
  if (auto it = body.find("budget_tokens"); it != body.end() && !it->is_null()) {
    r.query.budget_tokens = positive_integer(*it, "budget_tokens");
  }
  if (auto it = body.find("session_filter"); it != body.end() && !it->is_null()) {
    if (!it->is_array()) throw InvalidArgument("session_filter: must be an array of strings");
    std::set<std::string> ids;
    for (const Json& s : *it) {
      if (!s.is_string()) throw InvalidArgument("session_filter: must be an array of strings");
      ids.insert(s.get<std::string>());
    }
    r.query.session_filter = std::move(ids);
  }
  if (auto it = body.find("with_timings"); it != body.end()) {
    if (!it->is_boolean()) throw InvalidArgument("with_timings: must be a boolean");
    r.with_timings = it->get<bool>();
  }
  return r;
}

Json to_json(const RetrievalResult& result, const GraphState& graph, bool with_timings) {
  Json ranked = Json::array();
  for (const ScoredCandidate& c : result.ranked) {
    const Triple* t = graph.find_triple(c.triple_id);
    Json row = {{"triple_id", c.triple_id},
                {"ts", c.ts},
                {"S_s", c.session_score},
                {"S_t", c.triple_score},
                {"S_sem", c.semantic},
                {"delta_tau", c.delta_tau},
                {"w", c.weight},
                {"R", c.relevance}};
    if (t) {
      row["subject"] = graph.find_entity(t->subject_id)->name;
      row["relation"] = t->relation;
      row["object"] = graph.find_entity(t->object_id)->name;
      row["session_ids"] = t->session_ids;
      row["chunk_ids"] = t->chunk_ids;
    }
    ranked.push_back(std::move(row));
  }
  Json sessions = Json::array();
  for (const SessionScore& s : result.sessions_used) {
    sessions.push_back({{"session_id", s.session_id}, {"S_s", s.score}});
  }
  const StructuredContext& ctx = result.context;
  Json out = {{"ranked", std::move(ranked)},
              {"sessions_used", std::move(sessions)},
              {"tau_hat", result.temporal.tau_hat},
              {"query_ts", result.analysis.query_ts},
              {"graph_version", result.graph_version},
              {"candidate_count", result.candidate_count},
              {"degraded", result.analysis.degraded},
              {"keyword_fallback", result.analysis.keyword_fallback},
              {"context", ctx.text},
              {"context_format", StructuredContext::kFormatVersion},
              {"token_estimate", ctx.token_estimate},
              {"context_session_ids", ctx.session_ids},
              {"context_chunk_ids", ctx.chunk_ids},
              {"dropped_chunk_ids", ctx.dropped_chunks}};
  if (with_timings) {
    const StageTimings& t = result.timings;
    out["timings"] = {{"process_query_ms", t.process_query_ms}, {"select_sessions_ms", t.select_sessions_ms},
                      {"gather_ms", t.gather_ms},               {"rerank_ms", t.rerank_ms},
                      {"assemble_ms", t.assemble_ms},           {"total_ms", t.total_ms}};
  }
  return out;
}

Json session_view(const SessionNode& s) {
  return {{"session_id", s.session_id},
          {"summary", s.summary},
          {"keys", s.keys},
          {"first_ts", s.first_ts},
          {"last_ts", s.last_ts},
          {"chunk_count", s.chunk_ids.size()},
          {"triple_count", s.triple_ids.size()},
          {"chunk_ids", s.chunk_ids}};
}

Json to_json(const EngineStats& s) {
  return {{"sessions", s.sessions},     {"entities", s.entities},   {"triples", s.triples},
          {"chunks", s.chunks},         {"hyperlinks", s.hyperlinks}, {"graph_version", s.graph_version},
          {"queue_depth", s.queue_depth}, {"log_seq", s.log_seq}};
}

Json error_body(std::string_view code, std::string_view message) {
  return {{"error", {{"code", std::string(code)}, {"message", std::string(message)}}}};
}

}  // namespace hmem::api
