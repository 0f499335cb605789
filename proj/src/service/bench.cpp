#include "hmem/service/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "hmem/error.hpp"
#include "hmem/service/engine.hpp"
#include "hmem/service/json_api.hpp"
#include "hmem/text.hpp"

namespace hmem {

namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string str(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw InvalidArgument(where + ": " + key + " must be a string");
  return it->get<std::string>();
}

std::vector<std::string> str_list(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return {};
  if (!it->is_array()) throw InvalidArgument(where + ": " + key + " must be an array of strings");
  std::vector<std::string> out;
  for (const Json& v : *it) {
    if (!v.is_string()) throw InvalidArgument(where + ": " + key + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

}  // namespace

std::size_t Dataset::chunk_count() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const DatasetRecord& r) {
    return std::holds_alternative<DatasetChunk>(r);
  }));
}

std::size_t Dataset::question_count() const { return records.size() - chunk_count(); }

Dataset parse_dataset(std::string_view jsonl) {
  Dataset d;
  std::set<std::string> chunk_ids, session_ids, qids;
  std::map<std::string, std::size_t> per_session;
  std::size_t line_no = 0;
  for (std::string_view line : text::split_lines(jsonl)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InvalidArgument(where + ": not a JSON object");
    const std::string type = str(j, "type", where);
    if (type == "chunk") {
      DatasetChunk c;
      c.session_id = str(j, "session_id", where);
      if (!j.contains("ts")) throw InvalidArgument(where + ": ts required");
      c.ts = api::parse_timestamp(j["ts"], where + ": ts");
      auto turns = j.find("turns");
      if (turns == j.end() || !turns->is_array() || turns->empty()) {
        throw InvalidArgument(where + ": turns must be a non-empty array");
      }
      for (const Json& t : *turns) {
        if (!t.is_object()) throw InvalidArgument(where + ": each turn must be an object");
        c.turns.push_back({str(t, "speaker", where), str(t, "text", where)});
      }
      std::size_t n = ++per_session[c.session_id];
      c.chunk_id = j.contains("chunk_id") ? str(j, "chunk_id", where) : c.session_id + "#" + std::to_string(n);
      if (!chunk_ids.insert(c.chunk_id).second) throw InvalidArgument(where + ": duplicate chunk_id " + c.chunk_id);
      session_ids.insert(c.session_id);
      d.records.emplace_back(std::move(c));
    } else if (type == "question") {
      DatasetQuestion q;
      q.qid = str(j, "qid", where);
      if (!qids.insert(q.qid).second) throw InvalidArgument(where + ": duplicate qid " + q.qid);
      if (!j.contains("ts")) throw InvalidArgument(where + ": ts required");
      q.ts = api::parse_timestamp(j["ts"], where + ": ts");
      q.text = str(j, "text", where);
      if (text::trim(q.text).empty()) throw InvalidArgument(where + ": text must be non-empty");
      q.evidence_session_ids = str_list(j, "evidence_session_ids", where);
      q.evidence_chunk_ids = str_list(j, "evidence_chunk_ids", where);
      for (const std::string& s : q.evidence_session_ids) {
        if (!session_ids.count(s)) throw InvalidArgument(where + ": evidence session " + s + " not seen earlier");
      }
      for (const std::string& c : q.evidence_chunk_ids) {
        if (!chunk_ids.count(c)) throw InvalidArgument(where + ": evidence chunk " + c + " not seen earlier");
      }
      if (auto a = j.find("answer"); a != j.end() && !a->is_null()) q.answer = str(j, "answer", where);
      d.records.emplace_back(std::move(q));
    } else {
      throw InvalidArgument(where + ": unknown record type \"" + type + "\"");
    }
  }
  return d;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_dataset(data);
}

double compute_recall(std::span<const QuestionRow> rows, std::size_t k) {
  if (rows.empty()) throw InvalidArgument("compute_recall needs at least one row");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  std::size_t hits = 0;
  for (const QuestionRow& r : rows) hits += r.hit_rank && *r.hit_rank <= k;
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

BenchAggregate aggregate(std::span<const QuestionRow> questions, std::span<const SessionRow> sessions,
                         std::size_t k) {
  BenchAggregate a;
  a.questions = questions.size();
  a.k = k;
  std::vector<double> latency, tokens, s_tokens, s_ms;
  std::size_t session_hits = 0;
  for (const QuestionRow& q : questions) {
    latency.push_back(q.latency_ms);
    tokens.push_back(static_cast<double>(q.context_tokens));
    session_hits += q.sessions_hit;
  }
  for (const SessionRow& s : sessions) {
    s_tokens.push_back(static_cast<double>(s.ingest_tokens));
    s_ms.push_back(s.ingest_ms);
  }
  if (!questions.empty()) {
    a.recall_at_k = compute_recall(questions, k);
    a.sessions_hit_rate = static_cast<double>(session_hits) / static_cast<double>(questions.size());
  }
  a.mean_latency_ms = mean(latency);
  a.median_latency_ms = median(latency);
  a.mean_context_tokens = mean(tokens);
  a.mean_session_ingest_tokens = mean(s_tokens);
  a.mean_session_ingest_ms = mean(s_ms);
  return a;
}

BenchReport run_bench(const Dataset& dataset, const EngineConfig& config,
                      std::unique_ptr<ExtractionBackend> backend, std::string dataset_name) {
  EngineConfig cfg = config;
  cfg.data_dir.clear();
  MemoryEngine engine(cfg, std::move(backend));
  const std::size_t k = cfg.scoring.top_k();

  BenchReport report;
  report.dataset = std::move(dataset_name);
  std::map<std::string, std::string> engine_to_dataset;
  std::map<std::string, SessionRow> sessions;
  std::vector<std::string> session_order;

  for (const DatasetRecord& rec : dataset.records) {
    if (const auto* c = std::get_if<DatasetChunk>(&rec)) {
      IngestRequest req{c->session_id, c->turns, c->ts, std::nullopt};
      auto start = Clock::now();
      IngestReport r = engine.ingest(req);
      double ms = ms_since(start);
      engine_to_dataset[r.chunk_id] = c->chunk_id;
      auto [it, fresh] = sessions.try_emplace(c->session_id);
      if (fresh) {
        it->second.session_id = c->session_id;
        session_order.push_back(c->session_id);
      }
      it->second.chunks += 1;
      it->second.ingest_tokens += r.token_estimate;
      it->second.ingest_ms += ms;
      continue;
    }
    const auto& q = std::get<DatasetQuestion>(rec);
    GraphSnapshot snap = engine.snapshot();
    Query query;
    query.text = q.text;
    query.query_ts = q.ts;
    auto start = Clock::now();
    RetrievalResult r = engine.retriever().retrieve(query, snap);
    QuestionRow row;
    row.latency_ms = ms_since(start);
    row.qid = q.qid;
    row.ranked_count = r.ranked.size();
    row.facts_lines = r.context.fact_ids.size();
    row.context_tokens = r.context.token_estimate;

    const std::set<std::string> evidence(q.evidence_chunk_ids.begin(), q.evidence_chunk_ids.end());
    const std::set<std::string> in_context(r.context.chunk_ids.begin(), r.context.chunk_ids.end());
    for (const std::string& cid : r.context.chunk_ids) row.retrieved_chunk_ids.push_back(engine_to_dataset[cid]);
    for (std::size_t i = 0; i < r.ranked.size() && !row.hit_rank; ++i) {
      const Triple* t = snap->find_triple(r.ranked[i].triple_id);
      for (const std::string& cid : t->chunk_ids) {
        if (in_context.count(cid) && evidence.count(engine_to_dataset[cid])) {
          row.hit_rank = i + 1;
          break;
        }
      }
    }
    row.recall_hit = row.hit_rank && *row.hit_rank <= k;
    for (const SessionScore& s : r.sessions_used) {
      if (std::find(q.evidence_session_ids.begin(), q.evidence_session_ids.end(), s.session_id) !=
          q.evidence_session_ids.end()) {
        row.sessions_hit = true;
      }
    }
    report.questions.push_back(std::move(row));
  }
  for (const std::string& s : session_order) report.sessions.push_back(sessions[s]);
  report.aggregate = aggregate(report.questions, report.sessions, k);
  return report;
}

Json to_json(const BenchReport& report) {
  Json questions = Json::array(), sessions = Json::array();
  for (const QuestionRow& q : report.questions) {
    questions.push_back({{"qid", q.qid},
                         {"hit_rank", q.hit_rank ? Json(*q.hit_rank) : Json(nullptr)},
                         {"recall_hit", q.recall_hit},
                         {"sessions_hit", q.sessions_hit},
                         {"ranked_count", q.ranked_count},
                         {"facts_lines", q.facts_lines},
                         {"K_R", q.context_tokens},
                         {"T_R_ms", q.latency_ms},
                         {"retrieved_chunk_ids", q.retrieved_chunk_ids}});
  }
  for (const SessionRow& s : report.sessions) {
    sessions.push_back(
        {{"session_id", s.session_id}, {"chunks", s.chunks}, {"K_G", s.ingest_tokens}, {"T_G_ms", s.ingest_ms}});
  }
  const BenchAggregate& a = report.aggregate;
  return {{"format_version", 1},
          {"dataset", report.dataset},
          {"questions", std::move(questions)},
          {"sessions", std::move(sessions)},
          {"aggregate",
           {{"questions", a.questions},
            {"k", a.k},
            {"recall_at_k", a.recall_at_k},
            {"sessions_hit_rate", a.sessions_hit_rate},
            {"mean_T_R_ms", a.mean_latency_ms},
            {"median_T_R_ms", a.median_latency_ms},
            {"mean_K_R", a.mean_context_tokens},
            {"mean_K_G", a.mean_session_ingest_tokens},
            {"mean_T_G_ms", a.mean_session_ingest_ms}}}};
}

Json mask_timings(Json report) {
  for (Json& q : report["questions"]) q["T_R_ms"] = 0;
  for (Json& s : report["sessions"]) s["T_G_ms"] = 0;
  for (const char* key : {"mean_T_R_ms", "median_T_R_ms", "mean_T_G_ms"}) report["aggregate"][key] = 0;
  return report;
}

}  // namespace hmem
