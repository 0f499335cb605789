#include "hmem/retrieval/retriever.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "hmem/error.hpp"
#include "hmem/scoring/kernels.hpp"
#include "hmem/text.hpp"

namespace hmem {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

constexpr std::array<std::string_view, 12> kMonthNames = {
    "january", "february", "march", "april", "may", "june",
    "july", "august", "september", "october", "november", "december"};

unsigned month_number(std::string_view lower) {
  for (unsigned i = 0; i < kMonthNames.size(); ++i) {
    std::string_view full = kMonthNames[i];
    if (lower == full || (lower.size() >= 3 && full.substr(0, lower.size()) == lower &&
                          (lower.size() == 3 || lower == "sept"))) {
      return i + 1;
    }
  }
  return 0;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Timestamp month_start(int year, unsigned month) { return days_from_civil(year, month, 1); }

Timestamp next_month_start(int year, unsigned month) {
  return month == 12 ? days_from_civil(year + 1, 1, 1) : days_from_civil(year, month + 1, 1);
}

}  // namespace

std::optional<TimeHint> parse_time_hint(std::string_view phrase) {
  int year = 0;
  unsigned month = 0, day = 0;
  for (const text::Token& t : text::tokenize(phrase)) {
    std::string lower = text::to_lower(t.text);
    if (auto iso = parse_iso8601(lower)) {
      return TimeHint{std::string(phrase), *iso, *iso + 86399};
    }
    if (lower.size() == 7 && lower[4] == '-' && all_digits(lower.substr(0, 4)) &&
        all_digits(lower.substr(5))) {
      int y = std::stoi(lower.substr(0, 4));
      unsigned m = static_cast<unsigned>(std::stoi(lower.substr(5)));
      if (m >= 1 && m <= 12) {
        return TimeHint{std::string(phrase), month_start(y, m), next_month_start(y, m) - 1};
      }
    }
    if (unsigned m = month_number(lower)) {
      month = m;
      continue;
    }
    std::size_t digits = 0;
    while (digits < lower.size() && lower[digits] >= '0' && lower[digits] <= '9') ++digits;
    if (digits == 4 && digits == lower.size()) {
      year = std::stoi(lower);
    } else if (digits >= 1 && digits <= 2) {
      std::string suffix = lower.substr(digits);
      if (suffix.empty() || suffix == "st" || suffix == "nd" || suffix == "rd" || suffix == "th") {
        day = static_cast<unsigned>(std::stoi(lower.substr(0, digits)));
      }
    }
  }
  if (year < 1000 || year > 2999) return std::nullopt;
  if (month == 0) {
    return TimeHint{std::string(phrase), days_from_civil(year, 1, 1), days_from_civil(year + 1, 1, 1) - 1};
  }
  if (day >= 1 && day <= 31) {
    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
    if (ymd.ok()) {
      Timestamp b = days_from_civil(year, month, day);
      return TimeHint{std::string(phrase), b, b + 86399};
    }
  }
  return TimeHint{std::string(phrase), month_start(year, month), next_month_start(year, month) - 1};
}

Retriever::Retriever(ExtractionBackend& backend, RetrievalConfig config)
    : backend_(backend), config_(std::move(config)) {
  if (config_.entry_limit < 1) throw InvalidArgument("entry_limit must be >= 1");
}

std::size_t Retriever::count_tokens(std::string_view s) const {
  return config_.token_counter ? config_.token_counter(s) : text::estimate_tokens(s);
}

QueryAnalysis Retriever::process_query(const Query& q) const {
  if (text::trim(q.text).empty()) throw InvalidArgument("text: query must be non-empty");
  QueryAnalysis a;
  try {
    a.entities = backend_.extract_entities(q.text);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::backend_error && e.code() != ErrorCode::extraction_error) throw;
    a.degraded = true;
  }
  for (const ExtractedEntity& e : a.entities) {
    std::string c = text::canonicalize(e.name);
    if (!c.empty()) a.keys.insert(c);
    if (e.type == "time") {
      if (auto hint = parse_time_hint(e.name)) a.hints.push_back(*hint);
    }
  }
  if (a.keys.empty()) {
    a.keyword_fallback = true;
    for (std::string& w : text::content_words(q.text)) a.keys.insert(std::move(w));
  }
  try {
    a.embedding = backend_.embed(q.text);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::backend_error && e.code() != ErrorCode::extraction_error) throw;
    a.degraded = true;
  }
  if (q.query_ts) {
    a.query_ts = *q.query_ts;
  } else if (!a.hints.empty()) {
    a.query_ts = std::max_element(a.hints.begin(), a.hints.end(), [](const TimeHint& x, const TimeHint& y) {
                   return x.end < y.end;
                 })->end;
  } else {
    a.query_ts = now_utc();
  }
  return a;
}

SessionRanking Retriever::select_sessions(const QueryAnalysis& analysis, const GraphState& graph,
                                          const std::optional<std::set<std::string>>& filter,
                                          std::size_t limit) const {
  std::vector<const SessionNode*> eligible;
  eligible.reserve(graph.sessions().size());
  for (const auto& [id, s] : graph.sessions()) {
    if (!filter || filter->count(id)) eligible.push_back(s.get());
  }
  SessionRanking r;
  r.all = rank_sessions(analysis.keys, analysis.embedding, eligible,
                        config_.scoring.session_key_weight());
  r.entry_count = std::min(limit, r.all.size());
  return r;
}

std::vector<GatheredCandidate> Retriever::gather_candidates(
    const QueryAnalysis& analysis, const SessionRanking& sessions, const GraphState& graph,
    const std::optional<std::set<std::string>>& filter) const {
  std::unordered_map<std::string_view, double> score_of;
  for (const SessionScore& s : sessions.all) score_of.emplace(s.session_id, s.score);

  std::set<std::string_view> ids;
  for (const std::string& key : analysis.keys) {
    for (const Triple* t : graph.neighbors(key)) ids.insert(t->triple_id);
  }
  for (std::size_t i = 0; i < sessions.entry_count; ++i) {
    const SessionNode* s = graph.find_session(sessions.all[i].session_id);
    for (const std::string& tid : s->triple_ids) ids.insert(tid);
  }
  if (ids.empty() && config_.chunk_fallback) {
    for (const auto& [id, t] : graph.triples()) ids.insert(t->triple_id);
  }

  std::vector<GatheredCandidate> out;
  out.reserve(ids.size());
  for (std::string_view id : ids) {
    const Triple* t = graph.find_triple(id);
    bool linked = false;
    double s_s = 0.0;
    for (const std::string& sid : t->session_ids) {
      if (filter && !filter->count(sid)) continue;
      auto it = score_of.find(sid);
      double v = it == score_of.end() ? 0.0 : it->second;
      s_s = linked ? std::max(s_s, v) : v;
      linked = true;
    }
    if (!linked) continue;
    out.push_back({t, s_s, 0.0, time_gap(analysis.query_ts, t->ts)});
  }

  std::vector<const Embedding*> rows;
  rows.reserve(out.size());
  for (const GatheredCandidate& c : out) rows.push_back(&c.triple->relation_embedding);
  std::vector<double> sims(out.size());
  kernels::parallel::cosine_batch(analysis.embedding, rows, sims);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].triple_score = cosine_to_unit(sims[i]);
  return out;
}

std::vector<ScoredCandidate> Retriever::rerank(const std::vector<GatheredCandidate>& candidates,
                                               const ScoringParams& params, Timestamp query_ts,
                                               TemporalContext* temporal) const {
  TemporalContext ctx{query_ts, 1.0};
  if (!candidates.empty()) {
    std::vector<std::int64_t> gaps;
    gaps.reserve(candidates.size());
    for (const GatheredCandidate& c : candidates) gaps.push_back(c.delta_tau);
    ctx.tau_hat = median_gap(std::span<const std::int64_t>(gaps));
  }
  if (temporal) *temporal = ctx;

  std::vector<kernels::CandidateInput> in;
  in.reserve(candidates.size());
  for (const GatheredCandidate& c : candidates) in.push_back({c.session_score, c.triple_score, c.delta_tau});
  std::vector<Relevance> rel(in.size());
  kernels::parallel::score_batch(in, ctx, params, rel);

  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const GatheredCandidate& c = candidates[i];
    scored.push_back({c.triple->triple_id, c.triple->ts, c.session_score, c.triple_score,
                      rel[i].semantic, c.delta_tau, rel[i].weight, rel[i].score});
  }
  return rank_candidates(std::move(scored), params.top_k());
}

StructuredContext Retriever::assemble_context(const std::vector<ScoredCandidate>& ranked,
                                              const GraphState& graph,
                                              std::optional<std::size_t> budget_tokens) const {
  StructuredContext ctx;
  std::unordered_set<std::string> seen_sessions, seen_chunks;
  std::vector<std::string> chunk_priority;

  std::string summaries = "[SESSION SUMMARIES]\n";
  std::string facts = "[FACTS]\n";
  for (const ScoredCandidate& c : ranked) {
    const Triple* t = graph.find_triple(c.triple_id);
    if (!t) continue;
    ctx.fact_ids.push_back(t->triple_id);
    const EntityNode* s = graph.find_entity(t->subject_id);
    const EntityNode* o = graph.find_entity(t->object_id);
    facts += "(" + s->name + ", " + t->relation + ", " + o->name + ") — ";
    for (const std::string& sid : t->session_ids) facts += sid + ", ";
    facts += format_iso8601(t->ts) + "\n";

    for (const std::string& sid : t->session_ids) {
      if (!seen_sessions.insert(sid).second) continue;
      const SessionNode* sess = graph.find_session(sid);
      ctx.session_ids.push_back(sid);
      summaries += sid + " (" + format_iso8601(sess->first_ts) + " .. " +
                   format_iso8601(sess->last_ts) + "): " + sess->summary + "\n";
    }
    for (const std::string& cid : t->chunk_ids) {
      if (seen_chunks.insert(cid).second) chunk_priority.push_back(cid);
    }
  }

  auto chronological = [&](std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
      const Chunk* x = graph.find_chunk(a);
      const Chunk* y = graph.find_chunk(b);
      if (x->ts != y->ts) return x->ts < y->ts;
      return a < b;
    });
    return ids;
  };
  auto render = [&](const std::vector<std::string>& chunk_ids) {
    std::string out = summaries + facts + "[SOURCE DIALOGUE]\n";
    for (const std::string& cid : chronological(chunk_ids)) {
      const Chunk* ch = graph.find_chunk(cid);
      out += "(" + ch->session_id + ", " + format_iso8601(ch->ts) + ")\n" + ch->text + "\n";
    }
    return out;
  };

  // Chunks enter in rank priority; the first one that overflows the budget
  // and every lower-ranked one after it are dropped.
  std::vector<std::string> kept;
  if (!budget_tokens) {
    kept = chunk_priority;
  } else {
    for (std::size_t i = 0; i < chunk_priority.size(); ++i) {
      kept.push_back(chunk_priority[i]);
      if (count_tokens(render(kept)) > *budget_tokens) {
        kept.pop_back();
        ctx.dropped_chunks.assign(chunk_priority.begin() + static_cast<std::ptrdiff_t>(i),
                                  chunk_priority.end());
        break;
      }
    }
  }
  ctx.chunk_ids = chronological(kept);
  ctx.text = render(kept);
  ctx.token_estimate = count_tokens(ctx.text);
  return ctx;
}

RetrievalResult Retriever::retrieve(const Query& q, const GraphSnapshot& snapshot) const {
  const auto start = Clock::now();
  const GraphState& graph = *snapshot;
  ScoringParams params = q.top_k ? config_.scoring.with_top_k(*q.top_k) : config_.scoring;

  RetrievalResult r;
  r.graph_version = graph.version();

  auto t = Clock::now();
  r.analysis = process_query(q);
  r.timings.process_query_ms = ms_since(t);

  t = Clock::now();
  SessionRanking sessions = select_sessions(r.analysis, graph, q.session_filter, config_.entry_limit);
  r.sessions_used = sessions.entries();
  r.timings.select_sessions_ms = ms_since(t);

  t = Clock::now();
  std::vector<GatheredCandidate> candidates =
      gather_candidates(r.analysis, sessions, graph, q.session_filter);
  r.candidate_count = candidates.size();
  r.timings.gather_ms = ms_since(t);

  t = Clock::now();
  r.ranked = rerank(candidates, params, r.analysis.query_ts, &r.temporal);
  r.timings.rerank_ms = ms_since(t);

  t = Clock::now();
  r.context = assemble_context(r.ranked, graph, q.budget_tokens ? q.budget_tokens : config_.budget_tokens);
  r.timings.assemble_ms = ms_since(t);
  r.timings.total_ms = ms_since(start);
  return r;
}

}  // namespace hmem
