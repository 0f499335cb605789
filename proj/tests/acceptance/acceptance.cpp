// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures, so ctest fails when any criterion fails.

#include <sys/stat.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "hmem/error.hpp"
#include "hmem/persistence/codec.hpp"
#include "hmem/persistence/event_log.hpp"
#include "hmem/persistence/snapshot.hpp"
#include "hmem/scoring/scoring.hpp"
#include "hmem/service/bench.hpp"
#include "hmem/service/engine.hpp"
#include "hmem/service/http_server.hpp"
#include "hmem/text.hpp"

using namespace hmem;
using hmem::testing::StubBackend;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Collects the first few failure messages of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (notes_.size() < 3) notes_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    std::ostringstream out;
    out << checks_ << " checks";
    if (failures_) {
      out << ", " << failures_ << " failed:";
      for (const auto& n : notes_) out << " [" << n << "]";
    }
    return out.str();
  }
  void note(std::string s) { extra_ = std::move(s); }
  const std::string& extra() const { return extra_; }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
  std::string extra_;
};

double unit_rand(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// 1. Scoring exactness.
void scoring_exactness(Check& c) {
  c.expect(std::fabs(semantic_fusion(1.0, 0.5) - 0.666667) <= 1e-6, "HM(1, 0.5)");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    double tau = 1.0 + unit_rand(rng) * 1e7;
    double k = 0.01 + unit_rand(rng) * 0.98;
    c.expect(std::fabs(temporal_weight(tau, tau, k) - std::exp(-1.0)) <= 1e-9, "w(tau, tau, k)");
    c.expect(std::fabs(temporal_weight(4 * tau, tau, 0.5) - std::exp(-2.0)) <= 1e-9, "w(4 tau, tau, 0.5)");
  }
}

// 2. Scoring properties over random cases.
void scoring_properties(Check& c) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    double a = unit_rand(rng), b = unit_rand(rng);
    double hm = semantic_fusion(a, b);
    c.expect(std::min(a, b) - 1e-15 <= hm && hm <= std::max(a, b) + 1e-15, "HM bounds");
    double a2 = std::min(1.0, a + unit_rand(rng) * (1 - a));
    double b2 = std::min(1.0, b + unit_rand(rng) * (1 - b));
    c.expect(semantic_fusion(a2, b) >= hm - 1e-15 && semantic_fusion(a, b2) >= hm - 1e-15, "HM monotone");

    double tau = 1 + unit_rand(rng) * 1e6, k = 0.01 + unit_rand(rng) * 0.98;
    double d1 = unit_rand(rng) * 1e6, d2 = d1 + 1 + unit_rand(rng) * 1e5;
    double w1 = temporal_weight(d1, tau, k), w2 = temporal_weight(d2, tau, k);
    // Strictness is only observable while w2 is representable above zero.
    c.expect(w2 < w1 || (w2 == 0.0 && w1 < 1e-300), "w strictly decreasing");

    TemporalContext ctx{0, tau};
    Relevance r = relevance(a, b, d1, ctx, ScoringParams(k, 15, 0.5));
    c.expect(r.score <= r.semantic + 1e-15 && r.score <= r.weight + 1e-15, "R <= S_sem and R <= w");
  }
  // Ranking invariance under a uniform shift of every timestamp.
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ScoredCandidate> base;
    const Timestamp q = 1'700'000'000;
    std::vector<std::int64_t> gaps;
    std::vector<std::pair<double, double>> sem;
    const int n = 2 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      gaps.push_back(static_cast<std::int64_t>(rng() % 86400000));
      sem.push_back({unit_rand(rng), unit_rand(rng)});
    }
    auto rank = [&](Timestamp shift) {
      std::vector<ScoredCandidate> cs;
      std::vector<std::int64_t> g;
      for (int i = 0; i < n; ++i) g.push_back(time_gap(q + shift, q - gaps[i] + shift));
      TemporalContext ctx{q + shift, median_gap(std::span<const std::int64_t>(g))};
      if (ctx.tau_hat <= 0) ctx.tau_hat = 1;
      for (int i = 0; i < n; ++i) {
        Relevance r = relevance(sem[i].first, sem[i].second, double(g[i]), ctx, ScoringParams{});
        cs.push_back({"t" + std::to_string(i), q - gaps[i] + shift, sem[i].first, sem[i].second, r.semantic,
                      g[i], r.weight, r.score});
      }
      std::vector<std::string> ids;
      for (const auto& x : rank_candidates(cs, 15)) ids.push_back(x.triple_id);
      return ids;
    };
    Timestamp shift = static_cast<Timestamp>(rng() % 100000000) - 50000000;
    c.expect(rank(0) == rank(shift), "rank invariant under shift");
  }
}

// 3. Ingesting the same session content twice merges every fact.
void dedup_idempotence(Check& c) {
  GraphStore store;
  StubBackend backend;
  std::size_t valid = 0;
  backend.triples_fn = [&](std::string_view text) {
    DeterministicBackend inner;
    auto ts = inner.extract_triples(text);
    valid = 0;
    for (const auto& t : ts) valid += canonicalize_triple(t).has_value();
    return ts;
  };
  UpdatePipeline p(store, backend);
  auto session = testing::synthetic_session("dup", 10, 77, 1'700'000'000);
  std::vector<std::string> first_chunks;
  for (const auto& req : session) {
    IngestReport r = p.ingest_chunk(req);
    c.expect(r.triples_added + r.triples_merged == valid, "conservation, first pass");
    first_chunks.push_back(r.chunk_id);
  }
  const std::size_t triples_after_first = store.snapshot()->triples().size();
  std::size_t merged_total = 0;
  for (std::size_t i = 0; i < session.size(); ++i) {
    IngestRequest req = session[i];
    req.ts += 86400;
    std::size_t links_before = store.snapshot()->hyperlink_count();
    IngestReport r = p.ingest_chunk(req);
    GraphSnapshot g = store.snapshot();
    c.expect(r.triples_added + r.triples_merged == valid, "conservation, second pass");
    c.expect(r.triples_added == 0, "second pass adds no triple in " + r.chunk_id);
    c.expect(r.chunk_id != first_chunks[i], "fresh chunk id");
    // Each merged fact gains a link to the new chunk.
    const Chunk* twin = g->find_chunk(first_chunks[i]);
    const Chunk* fresh = g->find_chunk(r.chunk_id);
    c.expect(twin->triple_ids == fresh->triple_ids, "duplicate links to the new chunk");
    c.expect(g->hyperlink_count() - links_before >= fresh->triple_ids.size(), "one hyperlink per duplicate");
    merged_total += r.triples_merged;
  }
  c.expect(store.snapshot()->triples().size() == triples_after_first, "triple count unchanged");
  c.expect(merged_total > 0, "some facts were extracted");
  c.note(std::to_string(triples_after_first) + " triples, " + std::to_string(merged_total) + " merges");
}

// 4. Full traceability after a synthetic corpus.
void traceability(Check& c) {
  GraphStore store;
  StubBackend backend;
  UpdatePipeline p(store, backend);
  for (const auto& req : testing::synthetic_corpus(5, 10, 4, 1'700'000'000)) p.ingest_chunk(req);
  GraphSnapshot g = store.snapshot();
  c.expect(g->sessions().size() == 5 && g->chunks().size() == 50, "corpus shape");
  auto problems = testing::walk_graph(*g);
  c.expect(problems.empty(), problems.empty() ? "" : problems.front());
  // Every chunk reaches its session and, through its triples, back to itself.
  for (const auto& [cid, ch] : g->chunks()) {
    const SessionNode* s = g->find_session(ch->session_id);
    c.expect(s && std::find(s->chunk_ids.begin(), s->chunk_ids.end(), cid) != s->chunk_ids.end(),
             "session lists chunk " + cid);
    for (const std::string& tid : ch->triple_ids) {
      const Triple* t = g->find_triple(tid);
      c.expect(t && t->chunk_ids.count(cid) && t->session_ids.count(ch->session_id), "triple links back " + tid);
      c.expect(s && s->triple_ids.count(tid), "session lists triple " + tid);
    }
  }
  c.note(std::to_string(g->triples().size()) + " triples, " + std::to_string(g->hyperlink_count()) + " links");
}

// 5. retrieve() ordering equals a brute-force recomputation.
void rerank_oracle(Check& c) {
  StubBackend backend(16);
  std::mt19937_64 rng(5);
  std::size_t ties = 0, compared = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const bool coarse = seed % 2 == 0;
    auto snap = std::make_shared<const GraphState>(testing::random_graph(seed, 20 + rng() % 181, 16, coarse));
    const GraphState& g = *snap;
    const double alpha = 0.5;
    RetrievalConfig cfg;
    cfg.scoring = ScoringParams(0.5, 15, alpha, true);
    cfg.entry_limit = 1 + rng() % 3;
    Retriever r(backend, cfg);

    std::string text = "Entity " + std::to_string(rng() % 14) + " and Entity " + std::to_string(rng() % 14);
    Query q{text, Timestamp{1'650'000'000}};
    RetrievalResult res = r.retrieve(q, snap);

    // Independent recomputation: session scores, candidate set, S_t, R.
    const QueryAnalysis& a = res.analysis;
    auto dotp = [](const Embedding& x, const Embedding& y) {
      double s = 0;
      for (std::size_t i = 0; i < x.dim(); ++i) s += double(x.values()[i]) * double(y.values()[i]);
      return std::clamp(s, -1.0, 1.0);
    };
    std::map<std::string, double> ss;
    for (const auto& [sid, s] : g.sessions()) {
      std::size_t hits = 0;
      for (const auto& k : a.keys) hits += s->keys.count(k);
      double overlap = double(hits) / double(std::max<std::size_t>(1, a.keys.size()));
      double cosv = s->summary_embedding.empty() ? 0.0 : dotp(a.embedding, s->summary_embedding);
      ss[sid] = alpha * overlap + (1 - alpha) * (cosv + 1) / 2;
    }
    std::vector<std::string> entries;
    for (const auto& e : res.sessions_used) entries.push_back(e.session_id);
    std::set<std::string> ids = testing::oracle_candidate_ids(g, a.keys, entries);
    c.expect(ids.size() == res.candidate_count, "candidate count, seed " + std::to_string(seed));

    std::vector<GatheredCandidate> oracle_in;
    for (const std::string& id : ids) {
      const Triple* t = g.find_triple(id);
      double best = 0;
      for (const auto& sid : t->session_ids) best = std::max(best, ss[sid]);
      oracle_in.push_back({t, best, (dotp(a.embedding, t->relation_embedding) + 1) / 2, time_gap(a.query_ts, t->ts)});
    }
    std::vector<std::string> expected = testing::oracle_rank(oracle_in, 0.5, 15, true);
    std::vector<std::string> got;
    for (const auto& x : res.ranked) got.push_back(x.triple_id);
    c.expect(got == expected, "ordering, seed " + std::to_string(seed));
    for (std::size_t i = 1; i < res.ranked.size(); ++i) ties += res.ranked[i].relevance == res.ranked[i - 1].relevance;
    compared += got.size();
  }
  c.expect(ties > 0, "fixtures exercise ties");
  c.note(std::to_string(compared) + " ranked rows, " + std::to_string(ties) + " adjacent ties");
}

// 6. Decay changes the order of two near-identical facts 90 days apart.
void temporal_behavior(Check& c) {
  const Timestamp old_ts = *parse_iso8601("2023-01-10T12:00:00Z");
  const Timestamp new_ts = old_ts + 90 * 86400;
  // Query direction e0; the older fact is slightly closer to it.
  Embedding q = Embedding::normalize({1.0f, 0.0f, 0.0f});
  Embedding e_old = Embedding::normalize({0.95f, 0.31f, 0.0f});
  Embedding e_new = Embedding::normalize({0.93f, 0.0f, 0.37f});
  GraphStore store;
  store.write([&](Transaction& txn) {
    txn.upsert_session("s1", "Carol talks about social platforms", {"carol"}, old_ts, q);
    std::string c1 = txn.insert_chunk("s1", "Carol: I joined Mastodon.", {{"Carol", "I joined Mastodon."}}, old_ts).chunk_id;
    txn.insert_triple("Carol", "person", "joined", "Mastodon", "organization", "s1", c1, old_ts, e_old);
  });
  store.write([&](Transaction& txn) {
    txn.upsert_session("s1", "Carol talks about social platforms", {"carol"}, new_ts, q);
    std::string c2 = txn.insert_chunk("s1", "Carol: I joined Bluesky.", {{"Carol", "I joined Bluesky."}}, new_ts).chunk_id;
    txn.insert_triple("Carol", "person", "joined", "Bluesky", "organization", "s1", c2, new_ts, e_new);
  });
  StubBackend backend(3);
  backend.entities_fn = [](std::string_view) { return std::vector<ExtractedEntity>{{"Carol", "person"}}; };
  backend.embed_fn = [&](std::string_view) { return q; };

  Query query{"Which platform did Carol join most recently?", new_ts + 86400};
  RetrievalConfig on;
  RetrievalConfig off;
  off.scoring = ScoringParams{}.with_temporal_decay(false);
  auto order = [&](const RetrievalConfig& cfg) {
    Retriever r(backend, cfg);
    std::vector<std::string> objects;
    GraphSnapshot g = store.snapshot();
    for (const auto& x : r.retrieve(query, g).ranked) objects.push_back(g->find_entity(g->find_triple(x.triple_id)->object_id)->name);
    return objects;
  };
  auto with_decay = order(on), without = order(off);
  c.expect(with_decay.size() == 2 && without.size() == 2, "both facts retrieved");
  c.expect(!with_decay.empty() && with_decay.front() == "Bluesky", "decay ranks the newer fact first");
  c.expect(!without.empty() && without.front() == "Mastodon", "semantics alone ranks the closer fact first");
  c.expect(with_decay != without, "orderings differ");
  if (!with_decay.empty() && !without.empty()) c.note("decay on: " + with_decay.front() + ", off: " + without.front());
}

void copy_prefix(const fs::path& from, const fs::path& to, std::optional<std::size_t> limit = std::nullopt) {
  std::ifstream in(from, std::ios::binary);
  std::string body{std::istreambuf_iterator<char>(in), {}};
  if (limit) body.resize(std::min(*limit, body.size()));
  std::ofstream(to, std::ios::binary | std::ios::trunc) << body;
}

// 7. Crash recovery at random points equals a full replay.
void recovery_equivalence(Check& c) {
  testing::TempDir work;
  const fs::path live = work / "live";
  EngineConfig cfg;
  cfg.data_dir = live;
  cfg.snapshot_every = 150;

  std::map<std::uint64_t, std::string> state_at;  // log seq -> canonical graph
  std::vector<std::uint64_t> boundaries;
  {
    MemoryEngine engine(cfg);
    std::mt19937_64 rng(7);
    std::size_t i = 0;
    auto corpus = testing::synthetic_corpus(12, 40, 7, 1'700'000'000);
    while (engine.stats().log_seq < 1000 && i < corpus.size()) {
      IngestRequest req = corpus[i++];
      // Now and then repeat an earlier chunk so the workload has merges.
      if (rng() % 5 == 0 && i > 2) req.speaker_turns = corpus[rng() % (i - 1)].speaker_turns;
      engine.ingest(req);
      std::uint64_t seq = engine.stats().log_seq;
      state_at[seq] = codec::canonical_serialize(*engine.snapshot());
      boundaries.push_back(seq);
    }
  }
  const std::uint64_t total = boundaries.back();
  c.expect(total >= 1000, "workload reaches 1000 events");

  // Byte offset of each record in the live log.
  LogScan scan = scan_log(live / "memory.log");
  std::vector<std::size_t> offset_of(total + 2, scan.valid_bytes);
  for (const auto& r : scan.records) offset_of[r.record.seq] = r.offset;
  offset_of[total + 1] = scan.valid_bytes;
  std::vector<SnapshotInfo> snaps;
  for (const fs::path& p : list_snapshots(live)) snaps.push_back(load_snapshot(p).info);
  c.expect(snaps.size() >= 3, "several periodic snapshots");

  std::mt19937_64 rng(70);
  std::size_t with_snapshot = 0;
  for (int point = 0; point < 20; ++point) {
    // Crash somewhere inside record `cut`: the log keeps a torn prefix of it.
    std::uint64_t cut = 1 + rng() % total;
    std::size_t begin = offset_of[cut], end = offset_of[cut + 1];
    std::size_t bytes = begin + (end > begin ? rng() % (end - begin) : 0);
    const fs::path dir = work / ("crash-" + std::to_string(point));
    fs::create_directories(dir);
    copy_prefix(live / "memory.log", dir / "memory.log", bytes);
    // Only snapshots completed before the crash survive.
    for (const SnapshotInfo& s : snaps) {
      if (s.last_seq < cut) copy_prefix(s.path, dir / s.path.filename());
    }
    std::uint64_t durable = 0;
    for (std::uint64_t b : boundaries) {
      if (b < cut) durable = b;
    }
    const std::string expected = durable == 0 ? codec::canonical_serialize(GraphState{}) : state_at[durable];

    const std::string full = codec::canonical_serialize(replay_log(dir / "memory.log").state);
    EngineConfig rc = cfg;
    rc.data_dir = dir;
    rc.snapshot_every = 0;
    MemoryEngine restarted(rc);
    const std::string recovered = codec::canonical_serialize(*restarted.snapshot());
    with_snapshot += restarted.recovery() && restarted.recovery()->snapshot.has_value();
    c.expect(recovered == full, "snapshot+suffix equals full replay at point " + std::to_string(point));
    c.expect(full == expected, "full replay equals the live graph at point " + std::to_string(point));
    c.expect(restarted.stats().log_seq == durable, "recovered seq at point " + std::to_string(point));
  }
  c.expect(with_snapshot > 0, "some crash points recover from a snapshot");
  c.note(std::to_string(total) + " events, " + std::to_string(snaps.size()) + " snapshots, " +
         std::to_string(with_snapshot) + "/20 points used a snapshot");
}

BenchReport toy_bench() { return run_bench(load_dataset(HMEM_TOY_DATASET), EngineConfig{}, nullptr, "toy.jsonl"); }

// 8. bench on the toy dataset is exact and repeatable.
void end_to_end_determinism(Check& c) {
  BenchReport a = toy_bench();
  BenchReport b = toy_bench();
  c.expect(a.questions.size() == 10 && a.sessions.size() == 3, "toy dataset shape");
  c.expect(a.aggregate.recall_at_k == 1.0, "recall@15 = 1.0");
  c.expect(mask_timings(to_json(a)).dump() == mask_timings(to_json(b)).dump(), "masked reports identical");
  c.note("recall@15 = " + std::to_string(a.aggregate.recall_at_k));
}

// 9. Ranked list and FACTS never exceed 15 entries.
void top15_budget(Check& c) {
  BenchReport r = toy_bench();
  for (const QuestionRow& q : r.questions) {
    c.expect(q.ranked_count <= 15, q.qid + " ranked <= 15");
    c.expect(q.facts_lines <= 15, q.qid + " FACTS <= 15");
  }
  // A denser graph where far more than 15 candidates compete.
  MemoryEngine engine(EngineConfig{});
  for (const auto& req : testing::synthetic_corpus(5, 10, 9, 1'700'000'000)) engine.ingest(req);
  std::size_t max_candidates = 0;
  for (const char* text : {"Who visited Lisbon?", "What did Alice buy in Kyoto?", "Where did Chen go with Dara?",
                           "Tell me about the Piano and the Violin"}) {
    RetrievalResult res = engine.query({text, Timestamp{1'800'000'000}});
    max_candidates = std::max(max_candidates, res.candidate_count);
    std::size_t facts = 0;
    std::string_view ctx = res.context.text;
    std::size_t b = ctx.find("[FACTS]\n") + 8, e = ctx.find("[SOURCE DIALOGUE]\n");
    for (std::string_view line : text::split_lines(ctx.substr(b, e - b))) facts += !line.empty();
    c.expect(res.ranked.size() <= 15, std::string(text) + " ranked <= 15");
    c.expect(facts <= 15, std::string(text) + " FACTS <= 15");
  }
  c.expect(max_candidates > 15, "budget is actually binding");
  c.note("max candidates " + std::to_string(max_candidates));
}

// Pronounceable unique capitalized name for trial i.
std::string unique_name(int i) {
  static const char* syll[] = {"ka", "lo", "mi", "ru", "ze", "ta", "vo", "ni", "pe", "shu"};
  std::string s = "Zor";
  s += syll[i % 10];
  s += syll[(i / 10) % 10];
  s += "x";
  return s;
}

// 10. A fact is retrievable right after its ingest returns.
void live_availability(Check& c) {
  MemoryEngine engine(EngineConfig{});
  ServerConfig sc;
  sc.port = 0;
  sc.threads = 4;
  HttpServer server(engine, sc);
  int port = server.bind();
  std::thread t([&] { server.listen(); });
  while (!server.is_running()) std::this_thread::yield();
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(std::chrono::seconds(30));

  int found = 0;
  for (int i = 0; i < 100; ++i) {
    const std::string name = unique_name(i);
    const std::string club = "Quillon" + unique_name(99 - i).substr(3);
    Json mem = {{"session_id", "live-" + std::to_string(i % 7)},
                {"speaker_turns", {{{"speaker", "Kira"}, {"utterance", name + " joined the " + club + " club."}}}},
                {"ts", 1'700'000'000 + i * 60}};
    auto ing = cli.Post("/v1/memories", mem.dump(), "application/json");
    if (!ing || ing->status != 200) {
      c.expect(false, "ingest " + std::to_string(i));
      continue;
    }
    auto q = cli.Post("/v1/query", Json{{"text", "What did " + name + " join?"}}.dump(), "application/json");
    bool hit = false;
    if (q && q->status == 200) {
      const Json body = Json::parse(q->body);
      for (const Json& row : body["ranked"]) {
        hit = hit || (row["subject"] == name && row["object"].get<std::string>().find(club) != std::string::npos);
      }
    }
    c.expect(hit, "trial " + std::to_string(i) + " " + name + (q ? " status " + std::to_string(q->status) : " no response"));
    found += hit;
  }
  server.stop();
  t.join();
  c.note(std::to_string(found) + "/100 trials");
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no runtime limit
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "scoring exactness", 1, scoring_exactness},
      {2, "scoring properties", 5, scoring_properties},
      {3, "dedup idempotence", 10, dedup_idempotence},
      {4, "traceability walk", 10, traceability},
      {5, "rerank oracle equivalence", 30, rerank_oracle},
      {6, "temporal decay changes ordering", 0, temporal_behavior},
      {7, "recovery equivalence", 60, recovery_equivalence},
      {8, "end-to-end determinism", 30, end_to_end_determinism},
      {9, "top-15 budget contract", 0, top15_budget},
      {10, "live availability over HTTP", 0, live_availability},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = cr.limit_s == 0 || secs < cr.limit_s;
    bool pass = check.ok() && in_time;
    failed += !pass;
    std::printf("%s criterion %d: %s (%.3f s%s) %s%s%s\n", pass ? "PASS" : "FAIL", cr.id, cr.name, secs,
                cr.limit_s ? (", limit " + std::to_string(static_cast<int>(cr.limit_s)) + " s").c_str() : "",
                check.summary().c_str(), check.extra().empty() ? "" : "; ", check.extra().c_str());
    if (!in_time) std::printf("     runtime limit exceeded\n");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
