#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hmem/error.hpp"
#include "hmem/text.hpp"

namespace hmem::testing {

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "hmem-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

SummaryResult StubBackend::summarize(std::string_view text, const std::optional<std::string>& prior,
                                     std::span<const std::string> prior_keys) {
  ++calls;
  if (fail_summarize) throw BackendError("summarize outage");
  return inner_.summarize(text, prior, prior_keys);
}

std::vector<ExtractedEntity> StubBackend::extract_entities(std::string_view text) {
  ++calls;
  if (fail_entities) throw BackendError("entity outage");
  return entities_fn ? entities_fn(text) : inner_.extract_entities(text);
}

std::vector<ExtractedTriple> StubBackend::extract_triples(std::string_view text) {
  ++calls;
  if (fail_triples) throw ExtractionError("triple outage");
  return triples_fn ? triples_fn(text) : inner_.extract_triples(text);
}

Embedding StubBackend::embed(std::string_view text) {
  ++calls;
  if (fail_embed) throw BackendError("embedding outage");
  return embed_fn ? embed_fn(text) : inner_.embed(text);
}

IngestRequest make_chunk(std::string session_id, Timestamp ts,
                         std::vector<std::pair<std::string, std::string>> turns,
                         std::optional<std::string> key) {
  IngestRequest r;
  r.session_id = std::move(session_id);
  r.ts = ts;
  for (auto& [s, u] : turns) r.speaker_turns.push_back({s, u});
  r.idempotency_key = std::move(key);
  return r;
}

namespace {

const std::vector<std::string> kPeople = {"Alice", "Bruno", "Chen", "Dara", "Emil",
                                          "Farah", "Goran", "Hana", "Ivan", "Jonas"};
const std::vector<std::string> kPlaces = {"Lisbon", "Oslo", "Kyoto", "Quito", "Nairobi", "Dublin"};
const std::vector<std::string> kThings = {"Violin", "Telescope", "Kayak", "Chessboard", "Bonsai",
                                          "Camera", "Sourdough", "Piano"};
const std::vector<std::string> kVerbs = {"bought", "repaired", "borrowed", "painted", "sold", "found"};

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

}  // namespace

std::vector<IngestRequest> synthetic_session(const std::string& session_id, std::size_t n_chunks,
                                             std::uint64_t seed, Timestamp start) {
  std::mt19937_64 rng(seed);
  std::vector<IngestRequest> out;
  for (std::size_t i = 0; i < n_chunks; ++i) {
    const std::string& a = pick(rng, kPeople);
    const std::string& b = pick(rng, kPeople);
    std::string first = a + " " + pick(rng, kVerbs) + " a " + pick(rng, kThings) + " in " + pick(rng, kPlaces) + ".";
    std::string second = b + " visited " + pick(rng, kPlaces) + " with " + pick(rng, kPeople) + ".";
    out.push_back(make_chunk(session_id, start + static_cast<Timestamp>(i) * 600, {{a, first}, {b, second}}));
  }
  return out;
}

std::vector<IngestRequest> synthetic_corpus(std::size_t sessions, std::size_t chunks_per_session,
                                            std::uint64_t seed, Timestamp start) {
  std::vector<IngestRequest> out;
  for (std::size_t s = 0; s < sessions; ++s) {
    auto part = synthetic_session("session-" + std::to_string(s + 1), chunks_per_session, seed * 131 + s,
                                  start + static_cast<Timestamp>(s) * 7 * 86400);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Embedding random_embedding(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<float> d;
  std::vector<float> v(dim);
  for (float& x : v) x = d(rng);
  return Embedding::normalize(std::move(v));
}

GraphState random_graph(std::uint64_t seed, std::size_t n_triples, std::size_t dim, bool coarse) {
  std::mt19937_64 rng(seed);
  std::vector<Embedding> pool;
  for (int i = 0; i < 3; ++i) pool.push_back(random_embedding(rng, dim));
  auto embedding = [&] { return coarse ? pool[rng() % pool.size()] : random_embedding(rng, dim); };
  GraphStore store;
  const std::size_t n_sessions = 1 + rng() % 6;
  const std::size_t n_entities = 3 + rng() % 12;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n_entities; ++i) names.push_back("Entity " + std::to_string(i));
  std::vector<std::string> relations = {"likes", "visited", "works with", "owns", "met"};
  std::uniform_int_distribution<Timestamp> day(0, 400);

  std::size_t made = 0;
  while (made < n_triples) {
    store.write([&](Transaction& txn) {
      std::string sid = "s" + std::to_string(1 + rng() % n_sessions);
      Timestamp ts = coarse ? 1'600'000'000 + static_cast<Timestamp>(rng() % 4) * 86400
                        : 1'600'000'000 + day(rng) * 86400 + static_cast<Timestamp>(rng() % 86400);
      std::set<std::string> keys;
      for (int k = 0; k < 3; ++k) keys.insert(text::canonicalize(names[rng() % names.size()]));
      txn.upsert_session(sid, "summary of " + sid, keys, ts, embedding());
      const Chunk& c = txn.insert_chunk(sid, "chunk text " + std::to_string(made), {}, ts);
      std::string cid = c.chunk_id;
      std::size_t per_chunk = 1 + rng() % 4;
      for (std::size_t j = 0; j < per_chunk && made < n_triples; ++j, ++made) {
        const std::string& subj = names[rng() % names.size()];
        const std::string& obj = names[rng() % names.size()];
        const Triple& t = txn.insert_triple(subj, "other", relations[rng() % relations.size()], obj, "other", sid,
                                            cid, ts, embedding());
        // Some triples pick up a second session link.
        if (rng() % 5 == 0) {
          std::string other = "s" + std::to_string(1 + rng() % n_sessions);
          if (txn.state().find_session(other)) {
            const SessionNode* os = txn.state().find_session(other);
            if (!os->chunk_ids.empty()) txn.add_hyperlink(t.triple_id, other, os->chunk_ids.front());
          }
        }
      }
    });
  }
  return *store.snapshot();
}

std::vector<std::string> walk_graph(const GraphState& g) {
  std::vector<std::string> problems;
  auto note = [&](std::string s) { problems.push_back(std::move(s)); };
  for (const auto& [id, t] : g.triples()) {
    if (!g.find_entity(t->subject_id)) note("triple " + id + " subject dangling");
    if (!g.find_entity(t->object_id)) note("triple " + id + " object dangling");
    if (t->session_ids.empty()) note("triple " + id + " has no session");
    if (t->chunk_ids.empty()) note("triple " + id + " has no chunk");
    for (const std::string& sid : t->session_ids) {
      const SessionNode* s = g.find_session(sid);
      if (!s) {
        note("triple " + id + " -> missing session " + sid);
      } else if (!s->triple_ids.count(id)) {
        note("session " + sid + " lacks back link to " + id);
      }
    }
    for (const std::string& cid : t->chunk_ids) {
      const Chunk* c = g.find_chunk(cid);
      if (!c) {
        note("triple " + id + " -> missing chunk " + cid);
      } else if (!c->triple_ids.count(id)) {
        note("chunk " + cid + " lacks back link to " + id);
      }
    }
  }
  for (const auto& [sid, s] : g.sessions()) {
    for (const std::string& tid : s->triple_ids) {
      const Triple* t = g.find_triple(tid);
      if (!t) {
        note("session " + sid + " -> missing triple " + tid);
      } else if (!t->session_ids.count(sid)) {
        note("triple " + tid + " lacks back link to session " + sid);
      }
    }
    for (const std::string& cid : s->chunk_ids) {
      const Chunk* c = g.find_chunk(cid);
      if (!c) {
        note("session " + sid + " -> missing chunk " + cid);
      } else if (c->session_id != sid) {
        note("chunk " + cid + " names another session");
      }
    }
  }
  for (const auto& [cid, c] : g.chunks()) {
    const SessionNode* s = g.find_session(c->session_id);
    if (!s) {
      note("chunk " + cid + " -> missing session " + c->session_id);
    } else if (std::find(s->chunk_ids.begin(), s->chunk_ids.end(), cid) == s->chunk_ids.end()) {
      note("session " + c->session_id + " lacks chunk " + cid);
    }
    for (const std::string& tid : c->triple_ids) {
      const Triple* t = g.find_triple(tid);
      if (!t) {
        note("chunk " + cid + " -> missing triple " + tid);
      } else if (!t->chunk_ids.count(cid)) {
        note("triple " + tid + " lacks back link to chunk " + cid);
      }
    }
  }
  return problems;
}

double oracle_harmonic(double a, double b) { return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b); }

double oracle_weight(double delta_tau, double tau_hat, double shape) {
  return std::exp(-std::pow(delta_tau / tau_hat, shape));
}

double oracle_median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  double m = n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  return std::max(m, 1.0);
}

std::vector<std::string> oracle_rank(const std::vector<GatheredCandidate>& candidates, double shape,
                                     std::size_t top_k, bool decay) {
  if (candidates.empty()) return {};
  std::vector<double> gaps;
  for (const auto& c : candidates) gaps.push_back(static_cast<double>(c.delta_tau));
  const double tau = oracle_median(gaps);
  struct Row {
    std::string id;
    Timestamp ts;
    double r;
  };
  std::vector<Row> rows;
  for (const auto& c : candidates) {
    double w = decay ? oracle_weight(static_cast<double>(c.delta_tau), tau, shape) : 1.0;
    rows.push_back({c.triple->triple_id, c.triple->ts, oracle_harmonic(c.session_score, c.triple_score) * w});
  }
  // Selection sort, written out so it shares nothing with the library sort.
  std::vector<std::string> order;
  std::vector<bool> used(rows.size(), false);
  for (std::size_t k = 0; k < std::min(top_k, rows.size()); ++k) {
    std::size_t best = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (used[i]) continue;
      if (best == rows.size()) {
        best = i;
        continue;
      }
      const Row& a = rows[i];
      const Row& b = rows[best];
      bool better = a.r > b.r || (a.r == b.r && (a.ts > b.ts || (a.ts == b.ts && a.id < b.id)));
      if (better) best = i;
    }
    used[best] = true;
    order.push_back(rows[best].id);
  }
  return order;
}

std::set<std::string> oracle_candidate_ids(const GraphState& g, const std::set<std::string>& keys,
                                           const std::vector<std::string>& entry_sessions) {
  std::set<std::string> out;
  for (const auto& [id, t] : g.triples()) {
    bool anchored = keys.count(t->subject_id) || keys.count(t->object_id);
    bool entry = std::any_of(entry_sessions.begin(), entry_sessions.end(),
                             [&](const std::string& s) { return t->session_ids.count(s) > 0; });
    if (anchored || entry) out.insert(id);
  }
  return out;
}

}  // namespace hmem::testing
