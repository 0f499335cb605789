#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

#include <CLI11.hpp>

#include "hmem/error.hpp"
#include "hmem/service/bench.hpp"
#include "hmem/service/config.hpp"
#include "hmem/service/dump.hpp"
#include "hmem/service/engine.hpp"
#include "hmem/service/http_server.hpp"
#include "hmem/service/json_api.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int exit_code_for(hmem::ErrorCode code) {
  switch (code) {
    case hmem::ErrorCode::invalid_argument:
    case hmem::ErrorCode::config_error:
    case hmem::ErrorCode::not_found:
      return kExitValidation;
    default:
      return kExitIo;
  }
}

std::optional<hmem::Timestamp> parse_ts_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (auto ts = hmem::parse_iso8601(s)) return ts;
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw hmem::InvalidArgument("--ts: not an ISO-8601 timestamp or integer seconds: " + s);
}

int run_ingest(hmem::EngineConfig cfg, const std::string& file) {
  if (cfg.data_dir.empty()) throw hmem::ConfigError("data_dir", "required for ingest");
  hmem::Dataset d = hmem::load_dataset(file);
  hmem::MemoryEngine engine(std::move(cfg));
  std::size_t added = 0, merged = 0, chunks = 0;
  for (const hmem::DatasetRecord& rec : d.records) {
    const auto* c = std::get_if<hmem::DatasetChunk>(&rec);
    if (!c) continue;
    hmem::IngestReport r = engine.ingest({c->session_id, c->turns, c->ts, c->chunk_id});
    added += r.triples_added;
    merged += r.triples_merged;
    ++chunks;
  }
  engine.shutdown();
  hmem::EngineStats s = engine.stats();
  std::cout << "ingested " << chunks << " chunks: " << added << " triples added, " << merged
            << " merged; graph has " << s.sessions << " sessions, " << s.triples << " triples, " << s.chunks
            << " chunks\n";
  return 0;
}

int run_query(hmem::EngineConfig cfg, const std::string& text, const std::string& ts, std::size_t top_k,
              bool as_json) {
  hmem::MemoryEngine engine(std::move(cfg));
  hmem::Query q;
  q.text = text;
  q.query_ts = parse_ts_flag(ts);
  if (top_k > 0) q.top_k = top_k;
  hmem::GraphSnapshot snap = engine.snapshot();
  hmem::RetrievalResult r = engine.retriever().retrieve(q, snap);
  if (as_json) {
    std::cout << hmem::api::to_json(r, *snap).dump(2) << "\n";
  } else {
    std::cout << r.context.text;
  }
  return 0;
}

int run_serve(hmem::EngineConfig cfg) {
  // Signals are taken synchronously by one thread so that shutdown runs in
  // ordinary context.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  hmem::MemoryEngine engine(cfg);
  hmem::HttpServer server(engine, cfg.server);
  int port = server.bind();
  std::cerr << "hmem: listening on " << cfg.server.bind << ":" << port << "\n";
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    std::cerr << "hmem: signal " << sig << ", shutting down\n";
    server.stop();
  });
  server.listen();
  engine.shutdown();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return 0;
}

int run_bench(hmem::EngineConfig cfg, std::string dataset, std::string report_path) {
  if (dataset.empty()) dataset = cfg.bench.dataset;
  if (report_path.empty()) report_path = cfg.bench.report;
  if (dataset.empty()) throw hmem::ConfigError("bench.dataset", "no dataset given");
  hmem::Dataset d = hmem::load_dataset(dataset);
  hmem::BenchReport report = hmem::run_bench(d, cfg, nullptr, std::filesystem::path(dataset).filename().string());
  std::string body = hmem::to_json(report).dump(2);
  if (report_path.empty()) {
    std::cout << body << "\n";
  } else {
    std::ofstream out(report_path);
    if (!(out << body << "\n")) throw hmem::IoError("cannot write " + report_path);
    const hmem::BenchAggregate& a = report.aggregate;
    std::cout << "questions=" << a.questions << " recall@" << a.k << "=" << a.recall_at_k
              << " mean_T_R_ms=" << a.mean_latency_ms << " mean_K_R=" << a.mean_context_tokens
              << " mean_K_G=" << a.mean_session_ingest_tokens << "\n";
  }
  return 0;
}

int run_dump(hmem::EngineConfig cfg, const std::string& format) {
  if (cfg.data_dir.empty()) throw hmem::ConfigError("data_dir", "required for dump");
  if (format == "log") {
    hmem::dump_log(cfg.data_dir / "memory.log", std::cout);
    return 0;
  }
  hmem::RecoveryResult r = hmem::recover(cfg.data_dir, hmem::make_backend(cfg.backend)->dimension());
  if (format == "snapshot") {
    hmem::dump_snapshot(r.state, std::cout);
  } else {
    hmem::dump_dot(r.state, std::cout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical conversational memory engine"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");

  std::string file, text, ts, dataset, report, format = "log";
  std::size_t top_k = 0;
  bool as_json = false;

  auto* ingest = app.add_subcommand("ingest", "Ingest the chunk records of a dataset file");
  ingest->add_option("file", file, "JSONL dataset")->required();

  auto* query = app.add_subcommand("query", "Retrieve context for a question");
  query->add_option("text", text, "Query text")->required();
  query->add_option("--ts", ts, "Query time, ISO-8601 or epoch seconds");
  query->add_option("--top-k", top_k, "Override the number of ranked facts")->check(CLI::PositiveNumber);
  query->add_flag("--json", as_json, "Print the full result as JSON");

  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON service");

  auto* bench = app.add_subcommand("bench", "Replay a dataset and report recall and cost");
  bench->add_option("dataset", dataset, "JSONL dataset");
  bench->add_option("--report", report, "Write the report here instead of stdout");

  auto* dump = app.add_subcommand("dump", "Print the stored memory");
  dump->add_option("--format", format, "log, snapshot or dot")
      ->check(CLI::IsMember({"log", "snapshot", "dot"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    hmem::EngineConfig cfg = config_path.empty() ? hmem::EngineConfig{} : hmem::load_config(config_path);
    if (*ingest) return run_ingest(std::move(cfg), file);
    if (*query) return run_query(std::move(cfg), text, ts, top_k, as_json);
    if (*serve) return run_serve(std::move(cfg));
    if (*bench) return run_bench(std::move(cfg), dataset, report);
    if (*dump) return run_dump(std::move(cfg), format);
  } catch (const hmem::Error& e) {
    std::cerr << "hmem: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "hmem: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
