#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hmem/backend/backend.hpp"
#include "hmem/service/config.hpp"

namespace hmem {

struct DatasetChunk {
  std::string chunk_id;  // dataset-level id; "<session_id>#<n>" when absent
  std::string session_id;
  Timestamp ts = 0;
  std::vector<SpeakerTurn> turns;
};

struct DatasetQuestion {
  std::string qid;
  Timestamp ts = 0;
  std::string text;
  std::vector<std::string> evidence_session_ids;
  std::vector<std::string> evidence_chunk_ids;
  std::optional<std::string> answer;
};

using DatasetRecord = std::variant<DatasetChunk, DatasetQuestion>;

struct Dataset {
  std::vector<DatasetRecord> records;  // file order

  std::size_t chunk_count() const;
  std::size_t question_count() const;
};

// InvalidArgument naming the line for schema errors, duplicate ids and
// evidence that does not appear earlier in the file.
Dataset parse_dataset(std::string_view jsonl);
Dataset load_dataset(const std::filesystem::path& path);

struct QuestionRow {
  std::string qid;
  std::optional<std::size_t> hit_rank;  // first rank whose chunk is evidence
  bool recall_hit = false;              // hit_rank <= k
  bool sessions_hit = false;            // an evidence session was an entry point
  std::size_t ranked_count = 0;
  std::size_t facts_lines = 0;
  std::size_t context_tokens = 0;  // K_R
  double latency_ms = 0;           // T_R
  std::vector<std::string> retrieved_chunk_ids;  // dataset ids, context order
};

struct SessionRow {
  std::string session_id;
  std::size_t chunks = 0;
  std::size_t ingest_tokens = 0;  // K_G
  double ingest_ms = 0;           // T_G
};

struct BenchAggregate {
  std::size_t questions = 0;
  std::size_t k = 0;
  double recall_at_k = 0;
  double sessions_hit_rate = 0;
  double mean_latency_ms = 0;
  double median_latency_ms = 0;
  double mean_context_tokens = 0;
  double mean_session_ingest_tokens = 0;
  double mean_session_ingest_ms = 0;
};

struct BenchReport {
  std::string dataset;
  std::vector<QuestionRow> questions;
  std::vector<SessionRow> sessions;
  BenchAggregate aggregate;
};

// hits / total counting rows whose hit_rank is within k. Empty input throws.
double compute_recall(std::span<const QuestionRow> rows, std::size_t k = 15);

BenchAggregate aggregate(std::span<const QuestionRow> questions, std::span<const SessionRow> sessions,
                         std::size_t k);

// Replays the dataset into a fresh in-memory engine; data_dir is ignored.
BenchReport run_bench(const Dataset& dataset, const EngineConfig& config,
                      std::unique_ptr<ExtractionBackend> backend = nullptr, std::string dataset_name = {});

nlohmann::json to_json(const BenchReport& report);

// Replaces every latency field with 0 so that reports can be compared.
nlohmann::json mask_timings(nlohmann::json report);

}  // namespace hmem
