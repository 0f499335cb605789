#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmem/core/embedding.hpp"

namespace hmem {

struct SummaryResult {
  std::string summary;
  std::vector<std::string> keys;  // lowercase, deduplicated, non-empty
};

struct ExtractedEntity {
  std::string name;
  std::string type;

  friend bool operator==(const ExtractedEntity&, const ExtractedEntity&) = default;
};

struct ExtractedTriple {
  std::string subject;
  std::string relation;
  std::string object;
  std::string subject_type = "other";
  std::string object_type = "other";

  friend bool operator==(const ExtractedTriple&, const ExtractedTriple&) = default;
};

enum class ExtractionKind { summarize, entities, triples, embed };

struct ExtractionRequest {
  ExtractionKind kind = ExtractionKind::summarize;
  std::string text;
  std::optional<std::string> prior_summary;
  std::vector<std::string> session_keys;
};

// The four model-dependent capabilities. Implementations must be safe for
// concurrent calls.
class ExtractionBackend {
 public:
  virtual ~ExtractionBackend() = default;

  virtual SummaryResult summarize(std::string_view text,
                                  const std::optional<std::string>& prior_summary,
                                  std::span<const std::string> prior_keys) = 0;
  virtual std::vector<ExtractedEntity> extract_entities(std::string_view text) = 0;
  virtual std::vector<ExtractedTriple> extract_triples(std::string_view text) = 0;
  virtual Embedding embed(std::string_view text) = 0;

  virtual std::size_t dimension() const noexcept = 0;
  virtual std::string_view name() const noexcept = 0;
};

struct BackendConfig {
  enum class Provider { deterministic, remote };

  Provider provider = Provider::deterministic;
  std::string endpoint;  // base URL, e.g. http://127.0.0.1:8000/v1
  std::string model;
  std::string embedding_model;  // defaults to model
  std::string api_key_env;
  int timeout_ms = 30000;
  int max_concurrency = 4;
  int max_retries = 3;
  int retry_backoff_ms = 100;
  std::uint64_t seed = 0;
  std::size_t dim = 256;
  std::size_t summary_max_chars = 512;
  std::string prompt_dir;  // empty: the bundled templates
};

std::unique_ptr<ExtractionBackend> make_backend(const BackendConfig& config);

}  // namespace hmem
