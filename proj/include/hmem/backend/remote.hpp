#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "hmem/backend/backend.hpp"

namespace hmem {

// Named-placeholder template: "{{text}}", "{{prior_summary}}", "{{prior_keys}}".
class PromptTemplate {
 public:
  PromptTemplate() = default;
  PromptTemplate(std::string name, std::string body)
      : name_(std::move(name)), body_(std::move(body)) {}

  static PromptTemplate load(const std::string& path);

  const std::string& name() const noexcept { return name_; }
  std::string render(const ExtractionRequest& request) const;

 private:
  std::string name_;
  std::string body_;
};

struct PromptSet {
  PromptTemplate summarize;
  PromptTemplate entities;
  PromptTemplate triples;

  // Reads summarize.txt, entities.txt and triples.txt from dir.
  static PromptSet load(const std::string& dir);
};

// Directory of the templates shipped with the sources.
std::string bundled_prompt_dir();

// Line-format parsers for model output; malformed lines are skipped.
SummaryResult parse_summary_output(std::string_view output);
std::vector<ExtractedEntity> parse_entity_lines(std::string_view output);
std::vector<ExtractedTriple> parse_triple_lines(std::string_view output);

// OpenAI-compatible chat-completions and embeddings client.
class RemoteBackend final : public ExtractionBackend {
 public:
  RemoteBackend(BackendConfig config, PromptSet prompts);
  ~RemoteBackend() override;

  SummaryResult summarize(std::string_view text, const std::optional<std::string>& prior_summary,
                          std::span<const std::string> prior_keys) override;
  std::vector<ExtractedEntity> extract_entities(std::string_view text) override;
  std::vector<ExtractedTriple> extract_triples(std::string_view text) override;
  Embedding embed(std::string_view text) override;

  std::size_t dimension() const noexcept override { return config_.dim; }
  std::string_view name() const noexcept override { return "remote"; }

  // Requests issued (retries included); for tests and stats.
  std::size_t requests_sent() const;

 private:
  std::string complete(const std::string& prompt);
  std::string post_json(const std::string& path, const std::string& body);

  BackendConfig config_;
  PromptSet prompts_;
  std::string host_;         // scheme://host:port
  std::string path_prefix_;  // e.g. /v1
  std::string api_key_;
  std::counting_semaphore<1024> in_flight_;

  mutable std::mutex mu_;
  std::size_t requests_ = 0;
  std::map<std::string, Embedding, std::less<>> embed_cache_;
};

}  // namespace hmem
