#include "hmem/backend/remote.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "hmem/core/types.hpp"
#include "hmem/error.hpp"
#include "hmem/text.hpp"

#ifndef HMEM_PROMPT_DIR
#define HMEM_PROMPT_DIR "prompts/v1"
#endif

namespace hmem {

namespace {

using nlohmann::json;

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.emplace_back(text::trim(line.substr(b, i - b)));
      b = i + 1;
    }
  }
  return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && text::to_lower(s.substr(0, prefix.size())) == prefix;
}

void require_output(std::string_view output) {
  if (text::trim(output).empty()) throw ExtractionError("model returned an empty response");
}

// RAII slot in the in-flight request limit.
class Slot {
 public:
  explicit Slot(std::counting_semaphore<1024>& sem) : sem_(sem) { sem_.acquire(); }
  ~Slot() { sem_.release(); }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  std::counting_semaphore<1024>& sem_;
};

}  // namespace

PromptTemplate PromptTemplate::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read prompt template " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string name = path.substr(path.find_last_of('/') + 1);
  return PromptTemplate(std::move(name), ss.str());
}

std::string PromptTemplate::render(const ExtractionRequest& request) const {
  std::string out = body_;
  replace_all(out, "{{prior_summary}}", request.prior_summary.value_or("(none)"));
  replace_all(out, "{{prior_keys}}",
              request.session_keys.empty() ? "(none)" : text::join(request.session_keys, ", "));
  replace_all(out, "{{text}}", request.text);
  return out;
}

PromptSet PromptSet::load(const std::string& dir) {
  return {PromptTemplate::load(dir + "/summarize.txt"), PromptTemplate::load(dir + "/entities.txt"),
          PromptTemplate::load(dir + "/triples.txt")};
}

std::string bundled_prompt_dir() { return HMEM_PROMPT_DIR; }

SummaryResult parse_summary_output(std::string_view output) {
  require_output(output);
  SummaryResult r;
  std::unordered_set<std::string> seen;
  for (std::string_view raw : text::split_lines(output)) {
    std::string_view line = text::trim(raw);
    if (starts_with_ci(line, "summary:")) {
      r.summary = std::string(text::trim(line.substr(8)));
    } else if (starts_with_ci(line, "keys:")) {
      for (std::string& k : split_fields(line.substr(5), ',')) {
        std::string c = text::canonicalize(k);
        if (!c.empty() && seen.insert(c).second) r.keys.push_back(std::move(c));
      }
    }
  }
  if (r.summary.empty() || r.keys.empty()) {
    throw ExtractionError("model summary output lacks a SUMMARY or KEYS line");
  }
  return r;
}

std::vector<ExtractedEntity> parse_entity_lines(std::string_view output) {
  require_output(output);
  std::vector<ExtractedEntity> out;
  std::unordered_set<std::string> seen;
  for (std::string_view raw : text::split_lines(output)) {
    auto f = split_fields(text::trim(raw), '|');
    if (f.size() != 2 || f[0].empty()) continue;
    if (!seen.insert(text::canonicalize(f[0])).second) continue;
    out.push_back({f[0], normalize_entity_type(f[1])});
  }
  return out;
}

std::vector<ExtractedTriple> parse_triple_lines(std::string_view output) {
  require_output(output);
  std::vector<ExtractedTriple> out;
  for (std::string_view raw : text::split_lines(output)) {
    auto f = split_fields(text::trim(raw), '|');
    if (f.size() != 5 || f[0].empty() || f[1].empty() || f[2].empty()) continue;
    out.push_back({f[0], f[1], f[2], normalize_entity_type(f[3]), normalize_entity_type(f[4])});
  }
  return out;
}

RemoteBackend::RemoteBackend(BackendConfig config, PromptSet prompts)
    : config_(std::move(config)),
      prompts_(std::move(prompts)),
      in_flight_(std::clamp(config_.max_concurrency, 1, 1024)) {
  std::string endpoint = config_.endpoint;
  if (endpoint.empty()) throw InvalidArgument("remote backend requires an endpoint");
  if (endpoint.find("://") == std::string::npos) endpoint = "http://" + endpoint;
  std::size_t slash = endpoint.find('/', endpoint.find("://") + 3);
  host_ = endpoint.substr(0, slash);
  path_prefix_ = slash == std::string::npos ? "" : endpoint.substr(slash);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
  if (config_.embedding_model.empty()) config_.embedding_model = config_.model;
}

RemoteBackend::~RemoteBackend() = default;

std::size_t RemoteBackend::requests_sent() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::string RemoteBackend::post_json(const std::string& path, const std::string& body) {
  Slot slot(in_flight_);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          static_cast<long>(config_.retry_backoff_ms) << (attempt - 1)));
    }
    {
      std::lock_guard lock(mu_);
      ++requests_;
    }
    httplib::Client cli(host_);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = cli.Post(path_prefix_ + path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    last_error = "HTTP " + std::to_string(res->status);
    bool transient = res->status >= 500 || res->status == 429 || res->status == 408;
    if (!transient) break;
  }
  throw BackendError("remote backend " + host_ + path_prefix_ + path + " failed: " + last_error);
}

std::string RemoteBackend::complete(const std::string& prompt) {
  json body = {{"model", config_.model},
               {"temperature", 0},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
  std::string raw = post_json("/chat/completions", body.dump());
  try {
    json res = json::parse(raw);
    return res.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed chat completion response: ") + e.what());
  }
}

SummaryResult RemoteBackend::summarize(std::string_view text,
                                       const std::optional<std::string>& prior_summary,
                                       std::span<const std::string> prior_keys) {
  if (text::trim(text).empty()) throw InvalidArgument("extraction input text is empty");
  ExtractionRequest req{ExtractionKind::summarize, std::string(text), prior_summary,
                        {prior_keys.begin(), prior_keys.end()}};
  SummaryResult r = parse_summary_output(complete(prompts_.summarize.render(req)));
  if (r.summary.size() > config_.summary_max_chars) r.summary.resize(config_.summary_max_chars);
  return r;
}

std::vector<ExtractedEntity> RemoteBackend::extract_entities(std::string_view text) {
  if (text::trim(text).empty()) throw InvalidArgument("extraction input text is empty");
  ExtractionRequest req{ExtractionKind::entities, std::string(text), std::nullopt, {}};
  return parse_entity_lines(complete(prompts_.entities.render(req)));
}

std::vector<ExtractedTriple> RemoteBackend::extract_triples(std::string_view text) {
  if (text::trim(text).empty()) throw InvalidArgument("extraction input text is empty");
  ExtractionRequest req{ExtractionKind::triples, std::string(text), std::nullopt, {}};
  return parse_triple_lines(complete(prompts_.triples.render(req)));
}

Embedding RemoteBackend::embed(std::string_view text) {
  if (text::trim(text).empty()) throw InvalidArgument("embedding input text is empty");
  {
    std::lock_guard lock(mu_);
    if (auto it = embed_cache_.find(text); it != embed_cache_.end()) return it->second;
  }
  json body = {{"model", config_.embedding_model}, {"input", std::string(text)}};
  std::string raw = post_json("/embeddings", body.dump());
  std::vector<float> values;
  try {
    json res = json::parse(raw);
    values = res.at("data").at(0).at("embedding").get<std::vector<float>>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed embedding response: ") + e.what());
  }
  if (values.size() != config_.dim) {
    throw BackendError("embedding dimension " + std::to_string(values.size()) +
                       " does not match configured " + std::to_string(config_.dim));
  }
  Embedding e;
  try {
    e = Embedding::normalize(std::move(values));
  } catch (const InvalidArgument&) {
    throw ExtractionError("model returned a zero embedding");
  }
  std::lock_guard lock(mu_);
  embed_cache_.emplace(std::string(text), e);
  return e;
}

}  // namespace hmem
