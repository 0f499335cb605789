#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "hmem/backend/backend.hpp"
#include "hmem/pipeline/dedup.hpp"
#include "hmem/scoring/scoring.hpp"

namespace hmem {

struct ServerConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::size_t max_body_bytes = 1 << 20;
  int threads = 8;
};

struct BenchConfig {
  std::string dataset;
  std::string report;
};

struct EngineConfig {
  std::filesystem::path data_dir;  // empty: in-memory only
  ScoringParams scoring;
  DedupPolicy dedup;
  std::size_t entry_limit = 5;
  std::optional<std::size_t> budget_tokens;
  bool chunk_fallback = false;
  std::size_t snapshot_every = 500;  // events; 0 disables periodic snapshots
  BackendConfig backend;
  ServerConfig server;
  BenchConfig bench;
};

// Unknown keys, wrong types and out-of-range values throw ConfigError with the
// dotted key path. Missing keys keep their defaults.
EngineConfig parse_config(const nlohmann::json& j);
EngineConfig load_config(const std::filesystem::path& path);

// Full config with every key present; parse_config(config_to_json(c)) == c.
nlohmann::json config_to_json(const EngineConfig& c);

}  // namespace hmem
