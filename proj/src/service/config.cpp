#include "hmem/service/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "hmem/error.hpp"

namespace hmem {

namespace {

using Json = nlohmann::json;

// Walks one JSON object, dispatching known keys and rejecting the rest.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void on(const std::string& key, std::function<void(const Json&, const std::string&)> fn) {
    handlers_[key] = std::move(fn);
  }

  void run() const {
    for (const auto& [key, value] : j_.items()) {
      auto it = handlers_.find(key);
      if (it == handlers_.end()) throw ConfigError(key_path(key), "unknown key");
      it->second(value, key_path(key));
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::map<std::string, std::function<void(const Json&, const std::string&)>> handlers_;
};

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  return v.get<double>();
}

long long as_integer(const Json& v, const std::string& path, long long lo, long long hi) {
  if (!v.is_number_integer()) throw ConfigError(path, "must be an integer");
  long long x = v.get<long long>();
  if (x < lo || x > hi) {
    throw ConfigError(path, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return x;
}

bool as_bool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "must be a boolean");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "must be a string");
  return v.get<std::string>();
}

constexpr long long kMaxInt = 1LL << 31;

}  // namespace

EngineConfig parse_config(const Json& j) {
  EngineConfig c;
  double k = c.scoring.shape(), alpha = c.scoring.session_key_weight();
  std::size_t top_k = c.scoring.top_k();
  bool decay = c.scoring.temporal_decay();

  Section root(j, "");
  root.on("data_dir", [&](const Json& v, const std::string& p) { c.data_dir = as_string(v, p); });

  root.on("scoring", [&](const Json& v, const std::string& p) {
    Section s(v, p);
    s.on("k", [&](const Json& x, const std::string& q) {
      k = as_number(x, q);
      if (!(k > 0.0 && k < 1.0)) throw ConfigError(q, "must lie strictly inside (0, 1)");
    });
    s.on("top_k", [&](const Json& x, const std::string& q) {
      top_k = static_cast<std::size_t>(as_integer(x, q, 1, 10000));
    });
    s.on("alpha", [&](const Json& x, const std::string& q) {
      alpha = as_number(x, q);
      if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError(q, "must be in [0, 1]");
    });
    s.on("theta", [&](const Json& x, const std::string& q) {
      double t = as_number(x, q);
      if (!(t > 0.0 && t <= 1.0)) throw ConfigError(q, "must be in (0, 1]");
      c.dedup.similarity_threshold = t;
    });
    s.on("entry_limit", [&](const Json& x, const std::string& q) {
      c.entry_limit = static_cast<std::size_t>(as_integer(x, q, 1, 10000));
    });
    s.on("temporal_decay", [&](const Json& x, const std::string& q) { decay = as_bool(x, q); });
    s.on("dedup_type_match", [&](const Json& x, const std::string& q) {
      c.dedup.require_type_match = as_bool(x, q);
    });
    s.on("dedup_same_pair", [&](const Json& x, const std::string& q) {
      c.dedup.require_same_entity_pair = as_bool(x, q);
    });
    s.run();
  });

  root.on("retrieval", [&](const Json& v, const std::string& p) {
    Section s(v, p);
    s.on("budget_tokens", [&](const Json& x, const std::string& q) {
      if (x.is_null()) {
        c.budget_tokens.reset();
      } else {
        c.budget_tokens = static_cast<std::size_t>(as_integer(x, q, 1, kMaxInt));
      }
    });
    s.on("chunk_fallback", [&](const Json& x, const std::string& q) { c.chunk_fallback = as_bool(x, q); });
    s.run();
  });

  root.on("persistence", [&](const Json& v, const std::string& p) {
    Section s(v, p);
    s.on("snapshot_every", [&](const Json& x, const std::string& q) {
      c.snapshot_every = static_cast<std::size_t>(as_integer(x, q, 0, kMaxInt));
    });
    s.run();
  });

  root.on("backend", [&](const Json& v, const std::string& p) {
    BackendConfig& b = c.backend;
    Section s(v, p);
    s.on("provider", [&](const Json& x, const std::string& q) {
      std::string name = as_string(x, q);
      if (name == "deterministic") {
        b.provider = BackendConfig::Provider::deterministic;
      } else if (name == "remote") {
        b.provider = BackendConfig::Provider::remote;
      } else {
        throw ConfigError(q, "must be \"deterministic\" or \"remote\"");
      }
    });
    s.on("endpoint", [&](const Json& x, const std::string& q) { b.endpoint = as_string(x, q); });
    s.on("model", [&](const Json& x, const std::string& q) { b.model = as_string(x, q); });
    s.on("embedding_model", [&](const Json& x, const std::string& q) { b.embedding_model = as_string(x, q); });
    s.on("api_key_env", [&](const Json& x, const std::string& q) { b.api_key_env = as_string(x, q); });
    s.on("timeout_ms", [&](const Json& x, const std::string& q) {
      b.timeout_ms = static_cast<int>(as_integer(x, q, 1, 600000));
    });
    s.on("max_concurrency", [&](const Json& x, const std::string& q) {
      b.max_concurrency = static_cast<int>(as_integer(x, q, 1, 256));
    });
    s.on("max_retries", [&](const Json& x, const std::string& q) {
      b.max_retries = static_cast<int>(as_integer(x, q, 0, 3));
    });
    s.on("retry_backoff_ms", [&](const Json& x, const std::string& q) {
      b.retry_backoff_ms = static_cast<int>(as_integer(x, q, 0, 60000));
    });
    s.on("seed", [&](const Json& x, const std::string& q) {
      if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0)) {
        throw ConfigError(q, "must be a non-negative integer");
      }
      b.seed = x.get<std::uint64_t>();
    });
    s.on("dim", [&](const Json& x, const std::string& q) {
      b.dim = static_cast<std::size_t>(as_integer(x, q, 1, 65536));
    });
    s.on("summary_max_chars", [&](const Json& x, const std::string& q) {
      b.summary_max_chars = static_cast<std::size_t>(as_integer(x, q, 16, 1 << 20));
    });
    s.on("prompt_dir", [&](const Json& x, const std::string& q) { b.prompt_dir = as_string(x, q); });
    s.run();
    if (b.provider == BackendConfig::Provider::remote && b.endpoint.empty()) {
      throw ConfigError(p + ".endpoint", "required for the remote provider");
    }
  });

  root.on("server", [&](const Json& v, const std::string& p) {
    Section s(v, p);
    s.on("bind", [&](const Json& x, const std::string& q) { c.server.bind = as_string(x, q); });
    s.on("port", [&](const Json& x, const std::string& q) {
      c.server.port = static_cast<int>(as_integer(x, q, 0, 65535));
    });
    s.on("max_body_bytes", [&](const Json& x, const std::string& q) {
      c.server.max_body_bytes = static_cast<std::size_t>(as_integer(x, q, 1024, 1LL << 30));
    });
    s.on("threads", [&](const Json& x, const std::string& q) {
      c.server.threads = static_cast<int>(as_integer(x, q, 1, 256));
    });
    s.run();
  });

  root.on("bench", [&](const Json& v, const std::string& p) {
    Section s(v, p);
    s.on("dataset", [&](const Json& x, const std::string& q) { c.bench.dataset = as_string(x, q); });
    s.on("report", [&](const Json& x, const std::string& q) { c.bench.report = as_string(x, q); });
    s.run();
  });

  root.run();
  c.scoring = ScoringParams(k, top_k, alpha, decay);
  return c;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("<root>", path.string() + " is not valid JSON");
  return parse_config(j);
}

Json config_to_json(const EngineConfig& c) {
  const BackendConfig& b = c.backend;
  return {
      {"data_dir", c.data_dir.string()},
      {"scoring",
       {{"k", c.scoring.shape()},
        {"top_k", c.scoring.top_k()},
        {"alpha", c.scoring.session_key_weight()},
        {"theta", c.dedup.similarity_threshold},
        {"entry_limit", c.entry_limit},
        {"temporal_decay", c.scoring.temporal_decay()},
        {"dedup_type_match", c.dedup.require_type_match},
        {"dedup_same_pair", c.dedup.require_same_entity_pair}}},
      {"retrieval",
       {{"budget_tokens", c.budget_tokens ? Json(*c.budget_tokens) : Json(nullptr)},
        {"chunk_fallback", c.chunk_fallback}}},
      {"persistence", {{"snapshot_every", c.snapshot_every}}},
      {"backend",
       {{"provider", b.provider == BackendConfig::Provider::remote ? "remote" : "deterministic"},
        {"endpoint", b.endpoint},
        {"model", b.model},
        {"embedding_model", b.embedding_model},
        {"api_key_env", b.api_key_env},
        {"timeout_ms", b.timeout_ms},
        {"max_concurrency", b.max_concurrency},
        {"max_retries", b.max_retries},
        {"retry_backoff_ms", b.retry_backoff_ms},
        {"seed", b.seed},
        {"dim", b.dim},
        {"summary_max_chars", b.summary_max_chars},
        {"prompt_dir", b.prompt_dir}}},
      {"server",
       {{"bind", c.server.bind},
        {"port", c.server.port},
        {"max_body_bytes", c.server.max_body_bytes},
        {"threads", c.server.threads}}},
      {"bench", {{"dataset", c.bench.dataset}, {"report", c.bench.report}}},
  };
}

}  // namespace hmem
