#include "hmem/persistence/snapshot.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hmem/error.hpp"
#include "hmem/persistence/codec.hpp"
#include "hmem/persistence/event_log.hpp"

namespace hmem {

namespace {

constexpr std::string_view kPrefix = "snapshot-";
constexpr std::string_view kSuffix = ".snap";

std::optional<std::uint64_t> version_from_name(const std::string& name) {
  if (name.size() <= kPrefix.size() + kSuffix.size() || name.rfind(kPrefix, 0) != 0 ||
      name.compare(name.size() - kSuffix.size(), kSuffix.size(), kSuffix) != 0) {
    return std::nullopt;
  }
  std::string digits = name.substr(kPrefix.size(), name.size() - kPrefix.size() - kSuffix.size());
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  return std::stoull(digits);
}

void write_durably(const std::filesystem::path& path, const std::string& data) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot create " + path.string() + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw IoError("write failed on " + path.string() + ": " + std::strerror(err));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    int err = errno;
    ::close(fd);
    throw IoError("fsync failed on " + path.string() + ": " + std::strerror(err));
  }
  ::close(fd);
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string snapshot_file_name(std::uint64_t graph_version) {
  return std::string(kPrefix) + std::to_string(graph_version) + std::string(kSuffix);
}

SnapshotInfo write_snapshot(const GraphState& graph, std::uint64_t last_seq, std::size_t embedding_dim,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  codec::Json body = codec::encode_graph(graph);
  body["format_version"] = codec::kFormatVersion;
  body["last_seq"] = last_seq;
  body["embedding_dim"] = embedding_dim;
  std::string checksum = sha256_hex(body.dump());
  body["checksum"] = checksum;

  SnapshotInfo info{dir / snapshot_file_name(graph.version()), graph.version(), last_seq, embedding_dim};
  std::filesystem::path tmp = info.path;
  tmp += ".tmp";
  write_durably(tmp, body.dump() + "\n");
  std::error_code ec;
  std::filesystem::rename(tmp, info.path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
  int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
  return info;
}

LoadedSnapshot load_snapshot(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  codec::Json j = codec::Json::parse(data, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("checksum") || !j["checksum"].is_string()) {
    throw CorruptData(path.string() + ": not a snapshot document", 0);
  }
  std::string stored = j["checksum"].get<std::string>();
  j.erase("checksum");
  if (sha256_hex(j.dump()) != stored) throw CorruptData(path.string() + ": checksum mismatch", 0);

  LoadedSnapshot out;
  try {
    if (j.at("format_version").get<int>() != codec::kFormatVersion) {
      throw CorruptData(path.string() + ": unsupported format_version", 0);
    }
    out.info = {path, j.at("graph_version").get<std::uint64_t>(), j.at("last_seq").get<std::uint64_t>(),
                j.at("embedding_dim").get<std::size_t>()};
    if (expected_dim && out.info.embedding_dim != *expected_dim) {
      throw ConfigError("backend.dim", "snapshot " + path.string() + " stores embedding_dim " +
                                           std::to_string(out.info.embedding_dim) + ", backend produces " +
                                           std::to_string(*expected_dim));
    }
    out.state = codec::decode_graph(j);
  } catch (const InvalidArgument& e) {
    throw CorruptData(path.string() + ": " + e.what(), 0);
  } catch (const codec::Json::exception& e) {
    throw CorruptData(path.string() + ": " + e.what(), 0);
  }
  return out;
}

std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir) {
  std::vector<std::pair<std::uint64_t, std::filesystem::path>> found;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return {};
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (auto v = version_from_name(entry.path().filename().string())) found.emplace_back(*v, entry.path());
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::filesystem::path> out;
  for (auto& [v, p] : found) out.push_back(std::move(p));
  return out;
}

void check_embedding_dim(const GraphState& graph, std::size_t expected_dim) {
  auto mismatch = [&](const Embedding& e) { return !e.empty() && e.dim() != expected_dim; };
  for (const auto& [id, t] : graph.triples()) {
    if (mismatch(t->relation_embedding)) {
      throw ConfigError("backend.dim", "triple " + id + " has embedding dimension " +
                                           std::to_string(t->relation_embedding.dim()) + ", backend produces " +
                                           std::to_string(expected_dim));
    }
  }
  for (const auto& [id, s] : graph.sessions()) {
    if (mismatch(s->summary_embedding)) {
      throw ConfigError("backend.dim", "session " + id + " has embedding dimension " +
                                           std::to_string(s->summary_embedding.dim()) + ", backend produces " +
                                           std::to_string(expected_dim));
    }
  }
}

RecoveryResult recover(const std::filesystem::path& dir, std::size_t expected_dim) {
  RecoveryResult out;
  GraphState base;
  std::uint64_t after = 0;
  for (const std::filesystem::path& p : list_snapshots(dir)) {
    try {
      LoadedSnapshot snap = load_snapshot(p, expected_dim);
      base = std::move(snap.state);
      after = snap.info.last_seq;
      out.snapshot = snap.info;
      break;
    } catch (const CorruptData& e) {
      out.warnings.push_back(std::string("skipping snapshot: ") + e.what());
    }
  }
  ReplayResult r = replay_log(dir / "memory.log", std::move(base), after);
  if (r.corrupt_position) {
    out.warnings.push_back("log replay stopped at byte " + std::to_string(*r.corrupt_position) + ": " +
                           r.corrupt_reason);
  }
  out.state = std::move(r.state);
  out.last_seq = r.last_seq;
  out.events_replayed = r.events_applied;
  out.log_corrupt_position = r.corrupt_position;
  check_embedding_dim(out.state, expected_dim);
  return out;
}

}  // namespace hmem
