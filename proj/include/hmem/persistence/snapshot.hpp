#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hmem/core/graph.hpp"

namespace hmem {

struct SnapshotInfo {
  std::filesystem::path path;
  std::uint64_t graph_version = 0;
  std::uint64_t last_seq = 0;  // last log seq folded into the snapshot
  std::size_t embedding_dim = 0;
};

// "snapshot-{graph_version}.snap"
std::string snapshot_file_name(std::uint64_t graph_version);

// Writes dir/snapshot-{version}.snap through a temp file and rename.
SnapshotInfo write_snapshot(const GraphState& graph, std::uint64_t last_seq,
                            std::size_t embedding_dim, const std::filesystem::path& dir);

struct LoadedSnapshot {
  GraphState state;
  SnapshotInfo info;
};

// CorruptData on a checksum or format failure; ConfigError when the stored
// embedding dimension differs from expected_dim.
LoadedSnapshot load_snapshot(const std::filesystem::path& path,
                             std::optional<std::size_t> expected_dim = std::nullopt);

// Snapshot files in dir, newest graph version first.
std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir);

// Hex SHA-256.
std::string sha256_hex(std::string_view data);

struct RecoveryResult {
  GraphState state;
  std::uint64_t last_seq = 0;
  std::optional<SnapshotInfo> snapshot;
  std::size_t events_replayed = 0;
  std::optional<std::size_t> log_corrupt_position;
  std::vector<std::string> warnings;
};

// Newest loadable snapshot plus the log suffix after it. Snapshots that fail
// their checksum are skipped. Every stored embedding must have expected_dim.
RecoveryResult recover(const std::filesystem::path& dir, std::size_t expected_dim);

// ConfigError naming the first node whose embedding has another dimension.
void check_embedding_dim(const GraphState& graph, std::size_t expected_dim);

}  // namespace hmem
