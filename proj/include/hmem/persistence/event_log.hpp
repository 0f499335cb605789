#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hmem/core/graph.hpp"
#include "hmem/persistence/codec.hpp"

namespace hmem {

struct ScannedRecord {
  codec::LogRecord record;
  std::size_t offset = 0;  // byte offset of the line
};

// The valid prefix of a log: complete batches only, stopped at the first bad
// line or at a trailing partial batch.
struct LogScan {
  std::vector<ScannedRecord> records;
  std::size_t valid_bytes = 0;
  std::optional<std::size_t> corrupt_position;
  std::string corrupt_reason;
  // The bad bytes are what a write cut short by a crash leaves behind: an
  // unterminated final line or a final batch missing records.
  bool torn_tail = false;
};

LogScan scan_log(const std::filesystem::path& path);

struct ReplayResult {
  GraphState state;
  std::uint64_t last_seq = 0;
  std::size_t batches_applied = 0;
  std::size_t events_applied = 0;
  std::optional<std::size_t> corrupt_position;
  std::string corrupt_reason;
};

// Applies every complete batch with seq > after_seq on top of base. Each
// batch advances the graph version by one.
ReplayResult replay_log(const std::filesystem::path& path, GraphState base = {},
                        std::uint64_t after_seq = 0);

// Append-only memory.log writer. One batch is one write(2) plus fsync.
class EventLog {
 public:
  // Opens or creates the log. A torn tail left by a crash is cut back to the
  // last complete batch before anything new is appended; any other damage
  // throws CorruptData and leaves the file untouched.
  explicit EventLog(std::filesystem::path path);
  ~EventLog();

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  // Returns the last seq; an empty batch is a no-op. On I/O failure the file
  // is restored to its previous length and IoError is thrown.
  std::uint64_t append(const std::vector<GraphEvent>& events, Timestamp wall_ts);

  // Numbers the first record of an empty log seq + 1, so that a log
  // restarted beside a snapshot continues its sequence.
  void continue_from(std::uint64_t seq);

  std::uint64_t last_seq() const noexcept { return last_seq_; }
  std::size_t size_bytes() const noexcept { return size_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  // Bytes discarded from a torn tail at open, if any.
  std::optional<std::size_t> repaired_at() const noexcept { return repaired_at_; }

  // Test seam: runs after the write and before fsync; throwing simulates a
  // failed sync.
  void set_fault_hook(std::function<void()> hook) { fault_hook_ = std::move(hook); }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::uint64_t last_seq_ = 0;
  std::size_t size_ = 0;
  std::optional<std::size_t> repaired_at_;
  std::function<void()> fault_hook_;
};

}  // namespace hmem
