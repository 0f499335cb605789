#include "hmem/persistence/event_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hmem/error.hpp"

namespace hmem {

namespace {

std::string errno_message(const std::string& what, const std::filesystem::path& p) {
  return what + " " + p.string() + ": " + std::strerror(errno);
}

}  // namespace

LogScan scan_log(const std::filesystem::path& path) {
  LogScan scan;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return scan;
    throw IoError("cannot open " + path.string());
  }
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::vector<ScannedRecord> pending;
  std::uint64_t expected = 0;
  std::size_t pos = 0;
  auto fail = [&](std::size_t at, std::string reason, bool torn = false) {
    scan.corrupt_position = at;
    scan.corrupt_reason = std::move(reason);
    scan.torn_tail = torn;
  };
  while (pos < data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      fail(pending.empty() ? pos : pending.front().offset, "truncated final line", true);
      break;
    }
    codec::LogRecord r;
    try {
      r = codec::decode_record(std::string_view(data).substr(pos, nl - pos));
    } catch (const Error& e) {
      fail(pos, e.what());
      break;
    }
    if (expected != 0 && r.seq != expected) {
      fail(pos, "seq gap: expected " + std::to_string(expected) + ", found " + std::to_string(r.seq));
      break;
    }
    bool opens_batch = r.batch == r.seq;
    if (pending.empty() != opens_batch ||
        (!pending.empty() && (r.batch != pending.front().record.batch ||
                              r.batch_len != pending.front().record.batch_len))) {
      fail(pos, "batch markers out of order");
      break;
    }
    expected = r.seq + 1;
    pending.push_back({std::move(r), pos});
    pos = nl + 1;
    if (pending.size() == pending.front().record.batch_len) {
      for (ScannedRecord& s : pending) scan.records.push_back(std::move(s));
      pending.clear();
      scan.valid_bytes = pos;
    }
  }
  if (!pending.empty() && !scan.corrupt_position) {
    fail(pending.front().offset, "incomplete final batch", true);
  }
  return scan;
}

ReplayResult replay_log(const std::filesystem::path& path, GraphState base, std::uint64_t after_seq) {
  LogScan scan = scan_log(path);
  ReplayResult out;
  out.state = std::move(base);
  out.last_seq = after_seq;
  out.corrupt_position = scan.corrupt_position;
  out.corrupt_reason = scan.corrupt_reason;

  std::size_t i = 0;
  while (i < scan.records.size()) {
    const codec::LogRecord& head = scan.records[i].record;
    std::size_t n = head.batch_len;
    if (head.seq <= after_seq) {
      i += n;
      continue;
    }
    if (head.seq != out.last_seq + 1) {
      out.corrupt_position = scan.records[i].offset;
      out.corrupt_reason = "log does not continue from seq " + std::to_string(out.last_seq);
      break;
    }
    GraphState next = out.state;
    try {
      for (std::size_t j = i; j < i + n; ++j) apply_event(next, scan.records[j].record.event);
    } catch (const Error& e) {
      out.corrupt_position = scan.records[i].offset;
      out.corrupt_reason = std::string("batch does not apply: ") + e.what();
      break;
    }
    next.bump_version();
    out.state = std::move(next);
    out.last_seq = scan.records[i + n - 1].record.seq;
    out.batches_applied += 1;
    out.events_applied += n;
    i += n;
  }
  return out;
}

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  LogScan scan = scan_log(path_);
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError(errno_message("cannot open", path_));
  std::size_t on_disk = std::filesystem::file_size(path_);
  if (on_disk > scan.valid_bytes) {
    if (!scan.torn_tail) {
      ::close(fd_);
      throw CorruptData(path_.string() + ": " + scan.corrupt_reason, *scan.corrupt_position);
    }
    if (::ftruncate(fd_, static_cast<off_t>(scan.valid_bytes)) != 0 || ::fsync(fd_) != 0) {
      int err = errno;
      ::close(fd_);
      errno = err;
      throw IoError(errno_message("cannot repair torn tail of", path_));
    }
    repaired_at_ = scan.valid_bytes;
  }
  size_ = scan.valid_bytes;
  if (!scan.records.empty()) last_seq_ = scan.records.back().record.seq;
}

void EventLog::continue_from(std::uint64_t seq) {
  if (size_ != 0) throw std::logic_error("continue_from on a non-empty log");
  last_seq_ = seq;
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

std::uint64_t EventLog::append(const std::vector<GraphEvent>& events, Timestamp wall_ts) {
  if (events.empty()) return last_seq_;
  const std::uint64_t first = last_seq_ + 1;
  std::string buf;
  for (std::size_t i = 0; i < events.size(); ++i) {
    codec::LogRecord r{first + i, events[i], wall_ts, first, static_cast<std::uint32_t>(events.size())};
    buf += codec::encode_record(r);
    buf += '\n';
  }

  auto roll_back = [&](const std::string& message) {
    // Best effort: the next open repairs anything left behind.
    if (::ftruncate(fd_, static_cast<off_t>(size_)) != 0) {
    }
    throw IoError(message);
  };

  std::size_t written = 0;
  while (written < buf.size()) {
    ssize_t n = ::write(fd_, buf.data() + written, buf.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      roll_back(errno_message("write failed on", path_));
    }
    written += static_cast<std::size_t>(n);
  }
  if (fault_hook_) {
    try {
      fault_hook_();
    } catch (const std::exception& e) {
      roll_back(std::string("append aborted: ") + e.what());
    }
  }
  if (::fsync(fd_) != 0) roll_back(errno_message("fsync failed on", path_));

  size_ += buf.size();
  last_seq_ = first + events.size() - 1;
  return last_seq_;
}

}  // namespace hmem
