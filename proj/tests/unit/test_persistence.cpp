#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "hmem/error.hpp"
#include "hmem/persistence/codec.hpp"
#include "hmem/persistence/event_log.hpp"
#include "hmem/persistence/snapshot.hpp"

using namespace hmem;
using hmem::testing::make_chunk;
using hmem::testing::StubBackend;
using hmem::testing::TempDir;
namespace fs = std::filesystem;

namespace {

// Ingests a corpus and logs every committed batch.
struct LoggedWorld {
  GraphStore store;
  StubBackend backend{32};
  UpdatePipeline pipeline{store, backend};
  std::unique_ptr<EventLog> log;

  explicit LoggedWorld(const fs::path& dir) {
    log = std::make_unique<EventLog>(dir / "memory.log");
    pipeline.set_commit_hook([this](const std::vector<GraphEvent>& ev) { log->append(ev, 42); });
  }
  void ingest(std::size_t sessions, std::size_t chunks, std::uint64_t seed) {
    for (const auto& r : hmem::testing::synthetic_corpus(sessions, chunks, seed, 1'700'000'000)) {
      pipeline.ingest_chunk(r);
    }
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

}  // namespace

TEST(Codec, EveryEventKindRoundTrips) {
  IngestReport rep{"c0000000001", true, 2, 1, true, 17, 99};
  std::vector<GraphEvent> events = {
      SessionUpserted{"s1", "sum", {"a", "b"}, 5, Embedding::normalize({1, 2})},
      ChunkInserted{"c0000000001", "s1", "A: b", {{"A", "b"}}, 5, "key", rep},
      TripleInserted{"t0000000001", "A", "person", "r", "B", "other", "s1", "c0000000001", 5,
                     Embedding::normalize({0.5f, -1})},
      HyperlinkAdded{"t0000000001", "s2", "c0000000002"}};
  for (std::size_t i = 0; i < events.size(); ++i) {
    codec::LogRecord r{i + 1, events[i], 123, 1, 4};
    std::string line = codec::encode_record(r);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(codec::decode_record(line), r);
  }
  EXPECT_EQ(codec::decode_report(codec::encode_report(rep)), rep);
}

TEST(Codec, MalformedRecordsAreCorruptData) {
  EXPECT_THROW(codec::decode_record("not json"), CorruptData);
  EXPECT_THROW(codec::decode_record("{}"), CorruptData);
  codec::LogRecord r{5, HyperlinkAdded{"t", "s", "c"}, 1, 9, 1};  // batch after seq
  EXPECT_THROW(codec::decode_record(codec::encode_record(r)), CorruptData);
  std::string line = codec::encode_record({1, HyperlinkAdded{"t", "s", "c"}, 1, 1, 1});
  auto j = codec::Json::parse(line);
  j["format_version"] = 99;
  EXPECT_THROW(codec::decode_record(j.dump()), CorruptData);
}

TEST(Codec, GraphRoundTripIsExact) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GraphState g = hmem::testing::random_graph(seed, 60);
    GraphState back = codec::decode_graph(codec::encode_graph(g));
    EXPECT_EQ(codec::canonical_serialize(back), codec::canonical_serialize(g));
    EXPECT_EQ(back.next_chunk_seq(), g.next_chunk_seq());
    EXPECT_EQ(back.hyperlink_count(), g.hyperlink_count());
    EXPECT_EQ(back.neighbors("entity 1").size(), g.neighbors("entity 1").size());
  }
}

TEST(EventLog, EmptyBatchWritesNothing) {
  TempDir dir;
  EventLog log(dir / "memory.log");
  EXPECT_EQ(log.append({}, 1), 0u);
  EXPECT_EQ(log.size_bytes(), 0u);
  EXPECT_EQ(fs::file_size(dir / "memory.log"), 0u);
}

TEST(EventLog, ReplayEqualsTheLiveGraph) {
  TempDir dir;
  LoggedWorld w(dir.path());
  w.ingest(3, 6, 1);
  ReplayResult r = replay_log(dir / "memory.log");
  EXPECT_FALSE(r.corrupt_position);
  EXPECT_EQ(r.batches_applied, 18u);
  EXPECT_EQ(r.last_seq, w.log->last_seq());
  EXPECT_EQ(codec::canonical_serialize(r.state), codec::canonical_serialize(*w.store.snapshot()));
  EXPECT_EQ(r.state.version(), w.store.snapshot()->version());
}

TEST(EventLog, ReopenContinuesTheSequence) {
  TempDir dir;
  std::uint64_t seq;
  {
    LoggedWorld w(dir.path());
    w.ingest(1, 3, 2);
    seq = w.log->last_seq();
  }
  EventLog log(dir / "memory.log");
  EXPECT_EQ(log.last_seq(), seq);
  EXPECT_FALSE(log.repaired_at());
  EXPECT_EQ(log.append({HyperlinkAdded{"t0000000001", "session-1", "c0000000001"}}, 1), seq + 1);
  EXPECT_THROW(log.continue_from(3), std::logic_error);
}

TEST(EventLog, TornTailIsRepairedOnOpen) {
  TempDir dir;
  std::size_t good;
  {
    LoggedWorld w(dir.path());
    w.ingest(1, 4, 3);
    good = w.log->size_bytes();
  }
  std::string body = read_file(dir / "memory.log");
  write_file(dir / "memory.log", body + "{\"format_version\":1,\"seq\":");
  LogScan scan = scan_log(dir / "memory.log");
  EXPECT_TRUE(scan.torn_tail);
  EXPECT_EQ(scan.valid_bytes, good);

  ReplayResult r = replay_log(dir / "memory.log");
  EXPECT_EQ(r.batches_applied, 4u);

  EventLog log(dir / "memory.log");
  EXPECT_EQ(log.repaired_at(), std::optional<std::size_t>(good));
  EXPECT_EQ(fs::file_size(dir / "memory.log"), good);
}

TEST(EventLog, IncompleteFinalBatchIsTreatedAsTorn) {
  TempDir dir;
  std::size_t after_first;
  {
    LoggedWorld w(dir.path());
    w.ingest(1, 1, 4);
    after_first = w.log->size_bytes();
    w.ingest(1, 1, 5);
  }
  std::string body = read_file(dir / "memory.log");
  // Keep the second batch's first record only.
  std::size_t cut = body.find('\n', after_first) + 1;
  write_file(dir / "memory.log", body.substr(0, cut));
  LogScan scan = scan_log(dir / "memory.log");
  EXPECT_TRUE(scan.torn_tail);
  EXPECT_EQ(scan.valid_bytes, after_first);
  EXPECT_EQ(replay_log(dir / "memory.log").batches_applied, 1u);
}

TEST(EventLog, MidFileCorruptionIsRefusedWithoutTouchingTheFile) {
  TempDir dir;
  {
    LoggedWorld w(dir.path());
    w.ingest(1, 4, 6);
  }
  std::string body = read_file(dir / "memory.log");
  std::size_t second_line = body.find('\n') + 1;
  body[second_line + 3] = '#';
  write_file(dir / "memory.log", body);
  LogScan scan = scan_log(dir / "memory.log");
  ASSERT_TRUE(scan.corrupt_position);
  EXPECT_FALSE(scan.torn_tail);
  EXPECT_THROW(EventLog(dir / "memory.log"), CorruptData);
  EXPECT_EQ(read_file(dir / "memory.log"), body);
  ReplayResult r = replay_log(dir / "memory.log");
  EXPECT_TRUE(r.corrupt_position);
  EXPECT_EQ(r.batches_applied, 0u);
}

TEST(EventLog, FaultBetweenWriteAndSyncRollsBack) {
  TempDir dir;
  EventLog log(dir / "memory.log");
  log.append({HyperlinkAdded{"a", "b", "c"}}, 1);
  const std::size_t size = log.size_bytes();
  log.set_fault_hook([] { throw std::runtime_error("power cut"); });
  EXPECT_THROW(log.append({HyperlinkAdded{"d", "e", "f"}}, 1), IoError);
  EXPECT_EQ(log.last_seq(), 1u);
  EXPECT_EQ(fs::file_size(dir / "memory.log"), size);
  log.set_fault_hook(nullptr);
  EXPECT_EQ(log.append({HyperlinkAdded{"d", "e", "f"}}, 1), 2u);
}

TEST(Snapshot, RoundTripAndListing) {
  TempDir dir;
  GraphState g = hmem::testing::random_graph(9, 50);
  g.set_version(7);
  SnapshotInfo info = write_snapshot(g, 33, 16, dir.path());
  EXPECT_EQ(info.path.filename(), snapshot_file_name(7));
  EXPECT_EQ(snapshot_file_name(7), "snapshot-7.snap");
  LoadedSnapshot s = load_snapshot(info.path, 16);
  EXPECT_EQ(s.info.last_seq, 33u);
  EXPECT_EQ(s.info.graph_version, 7u);
  EXPECT_EQ(codec::canonical_serialize(s.state), codec::canonical_serialize(g));
  g.set_version(12);
  write_snapshot(g, 40, 16, dir.path());
  auto list = list_snapshots(dir.path());
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].filename(), "snapshot-12.snap");
  EXPECT_THROW(load_snapshot(info.path, 8), ConfigError);
}

TEST(Snapshot, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Snapshot, ChecksumMismatchIsCorrupt) {
  TempDir dir;
  GraphState g = hmem::testing::random_graph(2, 10);
  SnapshotInfo info = write_snapshot(g, 0, 16, dir.path());
  std::string body = read_file(info.path);
  std::size_t pos = body.find("summary of");
  ASSERT_NE(pos, std::string::npos);
  body[pos] = 'S';
  write_file(info.path, body);
  EXPECT_THROW(load_snapshot(info.path), CorruptData);
}

TEST(Recovery, SnapshotPlusSuffixEqualsFullReplay) {
  TempDir dir;
  LoggedWorld w(dir.path());
  w.ingest(2, 4, 7);
  write_snapshot(*w.store.snapshot(), w.log->last_seq(), 32, dir.path());
  w.pipeline.ingest_chunk(make_chunk("late", 1'800'000'000, {{"Carol", "I joined Mastodon."}}));
  w.pipeline.ingest_chunk(make_chunk("late", 1'800'000'600, {{"Ben", "So did I."}}));
  w.pipeline.ingest_chunk(make_chunk("later", 1'800'001'200, {{"Dana", "Not me."}}));

  RecoveryResult r = recover(dir.path(), 32);
  ASSERT_TRUE(r.snapshot);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_GT(r.events_replayed, 0u);
  EXPECT_EQ(r.last_seq, w.log->last_seq());
  EXPECT_EQ(codec::canonical_serialize(r.state), codec::canonical_serialize(*w.store.snapshot()));
  EXPECT_EQ(r.state.version(), w.store.snapshot()->version());
  EXPECT_EQ(codec::canonical_serialize(replay_log(dir / "memory.log").state),
            codec::canonical_serialize(r.state));
}

TEST(Recovery, CorruptSnapshotFallsBackToTheLog) {
  TempDir dir;
  LoggedWorld w(dir.path());
  w.ingest(1, 5, 8);
  SnapshotInfo info = write_snapshot(*w.store.snapshot(), w.log->last_seq(), 32, dir.path());
  write_file(info.path, read_file(info.path).substr(0, 100));
  RecoveryResult r = recover(dir.path(), 32);
  EXPECT_FALSE(r.snapshot);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("skipping snapshot"), std::string::npos);
  EXPECT_EQ(codec::canonical_serialize(r.state), codec::canonical_serialize(*w.store.snapshot()));
}

TEST(Recovery, DimensionMismatchIsAConfigError) {
  TempDir dir;
  LoggedWorld w(dir.path());
  w.ingest(1, 2, 9);
  EXPECT_THROW(recover(dir.path(), 64), ConfigError);
  write_snapshot(*w.store.snapshot(), w.log->last_seq(), 32, dir.path());
  EXPECT_THROW(recover(dir.path(), 64), ConfigError);
  EXPECT_NO_THROW(recover(dir.path(), 32));
}

TEST(Recovery, EmptyDirectoryGivesAnEmptyGraph) {
  TempDir dir;
  RecoveryResult r = recover(dir.path(), 32);
  EXPECT_TRUE(r.state.sessions().empty());
  EXPECT_EQ(r.last_seq, 0u);
}
