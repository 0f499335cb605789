#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hmem/core/events.hpp"
#include "hmem/core/graph.hpp"

// JSON forms of events and graph state. nlohmann::json objects keep keys
// sorted, so dump() of any value here is canonical.
namespace hmem::codec {

inline constexpr int kFormatVersion = 1;

using Json = nlohmann::json;

Json encode_turns(const std::vector<SpeakerTurn>& turns);
std::vector<SpeakerTurn> decode_turns(const Json& j);

Json encode_report(const IngestReport& r);
IngestReport decode_report(const Json& j);

Json encode_payload(const GraphEvent& event);
// Throws InvalidArgument for an unknown kind or a malformed payload.
GraphEvent decode_payload(std::string_view kind, const Json& payload);

// One memory.log line.
struct LogRecord {
  std::uint64_t seq = 0;
  GraphEvent event;
  Timestamp wall_ts = 0;
  std::uint64_t batch = 0;      // seq of the first record of its batch
  std::uint32_t batch_len = 0;  // records in the batch

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

// Canonical line without the trailing newline.
std::string encode_record(const LogRecord& r);
// Throws InvalidArgument when the line is not a valid record.
LogRecord decode_record(std::string_view line);

// Every node, index-free, plus counters, idempotency map and version.
Json encode_graph(const GraphState& g);
GraphState decode_graph(const Json& j);

// Equality oracle for replay and snapshot round trips.
std::string canonical_serialize(const GraphState& g);

}  // namespace hmem::codec
