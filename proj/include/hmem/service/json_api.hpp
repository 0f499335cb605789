#pragma once

#include <json.hpp>

#include "hmem/pipeline/update.hpp"
#include "hmem/retrieval/retriever.hpp"
#include "hmem/service/engine.hpp"

// Request parsing and response rendering shared by the HTTP service and the
// CLI. Parsers throw InvalidArgument with a "field: reason" message.
namespace hmem::api {

using Json = nlohmann::json;

// Integer seconds or an ISO-8601 string.
Timestamp parse_timestamp(const Json& v, const std::string& field);

IngestRequest parse_ingest_request(const Json& body);
Json to_json(const IngestReport& report);

struct QueryRequest {
  Query query;
  bool with_timings = false;
};
QueryRequest parse_query_request(const Json& body);

// Scores, context and version. Timings only when asked for, which keeps the
// default body a pure function of graph state and query.
Json to_json(const RetrievalResult& result, const GraphState& graph, bool with_timings = false);

Json session_view(const SessionNode& session);
Json to_json(const EngineStats& stats);

Json error_body(std::string_view code, std::string_view message);

}  // namespace hmem::api
