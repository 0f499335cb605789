#pragma once

#include <filesystem>
#include <ostream>

#include "hmem/core/graph.hpp"

namespace hmem {

// Every record of the valid log prefix, one canonical line each. Returns the
// number of records written.
std::size_t dump_log(const std::filesystem::path& log_path, std::ostream& out);

// The graph in snapshot body form, pretty-printed.
void dump_snapshot(const GraphState& graph, std::ostream& out);

// Graphviz digraph: session, entity and chunk nodes; triples as labelled
// entity edges; hyperlinks as dashed edges.
void dump_dot(const GraphState& graph, std::ostream& out);

}  // namespace hmem
