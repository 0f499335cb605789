#include "hmem/service/dump.hpp"

#include "hmem/persistence/codec.hpp"
#include "hmem/persistence/event_log.hpp"

namespace hmem {

namespace {

std::string dot_id(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::size_t dump_log(const std::filesystem::path& log_path, std::ostream& out) {
  LogScan scan = scan_log(log_path);
  for (const ScannedRecord& r : scan.records) out << codec::encode_record(r.record) << "\n";
  return scan.records.size();
}

void dump_snapshot(const GraphState& graph, std::ostream& out) {
  out << codec::encode_graph(graph).dump(2) << "\n";
}

void dump_dot(const GraphState& graph, std::ostream& out) {
  out << "digraph memory {\n  rankdir=LR;\n";
  for (const auto& [id, s] : graph.sessions()) {
    out << "  " << dot_id("session:" + id) << " [shape=box, label=" << dot_id(id) << "];\n";
  }
  for (const auto& [id, e] : graph.entities()) {
    out << "  " << dot_id("entity:" + id) << " [shape=ellipse, label=" << dot_id(e->name) << "];\n";
  }
  for (const auto& [id, c] : graph.chunks()) {
    out << "  " << dot_id("chunk:" + id) << " [shape=note, label=" << dot_id(id) << "];\n";
  }
  for (const auto& [id, t] : graph.triples()) {
    out << "  " << dot_id("entity:" + t->subject_id) << " -> " << dot_id("entity:" + t->object_id)
        << " [label=" << dot_id(t->relation) << ", tooltip=" << dot_id(id) << "];\n";
    for (const std::string& sid : t->session_ids) {
      out << "  " << dot_id("session:" + sid) << " -> " << dot_id("entity:" + t->subject_id)
          << " [style=dashed, tooltip=" << dot_id(id) << "];\n";
    }
    for (const std::string& cid : t->chunk_ids) {
      out << "  " << dot_id("entity:" + t->subject_id) << " -> " << dot_id("chunk:" + cid)
          << " [style=dotted, tooltip=" << dot_id(id) << "];\n";
    }
  }
  out << "}\n";
}

}  // namespace hmem
