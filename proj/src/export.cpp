#include "nrrw/export.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nrrw {

void write_edge_list(std::ostream& out, const GrowingTree& tree, const SimConfig& config) {
  out << "# nrrw s=" << config.step_parameter << " n=" << config.target_nodes
      << " seed=" << config.seed << '\n';
  out << "0 0\n";
  for (Vertex v = 1; v < tree.vertex_count(); ++v) {
    out << tree.parent_unchecked(v) << ' ' << v << '\n';
  }
}

namespace {

std::uint64_t header_field(const std::string& header, const std::string& key) {
  const auto pos = header.find(" " + key + "=");
  if (pos == std::string::npos) throw std::runtime_error("edge list header lacks " + key);
  return std::stoull(header.substr(pos + key.size() + 2));
}

}  // namespace

EdgeList read_edge_list(std::istream& in) {
  EdgeList list;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# nrrw", 0) != 0) {
    throw std::runtime_error("edge list must start with '# nrrw' header");
  }
  list.step_parameter = header_field(line, "s");
  list.nodes = header_field(line, "n");
  list.seed = header_field(line, "seed");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    Vertex u = 0;
    Vertex v = 0;
    if (!(fields >> u >> v)) throw std::runtime_error("malformed edge line: " + line);
    list.edges.emplace_back(u, v);
  }
  return list;
}

void write_dot(std::ostream& out, const GrowingTree& tree) {
  out << "graph nrrw {\n";
  for (Vertex v = 0; v < tree.vertex_count(); ++v) out << "  " << v << ";\n";
  out << "  0 -- 0;\n";
  for (Vertex v = 1; v < tree.vertex_count(); ++v) {
    out << "  " << tree.parent_unchecked(v) << " -- " << v << ";\n";
  }
  out << "}\n";
}

void write_trajectory_csv(std::ostream& out, std::span<const StepEvent> events) {
  out << "t,position,via_self_loop,attached\n";
  for (const StepEvent& e : events) {
    out << e.time << ',' << e.to << ',' << (e.via_self_loop ? 1 : 0) << ',';
    if (e.attached_vertex) out << *e.attached_vertex;
    out << '\n';
  }
}

}  // namespace nrrw
