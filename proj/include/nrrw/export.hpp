#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "nrrw/engine.hpp"
#include "nrrw/tree.hpp"

namespace nrrw {

/// "# nrrw s=<s> n=<N> seed=<seed>", then "0 0" for the self-loop, then one
/// "parent child" line per vertex in label order.
void write_edge_list(std::ostream& out, const GrowingTree& tree, const SimConfig& config);

struct EdgeList {
  std::uint64_t step_parameter = 0;
  std::uint64_t nodes = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<Vertex, Vertex>> edges;  // includes (0, 0)
};

/// Parses the format written by write_edge_list. Throws std::runtime_error
/// on malformed input.
EdgeList read_edge_list(std::istream& in);

/// Undirected DOT graph; every vertex is declared explicitly.
void write_dot(std::ostream& out, const GrowingTree& tree);

/// CSV "t,position,via_self_loop,attached"; `attached` is empty when no
/// vertex was added at that step.
void write_trajectory_csv(std::ostream& out, std::span<const StepEvent> events);

}  // namespace nrrw
