#include "nrrw/tree.hpp"

#include <algorithm>
#include <string>

#include "nrrw/errors.hpp"

namespace nrrw {

GrowingTree::GrowingTree(std::uint64_t step, std::uint64_t reserve_vertices) : step_(step) {
  reserve(reserve_vertices);
  parent_.push_back(no_parent);
  depth_.push_back(0);
  children_.emplace_back();
}

void GrowingTree::reserve(std::uint64_t vertices) {
  vertices = std::max<std::uint64_t>(vertices, 1);
  parent_.reserve(vertices);
  depth_.reserve(vertices);
  children_.reserve(vertices);
}

void GrowingTree::check(Vertex v) const {
  if (v >= vertex_count()) {
    throw LookupError("vertex " + std::to_string(v) + " not in tree of " +
                      std::to_string(vertex_count()) + " vertices");
  }
}

Vertex GrowingTree::parent(Vertex v) const {
  check(v);
  return parent_[v];
}

std::span<const Vertex> GrowingTree::children(Vertex v) const {
  check(v);
  return children_[v];
}

std::uint64_t GrowingTree::degree(Vertex v) const {
  check(v);
  return degree_unchecked(v);
}

std::uint64_t GrowingTree::structural_degree(Vertex v) const {
  check(v);
  return children_[v].size() + (v == root ? 0 : 1);
}

std::uint64_t GrowingTree::depth(Vertex v) const {
  check(v);
  return depth_[v];
}

std::uint64_t GrowingTree::birth_time(Vertex v) const {
  check(v);
  return v * step_;
}

bool GrowingTree::is_leaf(Vertex v) const {
  check(v);
  return degree_unchecked(v) == 1;
}

Vertex GrowingTree::attach(Vertex at) {
  check(at);
  const Vertex label = vertex_count();
  const std::uint64_t d = depth_[at] + 1;
  parent_.push_back(at);
  depth_.push_back(d);
  children_.emplace_back();
  children_[at].push_back(label);
  max_depth_ = std::max(max_depth_, d);
  return label;
}

}  // namespace nrrw
