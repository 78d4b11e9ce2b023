#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace nrrw {

using Vertex = std::uint64_t;

/// The tree grown by the walker: vertex 0 is the root and carries the only
/// self-loop. Storage is append-only and indexed by label; vertex j is born
/// at time j * step.
///
/// Degrees are walk degrees: the self-loop counts 2 toward the root.
class GrowingTree {
 public:
  static constexpr Vertex root = 0;
  static constexpr Vertex no_parent = std::numeric_limits<Vertex>::max();

  explicit GrowingTree(std::uint64_t step, std::uint64_t reserve_vertices = 1);

  std::uint64_t vertex_count() const noexcept { return parent_.size(); }
  /// Tree edges, excluding the self-loop.
  std::uint64_t edge_count() const noexcept { return vertex_count() - 1; }
  std::uint64_t step() const noexcept { return step_; }

  // Checked accessors; throw LookupError for unknown vertices.
  Vertex parent(Vertex v) const;
  std::span<const Vertex> children(Vertex v) const;
  std::uint64_t degree(Vertex v) const;
  std::uint64_t structural_degree(Vertex v) const;
  std::uint64_t depth(Vertex v) const;
  std::uint64_t birth_time(Vertex v) const;
  bool is_leaf(Vertex v) const;

  // Unchecked hot-path accessors.
  std::uint64_t degree_unchecked(Vertex v) const noexcept {
    return children_[v].size() + (v == root ? 2 : 1);
  }
  std::uint64_t depth_unchecked(Vertex v) const noexcept { return depth_[v]; }
  Vertex parent_unchecked(Vertex v) const noexcept { return parent_[v]; }

  /// Neighbor slot `index` in [0, degree(v)): slot 0 is the parent edge
  /// (slots 0 and 1 are the self-loop at the root), the rest are children
  /// in birth order.
  Vertex neighbor_unchecked(Vertex v, std::uint64_t index) const noexcept {
    if (v == root) return index < 2 ? root : children_[root][index - 2];
    return index == 0 ? parent_[v] : children_[v][index - 1];
  }

  void reserve(std::uint64_t vertices);

  /// Appends a new leaf under `at` and returns its label.
  Vertex attach(Vertex at);

  std::uint64_t max_depth() const noexcept { return max_depth_; }

 private:
  void check(Vertex v) const;

  std::uint64_t step_;
  std::vector<Vertex> parent_;
  std::vector<std::uint64_t> depth_;
  std::vector<std::vector<Vertex>> children_;
  std::uint64_t max_depth_ = 0;
};

// Free-function spellings of the lookup operations.
inline std::uint64_t depth_of(const GrowingTree& tree, Vertex v) { return tree.depth(v); }
inline std::uint64_t degree_of(const GrowingTree& tree, Vertex v) { return tree.degree(v); }
inline bool is_leaf(const GrowingTree& tree, Vertex v) { return tree.is_leaf(v); }

}  // namespace nrrw
