#pragma once

#include <cstdint>
#include <stdexcept>

#include "nrrw/oracles.hpp"

namespace nrrw::oracle {

namespace detail {

template <class Scalar>
struct StarEnumeration {
  std::uint64_t s;
  std::uint64_t parent_slots;
  std::uint64_t target_degree;
  Scalar reached{0};

  // Walks every neighbour choice individually (each leaf is its own branch).
  void visit(bool at_center, std::uint64_t leaves, std::uint64_t t, const Scalar& weight) {
    if (parent_slots + leaves >= target_degree) {
      reached += weight;
      return;
    }
    const std::uint64_t next = t + 1;
    auto settle = [&](bool center_after, const Scalar& w) {
      std::uint64_t grown = leaves;
      if (next % s == 0) {
        if (!center_after) throw std::logic_error("walker on a leaf at an attachment time");
        ++grown;
      }
      visit(center_after, grown, next, w);
    };
    if (!at_center) {
      settle(true, weight);
      return;
    }
    const Scalar branch = weight / Scalar(parent_slots + leaves);
    // parent slots end the process without reaching the target
    for (std::uint64_t leaf = 0; leaf < leaves; ++leaf) settle(false, branch);
  }
};

}  // namespace detail

/// Brute-force star_tail: sums the probability of every step-by-step
/// outcome path on which the centre reaches the target degree (k+1 for the
/// non-root variant, k+2 for the root) before the parent edge is taken.
template <class Scalar>
Scalar star_tail_by_enumeration(std::uint64_t s, std::uint64_t k, StarVariant variant) {
  detail::require_even_step(s);
  if (k == 0) throw DomainError("star_tail_by_enumeration requires k >= 1");
  const std::uint64_t parent_slots = variant == StarVariant::root ? 2 : 1;
  detail::StarEnumeration<Scalar> walk{s, parent_slots, k + parent_slots, Scalar(0)};
  walk.visit(true, 1, 0, Scalar(1));
  return walk.reached;
}

}  // namespace nrrw::oracle
