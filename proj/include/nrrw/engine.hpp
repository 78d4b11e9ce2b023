#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nrrw/prng.hpp"
#include "nrrw/tree.hpp"

namespace nrrw {

struct SimConfig {
  std::uint64_t step_parameter = 1;  ///< walker steps between attachments (s)
  std::uint64_t target_nodes = 1;    ///< stop once vertex N-1 is attached
  std::uint64_t seed = 0;
  bool record_trajectory = false;
  std::uint64_t stream_id = 0;

  /// Walker steps in a complete run: s * (N - 1).
  std::uint64_t total_steps() const noexcept { return step_parameter * (target_nodes - 1); }
  /// Odd s > 1: well defined but not covered by any proven result.
  bool exploratory() const noexcept { return step_parameter > 1 && step_parameter % 2 == 1; }
};

/// Throws ConfigError unless s >= 1 and N >= 1.
void validate(const SimConfig& config);

struct WalkerState {
  Vertex position = GrowingTree::root;
  std::uint64_t clock = 0;
  /// (depth(position) + clock) mod 2, maintained incrementally.
  std::uint8_t parity = 0;
  std::uint64_t parity_change_count = 0;
};

struct StepEvent {
  std::uint64_t time = 0;
  Vertex from = GrowingTree::root;
  Vertex to = GrowingTree::root;
  bool via_self_loop = false;
  std::optional<Vertex> attached_vertex;
};

/// One walker step followed, when the clock hits a multiple of s and the
/// tree is still below `target_nodes`, by a zero-time attachment at the
/// walker's new position.
StepEvent walker_step(GrowingTree& tree, WalkerState& walker, PrngStream& rng,
                      std::uint64_t step_parameter, std::uint64_t target_nodes);

/// A single NRRW run. Owns its tree, walker and random stream; movable,
/// not shared.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config);

  const SimConfig& config() const noexcept { return config_; }
  const GrowingTree& tree() const noexcept { return tree_; }
  const WalkerState& walker() const noexcept { return walker_; }
  const std::vector<StepEvent>& trajectory() const noexcept { return trajectory_; }
  bool finished() const noexcept { return walker_.clock >= config_.total_steps(); }

  StepEvent step();

  /// Runs to completion, handing every event to `observer(event, tree, walker)`.
  template <class Observer>
  void run(Observer&& observer) {
    const std::uint64_t total = config_.total_steps();
    while (walker_.clock < total) {
      const StepEvent event = step();
      observer(event, tree_, walker_);
    }
  }

  void run() {
    run([](const StepEvent&, const GrowingTree&, const WalkerState&) {});
  }

  GrowingTree release_tree() && { return std::move(tree_); }

 private:
  SimConfig config_;
  GrowingTree tree_;
  WalkerState walker_;
  PrngStream rng_;
  std::vector<StepEvent> trajectory_;
};

}  // namespace nrrw
