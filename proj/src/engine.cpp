#include "nrrw/engine.hpp"

#include <new>
#include <stdexcept>
#include <string>

#include "nrrw/errors.hpp"

namespace nrrw {

void validate(const SimConfig& config) {
  if (config.step_parameter == 0) throw ConfigError("step parameter s must be >= 1");
  if (config.target_nodes == 0) throw ConfigError("target node count N must be >= 1");
}

StepEvent walker_step(GrowingTree& tree, WalkerState& walker, PrngStream& rng,
                      std::uint64_t step_parameter, std::uint64_t target_nodes) {
  const Vertex from = walker.position;
  const std::uint64_t slot = rng.uniform_below(tree.degree_unchecked(from));
  const Vertex to = tree.neighbor_unchecked(from, slot);
  const bool via_loop = from == GrowingTree::root && slot < 2;

  walker.position = to;
  ++walker.clock;
  // Any tree edge changes depth by one, so the parity only moves on the loop.
  if (via_loop) {
    walker.parity ^= 1U;
    ++walker.parity_change_count;
  }

  StepEvent event{walker.clock, from, to, via_loop, std::nullopt};
  if (walker.clock % step_parameter == 0 && tree.vertex_count() < target_nodes) {
    event.attached_vertex = tree.attach(to);
  }
  return event;
}

Simulation::Simulation(const SimConfig& config)
    : config_((validate(config), config)),
      tree_(config.step_parameter),
      rng_(config.seed, config.stream_id) {
  try {
    tree_.reserve(config_.target_nodes);
    if (config_.record_trajectory) trajectory_.reserve(config_.total_steps());
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot reserve storage for " + std::to_string(config_.target_nodes) +
                            " vertices",
                        0, 1);
  } catch (const std::length_error&) {
    throw ResourceError("cannot reserve storage for " + std::to_string(config_.target_nodes) +
                            " vertices",
                        0, 1);
  }
}

StepEvent Simulation::step() {
  try {
    StepEvent event =
        walker_step(tree_, walker_, rng_, config_.step_parameter, config_.target_nodes);
    if (config_.record_trajectory) trajectory_.push_back(event);
    return event;
  } catch (const std::bad_alloc&) {
    throw ResourceError("out of memory after " + std::to_string(walker_.clock) + " steps and " +
                            std::to_string(tree_.vertex_count()) + " vertices",
                        walker_.clock, tree_.vertex_count());
  }
}

}  // namespace nrrw
