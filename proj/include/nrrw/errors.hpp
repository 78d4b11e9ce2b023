#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nrrw {

/// Invalid simulation or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Vertex label outside the current tree.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Closed form evaluated outside its domain (odd s, k = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Collector fed an event out of clock order.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Collector queried before it holds any data.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bad CLI usage: unknown suite, unsupported export format.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tail fit without enough support; carries the usable degree range.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::uint64_t usable_min, std::uint64_t usable_max)
      : std::runtime_error(what), usable_min_(usable_min), usable_max_(usable_max) {}

  std::uint64_t usable_min() const noexcept { return usable_min_; }
  std::uint64_t usable_max() const noexcept { return usable_max_; }

 private:
  std::uint64_t usable_min_;
  std::uint64_t usable_max_;
};

/// A run ran out of memory; reports how far it got.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t steps_completed,
                std::uint64_t vertices_reached)
      : std::runtime_error(what),
        steps_completed_(steps_completed),
        vertices_reached_(vertices_reached) {}

  std::uint64_t steps_completed() const noexcept { return steps_completed_; }
  std::uint64_t vertices_reached() const noexcept { return vertices_reached_; }

 private:
  std::uint64_t steps_completed_;
  std::uint64_t vertices_reached_;
};

}  // namespace nrrw
