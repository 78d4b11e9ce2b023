#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace nrrw {

/// splitmix64 finalizer. Used for seed derivation, never as a stream.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

__extension__ using u128 = unsigned __int128;

/// Deterministic random stream for one replica.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq from
/// (seed, stream_id); both are fully specified by the standard, so a given
/// pair produces the same sequence on every conforming library. Bounded
/// integers use Lemire's multiply-shift rejection method rather than
/// std::uniform_int_distribution, whose algorithm is implementation-defined.
class PrngStream {
 public:
  using result_type = std::uint64_t;

  PrngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

  static constexpr result_type min() noexcept { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return engine_(); }

  /// Uniform integer in [0, bound). bound == 1 returns 0 without consuming.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    u128 product = static_cast<u128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<u128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  static std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    return std::mt19937_64(seq);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace nrrw
