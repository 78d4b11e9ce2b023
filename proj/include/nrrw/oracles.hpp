#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "nrrw/errors.hpp"
#include "nrrw/prng.hpp"

/// Closed forms and toy reference processes for the NRRW.
///
/// Everything that is an exact algebraic expression is templated on the
/// scalar type, so the same code runs in double on the hot path and in an
/// exact rational type (boost::multiprecision::cpp_rational) in tests.
namespace nrrw::oracle {

enum class StarVariant {
  non_root,  ///< centre has a parent edge of weight 1
  root,      ///< centre is the root; its self-loop has weight 2
};

std::string to_string(StarVariant variant);
StarVariant parse_star_variant(const std::string& name);

/// Parent-hitting time T: the time until the walker first reaches the parent
/// of a vertex that has just received its first leaf.
struct TDistribution {
  std::uint64_t step_parameter = 2;
};

struct StarProcessSpec {
  std::uint64_t step_parameter = 2;
  StarVariant variant = StarVariant::non_root;
  std::uint64_t max_time = 1'000'000;
};

/// Homogeneous biased lazy walk on {0, 2, 4, ...} dominating the s = 1 level
/// process from below.
struct LazyWalkSpec {
  double up_probability = 0.25;
  double down_probability = 1.0 / 6.0;  ///< zero at state 0
};

namespace detail {

inline void require_even_step(std::uint64_t s) {
  if (s == 0 || s % 2 != 0) {
    throw DomainError("step parameter must be even and >= 2, got " + std::to_string(s));
  }
}

template <class Scalar>
Scalar ipow(Scalar base, std::uint64_t exponent) {
  Scalar result(1);
  while (exponent > 0) {
    if (exponent & 1U) result *= base;
    base *= base;
    exponent >>= 1U;
  }
  return result;
}

}  // namespace detail

/// P(T >= 2k+1) = (1/(q+1))^{s/2} ((q+1)/(q+2))^r with k = q s/2 + r.
template <class Scalar = double>
Scalar t_ccdf(std::uint64_t s, std::uint64_t k) {
  detail::require_even_step(s);
  const std::uint64_t half = s / 2;
  const std::uint64_t q = k / half;
  const std::uint64_t r = k % half;
  const Scalar base = Scalar(1) / Scalar(q + 1);
  const Scalar ratio = Scalar(q + 1) / Scalar(q + 2);
  return detail::ipow(base, half) * detail::ipow(ratio, r);
}

/// P(T = 2k+1).
template <class Scalar = double>
Scalar t_pmf(std::uint64_t s, std::uint64_t k) {
  detail::require_even_step(s);
  const std::uint64_t q = k / (s / 2);
  return t_ccdf<Scalar>(s, k) / Scalar(q + 2);
}

/// Exact tail of the star process: P(d >= k+1) for the non-root variant,
/// P(d >= k+2) for the root variant.
template <class Scalar = double>
Scalar star_tail(std::uint64_t s, std::uint64_t k, StarVariant variant) {
  detail::require_even_step(s);
  if (k == 0) throw DomainError("star_tail requires k >= 1");
  const Scalar base = variant == StarVariant::non_root ? Scalar(1) / Scalar(k)
                                                       : Scalar(2) / Scalar(k * (k + 1));
  return detail::ipow(base, s / 2);
}

/// prod_{j=d0}^{d0+k-1} (2j-1)/(2j): bound on k consecutive two-step returns
/// starting from a vertex of degree d0.
template <class Scalar = double>
Scalar bounce_bound(std::uint64_t d0, std::uint64_t k) {
  if (d0 == 0 || k == 0) throw DomainError("bounce_bound requires d0 >= 1 and k >= 1");
  Scalar result(1);
  for (std::uint64_t j = d0; j < d0 + k; ++j) result *= Scalar(2 * j - 1) / Scalar(2 * j);
  return result;
}

/// Envelope as stated: 2 sqrt(d0-1)/sqrt(d0+k-1) for d0 >= 2, 1/sqrt(k) for d0 = 1.
double bounce_envelope_stated(std::uint64_t d0, std::uint64_t k);
/// Envelope with the Stirling constants: (e/sqrt(2 pi))^3 sqrt(d0-1)/sqrt(d0+k-1),
/// or e/(sqrt(2) pi) / sqrt(k) for d0 = 1.
double bounce_envelope_stirling(std::uint64_t d0, std::uint64_t k);

struct ZetaValue {
  double value = 0.0;
  double error_bound = 0.0;  ///< rigorous bound on |value - zeta(z)|
  std::uint64_t terms = 0;
};

/// zeta(z) for integer z >= 2: partial sum of M terms plus the midpoint of
/// the integral bracket [int_{M+1}^inf, int_M^inf] for the tail, with M the
/// smallest count whose bracket half-width is below `tolerance`.
ZetaValue zeta(std::uint64_t z, double tolerance = 1e-12);

/// E(T) = 1 + 2 zeta(s/2); +infinity for s = 2.
double t_expectation(std::uint64_t s);

/// 1 - 1/E(T); equals 1 for s = 2.
double leaf_fraction_lower_bound(std::uint64_t s);

struct MeanPartialSum {
  double partial_sum = 0.0;  ///< sum_{k <= terms-1} (2k+1) P(T = 2k+1)
  std::uint64_t terms = 0;
  double tail_bound = 0.0;   ///< rigorous bound on the omitted tail
};

/// Partial sums of the mean series, truncated adaptively once the analytic
/// tail bound drops below `tail_tolerance`. Requires s >= 4.
MeanPartialSum t_mean_partial_sum(std::uint64_t s, double tail_tolerance);

/// Partial mean sum up to a fixed number of terms.
double t_mean_partial_sum_fixed(std::uint64_t s, std::uint64_t terms);

struct DivergenceWitness {
  std::uint64_t terms = 0;     ///< K such that the partial sum exceeds the threshold
  double lower_bound = 0.0;    ///< certified lower bound on that partial sum
  std::uint64_t summed_directly = 0;
};

/// For s = 2, finds K with sum_{k<K} (2k+1) P(T = 2k+1) > threshold: direct
/// summation up to `direct_terms`, then the integral of the (decreasing)
/// summand as a lower bound for the remaining block.
DivergenceWitness t_mean_divergence_witness(double threshold,
                                            std::uint64_t direct_terms = 1ULL << 20);

struct StarOutcome {
  std::uint64_t center_degree = 0;              ///< walk degree when the process ended
  std::optional<std::uint64_t> stopping_time;   ///< absent if max_time was reached
  bool first_step_to_leaf = false;
};

/// Exact step-by-step simulation of the star-growing process.
StarOutcome simulate_star(const StarProcessSpec& spec, PrngStream& rng);

/// Number of returns to 0 (moves 2 -> 0) within `horizon` steps, from 0.
std::uint64_t simulate_lazy_walk(const LazyWalkSpec& spec, std::uint64_t horizon,
                                 PrngStream& rng);

/// f0 by the gambler's-ruin ratio of the embedded non-lazy walk: down/up.
double lazy_walk_return_probability(const LazyWalkSpec& spec);

/// f0 by first-step analysis on {0, 2, ..., top_state} with an absorbing top,
/// solved as a dense linear system.
double lazy_walk_return_probability_truncated(const LazyWalkSpec& spec,
                                              std::uint64_t top_state = 200);

}  // namespace nrrw::oracle
