#include "nrrw/oracles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

namespace nrrw::oracle {

std::string to_string(StarVariant variant) {
  return variant == StarVariant::root ? "root" : "non-root";
}

StarVariant parse_star_variant(const std::string& name) {
  if (name == "root") return StarVariant::root;
  if (name == "non-root" || name == "nonroot" || name == "non_root") return StarVariant::non_root;
  throw DomainError("unknown star variant '" + name + "' (expected root or non-root)");
}

double bounce_envelope_stated(std::uint64_t d0, std::uint64_t k) {
  if (d0 == 0 || k == 0) throw DomainError("bounce envelope requires d0 >= 1 and k >= 1");
  if (d0 == 1) return 1.0 / std::sqrt(static_cast<double>(k));
  return 2.0 * std::sqrt(static_cast<double>(d0 - 1)) / std::sqrt(static_cast<double>(d0 + k - 1));
}

double bounce_envelope_stirling(std::uint64_t d0, std::uint64_t k) {
  if (d0 == 0 || k == 0) throw DomainError("bounce envelope requires d0 >= 1 and k >= 1");
  const double e = std::numbers::e;
  const double pi = std::numbers::pi;
  if (d0 == 1) return e / (std::sqrt(2.0) * pi) / std::sqrt(static_cast<double>(k));
  const double c = std::pow(e / std::sqrt(2.0 * pi), 3);
  return c * std::sqrt(static_cast<double>(d0 - 1)) / std::sqrt(static_cast<double>(d0 + k - 1));
}

namespace {

// Neumaier-compensated accumulator.
class Accumulator {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

// int_x^inf t^{-z} dt
long double tail_integral(long double x, std::uint64_t z) {
  return std::pow(x, 1.0L - static_cast<long double>(z)) / static_cast<long double>(z - 1);
}

}  // namespace

ZetaValue zeta(std::uint64_t z, double tolerance) {
  if (z < 2) throw DomainError("zeta(z) diverges for z <= 1");
  auto half_width = [z](long double m) {
    return (tail_integral(m, z) - tail_integral(m + 1.0L, z)) / 2.0L;
  };
  auto terms = static_cast<std::uint64_t>(
      std::ceil(std::pow(1.0 / (2.0 * tolerance), 1.0 / static_cast<double>(z))));
  terms = std::max<std::uint64_t>(terms, 1);
  while (terms > 1 && half_width(static_cast<long double>(terms - 1)) <= tolerance / 2) --terms;
  while (half_width(static_cast<long double>(terms)) > tolerance / 2) ++terms;

  Accumulator sum;
  for (std::uint64_t m = terms; m >= 1; --m) {
    sum.add(1.0L / std::pow(static_cast<long double>(m), static_cast<long double>(z)));
  }
  const long double m = static_cast<long double>(terms);
  const long double tail = (tail_integral(m, z) + tail_integral(m + 1.0L, z)) / 2.0L;
  const long double rounding =
      static_cast<long double>(terms) * std::numeric_limits<long double>::epsilon();
  return ZetaValue{static_cast<double>(sum.value() + tail),
                   static_cast<double>(half_width(m) + rounding), terms};
}

double t_expectation(std::uint64_t s) {
  detail::require_even_step(s);
  if (s == 2) return std::numeric_limits<double>::infinity();
  return 1.0 + 2.0 * zeta(s / 2).value;
}

double leaf_fraction_lower_bound(std::uint64_t s) {
  detail::require_even_step(s);
  if (s == 2) return 1.0;
  return 1.0 - 1.0 / t_expectation(s);
}

namespace {

// Adds (2k+1) P(T = 2k+1) for k in [0, terms) into `acc`, walking each
// block of s/2 values of k with one pow and a running ratio.
void accumulate_mean_terms(std::uint64_t s, std::uint64_t terms, Accumulator& acc) {
  const std::uint64_t half = s / 2;
  std::uint64_t k = 0;
  for (std::uint64_t q = 0; k < terms; ++q) {
    const long double ratio = static_cast<long double>(q + 1) / static_cast<long double>(q + 2);
    long double ccdf = std::pow(1.0L / static_cast<long double>(q + 1), static_cast<long double>(half));
    for (std::uint64_t r = 0; r < half && k < terms; ++r, ++k) {
      const long double pmf = ccdf / static_cast<long double>(q + 2);
      acc.add(static_cast<long double>(2 * k + 1) * pmf);
      ccdf *= ratio;
    }
  }
}

// Bound on sum_{k > K} (2k+1) P(T = 2k+1) from P(T >= 2k+1) <= (h/(k+1))^h.
double mean_tail_bound(std::uint64_t s, std::uint64_t last_k) {
  const long double h = static_cast<long double>(s / 2);
  const long double big_k = static_cast<long double>(last_k);
  const long double first = (2.0L * big_k + 3.0L) * std::pow(h / (big_k + 2.0L), h);
  const long double rest = 2.0L * std::pow(h, h) * std::pow(big_k + 2.0L, 1.0L - h) / (h - 1.0L);
  return static_cast<double>(first + rest);
}

}  // namespace

double t_mean_partial_sum_fixed(std::uint64_t s, std::uint64_t terms) {
  detail::require_even_step(s);
  Accumulator acc;
  accumulate_mean_terms(s, terms, acc);
  return static_cast<double>(acc.value());
}

MeanPartialSum t_mean_partial_sum(std::uint64_t s, double tail_tolerance) {
  detail::require_even_step(s);
  if (s < 4) throw DomainError("the mean of T is infinite for s = 2");
  std::uint64_t terms = 1024;
  while (mean_tail_bound(s, terms - 1) > tail_tolerance) terms *= 2;
  Accumulator acc;
  accumulate_mean_terms(s, terms, acc);
  return MeanPartialSum{static_cast<double>(acc.value()), terms, mean_tail_bound(s, terms - 1)};
}

DivergenceWitness t_mean_divergence_witness(double threshold, std::uint64_t direct_terms) {
  Accumulator acc;
  accumulate_mean_terms(2, direct_terms, acc);
  const long double direct = acc.value();
  // For s = 2 the summand is (2x+1)/((x+1)(x+2)), decreasing for x >= 1, with
  // antiderivative 3 ln(x+2) - ln(x+1).
  auto antiderivative = [](long double x) { return 3.0L * std::log(x + 2.0L) - std::log(x + 1.0L); };
  const long double start = static_cast<long double>(direct_terms);
  std::uint64_t terms = direct_terms;
  long double bound = direct;
  while (bound <= threshold) {
    if (terms > (1ULL << 60)) throw DomainError("divergence witness search overflowed");
    terms *= 2;
    // sum_{k=direct_terms}^{terms-1} f(k) >= int_{direct_terms}^{terms} f(x) dx
    bound = direct + antiderivative(static_cast<long double>(terms)) - antiderivative(start);
  }
  return DivergenceWitness{terms, static_cast<double>(bound), direct_terms};
}

StarOutcome simulate_star(const StarProcessSpec& spec, PrngStream& rng) {
  detail::require_even_step(spec.step_parameter);
  const std::uint64_t parent_slots = spec.variant == StarVariant::root ? 2 : 1;
  std::uint64_t leaves = 1;
  bool at_center = true;
  StarOutcome outcome;
  for (std::uint64_t t = 1; t <= spec.max_time; ++t) {
    if (at_center) {
      const std::uint64_t slot = rng.uniform_below(parent_slots + leaves);
      if (t == 1) outcome.first_step_to_leaf = slot >= parent_slots;
      if (slot < parent_slots) {
        outcome.center_degree = parent_slots + leaves;
        outcome.stopping_time = t;
        return outcome;
      }
      at_center = false;
    } else {
      at_center = true;
    }
    // s is even, so the walker is on the centre whenever t is a multiple of s.
    if (t % spec.step_parameter == 0) ++leaves;
  }
  outcome.center_degree = parent_slots + leaves;
  return outcome;
}

std::uint64_t simulate_lazy_walk(const LazyWalkSpec& spec, std::uint64_t horizon,
                                 PrngStream& rng) {
  std::uint64_t level = 0;
  std::uint64_t returns = 0;
  for (std::uint64_t n = 0; n < horizon; ++n) {
    const double u = rng.uniform01();
    if (level > 0 && u < spec.down_probability) {
      level -= 2;
      if (level == 0) ++returns;
    } else if (u >= 1.0 - spec.up_probability) {
      level += 2;
    }
  }
  return returns;
}

double lazy_walk_return_probability(const LazyWalkSpec& spec) {
  return std::min(1.0, spec.down_probability / spec.up_probability);
}

double lazy_walk_return_probability_truncated(const LazyWalkSpec& spec, std::uint64_t top_state) {
  if (top_state < 4 || top_state % 2 != 0) {
    throw DomainError("truncation level must be an even state >= 4");
  }
  // Unknowns h(1..n) = P(hit 0 before top | start at level 2i); h(0) = 1, h(top) = 0.
  const auto n = static_cast<Eigen::Index>(top_state / 2 - 1);
  const double up = spec.up_probability;
  const double down = spec.down_probability;
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    system(i, i) = up + down;
    if (i + 1 < n) system(i, i + 1) = -up;
    if (i > 0) {
      system(i, i - 1) = -down;
    } else {
      rhs(i) = down;
    }
  }
  const Eigen::VectorXd hit = system.partialPivLu().solve(rhs);
  return hit(0);
}

}  // namespace nrrw::oracle
