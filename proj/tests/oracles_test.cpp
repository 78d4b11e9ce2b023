#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_int.hpp>

#include "nrrw/errors.hpp"
#include "nrrw/oracles.hpp"
#include "nrrw/star_enumeration.hpp"

using namespace nrrw;
using namespace nrrw::oracle;
using Rational = boost::multiprecision::cpp_rational;

TEST(TDistribution, ExactValues) {
  EXPECT_EQ(t_pmf<Rational>(2, 0), Rational(1, 2));
  EXPECT_EQ(t_pmf<Rational>(4, 1), Rational(1, 4));
  EXPECT_EQ(t_pmf<Rational>(2, 1), Rational(1, 6));
  EXPECT_EQ(t_ccdf<Rational>(2, 1), Rational(1, 2));
  for (std::uint64_t s : {2, 4, 6, 8, 10}) EXPECT_EQ(t_ccdf<Rational>(s, 0), Rational(1));
  // the small-k branch is (1/2)^{k+1}
  for (std::uint64_t k = 0; k < 4; ++k) {
    EXPECT_EQ(t_pmf<Rational>(10, k), Rational(1, 2 << k));
  }
}

TEST(TDistribution, TelescopesExactly) {
  for (std::uint64_t s : {2, 4, 6, 8}) {
    Rational partial = 0;
    for (std::uint64_t K = 0; K < 30; ++K) {
      partial += t_pmf<Rational>(s, K);
      EXPECT_EQ(partial + t_ccdf<Rational>(s, K + 1), Rational(1)) << "s=" << s << " K=" << K;
    }
  }
}

TEST(TDistribution, NormalizesInDouble) {
  for (std::uint64_t s = 2; s <= 20; s += 2) {
    double partial = 0.0;
    for (std::uint64_t k = 0; k < 5000; ++k) partial += t_pmf(s, k);
    EXPECT_NEAR(partial + t_ccdf(s, 5000), 1.0, 1e-12) << "s=" << s;
  }
}

TEST(TDistribution, OddStepIsDomainError) {
  EXPECT_THROW(t_pmf(3, 1), DomainError);
  EXPECT_THROW(t_ccdf(0, 1), DomainError);
  EXPECT_THROW(t_expectation(5), DomainError);
  EXPECT_THROW(leaf_fraction_lower_bound(1), DomainError);
}

TEST(Zeta, KnownValues) {
  const auto z2 = zeta(2);
  EXPECT_NEAR(z2.value, std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
  EXPECT_LE(z2.error_bound, 1e-12);
  const auto z4 = zeta(4);
  EXPECT_NEAR(z4.value, std::pow(std::numbers::pi, 4) / 90.0, 1e-12);
}

TEST(Zeta, ThreeAgreesWithLongPartialSum) {
  // 10^7 terms plus the integral-bracket midpoint for the rest.
  long double sum = 0.0L;
  for (std::uint64_t n = 10'000'000; n >= 1; --n) {
    const long double x = static_cast<long double>(n);
    sum += 1.0L / (x * x * x);
  }
  const long double m = 1e7L;
  sum += 0.5L * (1.0L / (2.0L * (m + 1) * (m + 1)) + 1.0L / (2.0L * m * m));
  EXPECT_NEAR(zeta(3).value, static_cast<double>(sum), 1e-12);
}

TEST(Expectation, ClosedForms) {
  EXPECT_TRUE(std::isinf(t_expectation(2)));
  EXPECT_NEAR(t_expectation(4), 1.0 + std::numbers::pi * std::numbers::pi / 3.0, 1e-11);
  EXPECT_NEAR(t_expectation(4), 4.289868, 1e-6);
  EXPECT_NEAR(t_expectation(6), 3.404114, 1e-6);
  EXPECT_EQ(leaf_fraction_lower_bound(2), 1.0);
  EXPECT_NEAR(leaf_fraction_lower_bound(4), 1.0 - 3.0 / (3.0 + std::numbers::pi * std::numbers::pi),
              1e-12);
  // 0.7668926; the commonly quoted 0.766891 is off in the sixth digit
  EXPECT_NEAR(leaf_fraction_lower_bound(4), 0.766891, 2e-6);
  for (std::uint64_t s = 2; s <= 40; s += 2) EXPECT_GE(leaf_fraction_lower_bound(s), 2.0 / 3.0);
}

TEST(Expectation, MeanSeriesConverges) {
  for (std::uint64_t s : {4, 6, 8}) {
    const auto partial = t_mean_partial_sum(s, 2.5e-7);
    EXPECT_NEAR(partial.partial_sum, t_expectation(s), 1e-6) << "s=" << s;
    EXPECT_LE(partial.tail_bound, 2.5e-7);
  }
  EXPECT_THROW(t_mean_partial_sum(2, 1e-6), DomainError);
}

TEST(Expectation, StepTwoMeanDiverges) {
  const auto witness = t_mean_divergence_witness(50.0);
  EXPECT_GT(witness.lower_bound, 50.0);
  EXPECT_GT(witness.terms, witness.summed_directly);
  // the direct part agrees with the fixed partial sum
  EXPECT_NEAR(t_mean_partial_sum_fixed(2, 1000), [] {
    double acc = 0.0;
    for (std::uint64_t k = 0; k < 1000; ++k) acc += (2.0 * k + 1.0) * t_pmf(2, k);
    return acc;
  }(), 1e-9);
}

TEST(StarTail, ExactValues) {
  EXPECT_EQ(star_tail<Rational>(2, 4, StarVariant::non_root), Rational(1, 4));
  EXPECT_EQ(star_tail<Rational>(2, 1, StarVariant::non_root), Rational(1));
  EXPECT_EQ(star_tail<Rational>(2, 3, StarVariant::root), Rational(1, 6));
  EXPECT_THROW(star_tail(2, 0, StarVariant::root), DomainError);
}

TEST(StarTail, MatchesExhaustiveEnumeration) {
  for (std::uint64_t s : {2, 4}) {
    for (auto variant : {StarVariant::non_root, StarVariant::root}) {
      for (std::uint64_t k = 1; k <= 4; ++k) {
        EXPECT_EQ(star_tail_by_enumeration<Rational>(s, k, variant),
                  star_tail<Rational>(s, k, variant))
            << "s=" << s << " " << to_string(variant) << " k=" << k;
      }
    }
  }
}

TEST(StarTail, MonteCarloFirstStepAndTail) {
  PrngStream rng(1, 0);
  const int n = 50000;
  int first_leaf = 0, at_least_3 = 0;
  for (int i = 0; i < n; ++i) {
    const auto out = simulate_star({2, StarVariant::root}, rng);
    first_leaf += out.first_step_to_leaf;
    at_least_3 += out.center_degree >= 5;  // d >= k+2 with k = 3
  }
  EXPECT_NEAR(first_leaf / double(n), 1.0 / 3.0, 4 * std::sqrt(2.0 / 9.0 / n));
  EXPECT_NEAR(at_least_3 / double(n), 1.0 / 6.0, 4 * std::sqrt(5.0 / 36.0 / n));
}

TEST(StarTail, ParseVariant) {
  EXPECT_EQ(parse_star_variant("root"), StarVariant::root);
  EXPECT_EQ(parse_star_variant("non-root"), StarVariant::non_root);
  EXPECT_THROW(parse_star_variant("leaf"), DomainError);
}

TEST(BounceBound, ValuesAndEnvelopes) {
  EXPECT_DOUBLE_EQ(bounce_bound(2, 1), 0.75);
  EXPECT_EQ(bounce_bound<Rational>(2, 1), Rational(3, 4));
  for (std::uint64_t k = 1; k < 200; ++k) {
    EXPECT_LE(bounce_bound(1, k), 1.0 / std::sqrt(double(k)) + 1e-15);
    EXPECT_LT(bounce_bound(1, k + 1), bounce_bound(1, k));
    for (std::uint64_t d0 : {2, 3, 10, 50}) {
      EXPECT_LE(bounce_bound(d0, k), std::min(1.0, bounce_envelope_stated(d0, k)) + 1e-15);
      EXPECT_LE(bounce_bound(d0, k), bounce_envelope_stirling(d0, k) + 1e-15);
    }
  }
  EXPECT_THROW(bounce_bound(0, 1), DomainError);
}

TEST(LazyWalk, ReturnProbability) {
  const LazyWalkSpec spec;
  EXPECT_NEAR(lazy_walk_return_probability(spec), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(lazy_walk_return_probability_truncated(spec), lazy_walk_return_probability(spec),
              1e-9);
  // drift away from 0
  EXPECT_NEAR(2 * (spec.up_probability - spec.down_probability), 1.0 / 6.0, 1e-15);
}

TEST(LazyWalk, ReturnsAreGeometric) {
  PrngStream rng(5, 0);
  const int n = 20000;
  std::vector<int> at_least(6, 0);
  for (int i = 0; i < n; ++i) {
    const auto returns = simulate_lazy_walk({}, 4000, rng);
    for (std::uint64_t k = 0; k < at_least.size(); ++k) at_least[k] += returns >= k;
  }
  for (std::uint64_t k = 0; k < at_least.size(); ++k) {
    const double p = std::pow(2.0 / 3.0, double(k));
    EXPECT_NEAR(at_least[k] / double(n), p, 4 * std::sqrt(p * (1 - p) / n) + 2e-3) << "k=" << k;
  }
}
