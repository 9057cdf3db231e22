#include <gtest/gtest.h>

#include <cmath>

#include "seopf/builtin_cases.hpp"
#include "seopf/welfare.hpp"

using namespace seopf;

TEST(Satisfaction, ReferenceValues) {
  EXPECT_EQ(satisfaction(SatisfactionParams(5.0, 0.1), 0.0), 0.0);
  EXPECT_NEAR(satisfaction(SatisfactionParams(38.68, 0.045), 338.49), 10514.8449, 5e-5);
  EXPECT_NEAR(satisfaction(SatisfactionParams(10.0, 0.087), 133.99), 574.7126, 5e-5);
  EXPECT_NEAR(SatisfactionParams(10.0, 0.087).saturation_point(), 114.9425, 5e-5);
}

TEST(Satisfaction, RejectsBadInput) {
  EXPECT_THROW(satisfaction(SatisfactionParams(1.0, 1.0), -1e-9), std::domain_error);
  EXPECT_THROW(SatisfactionParams(0.0, 1.0), InputError);
  EXPECT_THROW(SatisfactionParams(1.0, -1.0), InputError);
}

TEST(Satisfaction, SaturatedBranchIsContinuousAndFlat) {
  detail::PortableUniform rng(11);
  for (int t = 0; t < 500; ++t) {
    const SatisfactionParams p(rng.between(1.0, 80.0), rng.between(0.005, 0.2));
    const double s = p.saturation_point();
    EXPECT_NEAR(satisfaction(p, s * (1 - 1e-12)), p.max_satisfaction(), 1e-9 * p.max_satisfaction());
    EXPECT_EQ(satisfaction(p, s * 1.5), p.max_satisfaction());
    EXPECT_NEAR(marginal_satisfaction(p, s * (1 - 1e-12)), 0.0, 1e-9 * p.gamma());
    const double q = rng.between(0.0, 2.0 * s);
    EXPECT_LE(satisfaction(p, q), p.max_satisfaction());
    if (q < s) {
      EXPECT_LT(satisfaction(p, q), p.max_satisfaction());
    }
  }
}

TEST(Satisfaction, ConcaveAndNondecreasing) {
  detail::PortableUniform rng(12);
  for (int t = 0; t < 500; ++t) {
    const SatisfactionParams p(rng.between(1.0, 80.0), rng.between(0.005, 0.2));
    const double a = rng.between(0.0, 2.0 * p.saturation_point());
    const double b = rng.between(0.0, 2.0 * p.saturation_point());
    const double lo = std::min(a, b), hi = std::max(a, b);
    EXPECT_LE(satisfaction(p, lo), satisfaction(p, hi) + 1e-12);
    const double mid = satisfaction(p, 0.5 * (lo + hi));
    EXPECT_GE(mid, 0.5 * (satisfaction(p, lo) + satisfaction(p, hi)) - 1e-9);
  }
}

TEST(InverseDemand, Examples) {
  const SatisfactionParams p(11.05, 0.016);
  EXPECT_EQ(inverse_demand(p, 0.0), 11.05);
  EXPECT_NEAR(inverse_demand(p, p.saturation_point()), 0.0, 1e-12);
  EXPECT_NEAR(inverse_demand(p, 84.62), 9.6961, 5e-5);
  EXPECT_THROW(inverse_demand(p, -1.0), std::domain_error);
  EXPECT_THROW(inverse_demand(p, p.saturation_point() * 1.01), std::domain_error);
}

TEST(InverseDemand, IsDerivativeOfSatisfaction) {
  detail::PortableUniform rng(13);
  for (int t = 0; t < 1000; ++t) {
    const SatisfactionParams p(rng.between(1.0, 80.0), rng.between(0.005, 0.2));
    const double s = p.saturation_point();
    const double q = rng.between(0.02 * s, 0.98 * s);
    const double h = 1e-4 * s;
    const double fd = (satisfaction(p, q + h) - satisfaction(p, q - h)) / (2 * h);
    const double exact = inverse_demand(p, q);
    EXPECT_LT(std::abs(fd - exact) / std::max(1.0, std::abs(exact)), 1e-8);
  }
}

TEST(InverseDemand, Decreasing) {
  const SatisfactionParams p(45.34, 0.034);
  double prev = inverse_demand(p, 0.0);
  for (double q = 1.0; q <= p.saturation_point(); q += 1.0) {
    const double cur = inverse_demand(p, q);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(NormalizedSatisfaction, Examples) {
  const auto cs = five_bus_case();
  const auto& a21 = cs.aggregators[0];
  EXPECT_DOUBLE_EQ(normalized_satisfaction(a21, a21.p_n), 1.0);
  EXPECT_NEAR(satisfaction(SatisfactionParams(a21), 42.0), 449.988, 5e-4);
  EXPECT_NEAR(satisfaction(SatisfactionParams(a21), 84.62), 877.7666, 5e-4);
  EXPECT_NEAR(normalized_satisfaction(a21, 42.0), 0.5127, 5e-5);
  EXPECT_DOUBLE_EQ(normalized_satisfaction(cs.aggregators[6], 114.94252873563218), 1.0);

  Aggregator zero = a21;
  zero.p_n = 0.0;
  EXPECT_THROW(normalized_satisfaction(zero, 0.0), std::domain_error);
}

TEST(NormalizedSatisfaction, Nondecreasing) {
  for (const auto& a : five_bus_case().aggregators) {
    double prev = normalized_satisfaction(a, a.p_c);
    EXPECT_GT(prev, 0.0);
    for (double p = a.p_c; p <= a.p_n; p += 0.5) {
      const double cur = normalized_satisfaction(a, p);
      EXPECT_GE(cur, prev);
      EXPECT_LE(cur, 1.0);
      prev = cur;
    }
  }
}

TEST(GenCost, Examples) {
  EXPECT_EQ(gen_cost({1, 2, 14, 60}, 0.0), 60.0);
  EXPECT_EQ(gen_cost({5, 2, 10, 50}, 100.0), 21050.0);
  EXPECT_EQ(gen_cost({3, 2, 30, 25}, 1.0), 57.0);
  EXPECT_EQ(marginal_cost({3, 2, 30, 25}, 10.0), 70.0);
}

TEST(SocialObjective, Examples) {
  const auto cs = five_bus_case();
  const std::vector<double> zero_agg(7, 0.0), zero_gen(5, 0.0);
  const auto w0 = social_objective(cs, zero_agg, zero_gen);
  EXPECT_EQ(w0.total_satisfaction, 0.0);
  EXPECT_EQ(w0.total_cost, 190.0);

  std::vector<double> normal;
  for (const auto& a : cs.aggregators) normal.push_back(a.p_n);
  const auto wn = social_objective(cs, normal, zero_gen);
  EXPECT_NEAR(wn.total_satisfaction, 39921.3031, 5e-5);
  EXPECT_DOUBLE_EQ(wn.social_welfare(), wn.total_satisfaction - wn.total_cost);

  EXPECT_THROW(social_objective(cs, std::vector<double>(6, 0.0), zero_gen), InputError);
  EXPECT_THROW(social_objective(cs, zero_agg, std::vector<double>(4, 0.0)), InputError);
}

TEST(SocialObjective, WeightedTiny) {
  CaseData cs;
  cs.aggregators.push_back({1, 2.0, 10.0, 1.0, 10.0, 0.0, 0.0, 0.0});
  cs.generators.push_back({1, 0.0, 0.0, 3.0, 0.0, 10.0, 0.0, 0.0});
  // 10p - p^2/2 = 5
  const double p = 10.0 - std::sqrt(90.0);
  const std::vector<double> pa{p}, pg{0.0};
  const auto w = social_objective(cs, pa, pg);
  EXPECT_NEAR(w.total_satisfaction, 5.0, 1e-12);
  EXPECT_NEAR(w.weighted_objective, 7.0, 1e-12);
}
