#include <gtest/gtest.h>

#include <cmath>

#include "seopf/ac_network.hpp"
#include "seopf/builtin_cases.hpp"

using namespace seopf;

namespace {

CaseData two_bus(double r, double x) {
  CaseData cs;
  cs.name = "two_bus";
  cs.buses = {{1, true, 0.9, 1.1}, {2, false, 0.9, 1.1}};
  cs.lines = {{1, 2, r, x, 100.0}};
  return cs;
}

}  // namespace

TEST(Admittance, LosslessTwoBus) {
  const auto y = build_admittance(two_bus(0.0, 0.1));
  EXPECT_NEAR(y.b(0, 0), -10.0, 1e-12);
  EXPECT_NEAR(y.b(0, 1), 10.0, 1e-12);
  EXPECT_NEAR(y.b(1, 0), 10.0, 1e-12);
  EXPECT_NEAR(y.b(1, 1), -10.0, 1e-12);
  EXPECT_EQ(y.g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Admittance, LossyTwoBus) {
  const auto ys = series_admittance({1, 2, 0.01, 0.1, 1});
  EXPECT_NEAR(ys.real(), 0.9901, 5e-5);
  EXPECT_NEAR(ys.imag(), -9.9010, 5e-5);
  const auto y = build_admittance(two_bus(0.01, 0.1));
  EXPECT_NEAR(y.g(0, 0), 0.9901, 5e-5);
  EXPECT_NEAR(y.g(0, 1), -0.9901, 5e-5);
}

TEST(Admittance, ZeroImpedanceThrows) {
  EXPECT_THROW(series_admittance({1, 2, 0.0, 0.0, 1}), InputError);
  EXPECT_THROW(build_admittance(two_bus(0.0, 0.0)), InputError);
}

TEST(Admittance, SymmetricWithZeroRowSums) {
  for (const auto& cs : {five_bus_case(), rts24_case()}) {
    const auto y = build_admittance(cs);
    EXPECT_EQ((y.g - y.g.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((y.b - y.b.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT(y.g.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(y.b.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Admittance, SumOfPerLineContributions) {
  const auto cs = rts24_case();
  const auto y = build_admittance(cs);
  Matrix g = Matrix::Zero(24, 24), b = Matrix::Zero(24, 24);
  for (const auto& line : cs.lines) {
    CaseData single = cs;
    single.lines = {line};
    const auto part = build_admittance(single);
    g += part.g;
    b += part.b;
  }
  EXPECT_LT((g - y.g).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((b - y.b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InjectionResiduals, FlatStartIsBalanced) {
  const auto cs = five_bus_case();
  const auto y = build_admittance(cs);
  const Vector ones = Vector::Ones(5), zeros = Vector::Zero(5);
  const auto [rp, rq] = injection_residuals(y, ones, zeros, zeros, zeros);
  EXPECT_LT(rp.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(rq.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InjectionResiduals, TwoBusTransfer) {
  const auto y = build_admittance(two_bus(0.0, 0.1));
  Vector v = Vector::Ones(2), theta(2), p(2), q = Vector::Zero(2);
  theta << 0.0, -0.1;
  p << 10.0 * std::sin(0.1), -10.0 * std::sin(0.1);
  const auto [rp, rq] = injection_residuals(y, v, theta, p, q);
  EXPECT_LT(rp.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(p(0), 0.99833, 5e-6);
}

TEST(InjectionResiduals, SizeMismatchThrows) {
  const auto y = build_admittance(two_bus(0.0, 0.1));
  const Vector two = Vector::Ones(2), three = Vector::Ones(3);
  EXPECT_THROW(injection_residuals(y, two, three, two, two), InputError);
}

TEST(InjectionResiduals, AngleChangeIsLocal) {
  const auto cs = rts24_case();
  const auto y = build_admittance(cs);
  detail::PortableUniform rng(4);
  Vector v(24), theta(24);
  for (int i = 0; i < 24; ++i) {
    v(i) = rng.between(0.95, 1.05);
    theta(i) = rng.between(-0.2, 0.2);
  }
  const Vector zero = Vector::Zero(24);
  const auto [p0, q0] = injection_residuals(y, v, theta, zero, zero);
  for (int i = 0; i < 24; ++i) {
    Vector t2 = theta;
    t2(i) += 0.05;
    const auto [p1, q1] = injection_residuals(y, v, t2, zero, zero);
    for (int k = 0; k < 24; ++k) {
      const bool adjacent = k == i || y.g(i, k) != 0.0 || y.b(i, k) != 0.0;
      if (!adjacent) {
        EXPECT_EQ(p1(k), p0(k));
        EXPECT_EQ(q1(k), q0(k));
      }
    }
  }
}

TEST(LineFlow, Examples) {
  const auto cs = two_bus(0.0, 0.1);
  Vector v = Vector::Ones(2), flat = Vector::Zero(2), theta(2);
  auto f0 = line_flow(cs, v, flat, 0);
  EXPECT_EQ(f0.p_from_to, 0.0);
  EXPECT_EQ(f0.p_to_from, 0.0);
  theta << 0.1, 0.0;
  const auto f = line_flow(cs, v, theta, 0);
  EXPECT_NEAR(f.p_from_to, 99.833, 5e-4);
  EXPECT_EQ(f.p_from_to, -f.p_to_from);
  EXPECT_THROW(line_flow(cs, v, theta, 1), InputError);
}

TEST(LineFlow, LossesMatchResistiveFormula) {
  const auto cs = two_bus(0.01, 0.1);
  Vector v = Vector::Ones(2), theta(2);
  theta << 0.1, 0.0;
  const double g = series_admittance(cs.lines[0]).real();
  const double expected = 2.0 * g - 2.0 * g * std::cos(0.1);
  EXPECT_NEAR(network_losses(cs, v, theta) / cs.s_base, expected, 1e-12);
  EXPECT_NEAR(network_losses(cs, v, theta) / cs.s_base, 0.00989, 5e-5);
}

TEST(LineFlow, LossesNonnegativeAndZeroWhenLossless) {
  auto cs = rts24_case();
  detail::PortableUniform rng(8);
  for (int t = 0; t < 50; ++t) {
    Vector v(24), theta(24);
    for (int i = 0; i < 24; ++i) {
      v(i) = rng.between(0.9, 1.1);
      theta(i) = rng.between(-0.5, 0.5);
    }
    EXPECT_GE(network_losses(cs, v, theta), -1e-12);
    EXPECT_NEAR(network_losses(cs, Vector::Ones(24), Vector::Zero(24)), 0.0, 1e-12);
  }
  for (auto& l : cs.lines) l.r = 0.0;
  Vector v = Vector::Constant(24, 1.02), theta = Vector::LinSpaced(24, -0.3, 0.3);
  EXPECT_NEAR(network_losses(cs, v, theta), 0.0, 1e-9);
}

TEST(LineFlow, GenerationMinusDemandEqualsLosses) {
  const auto cs = five_bus_case();
  const auto y = build_admittance(cs);
  detail::PortableUniform rng(9);
  for (int t = 0; t < 50; ++t) {
    Vector v(5), theta(5);
    for (int i = 0; i < 5; ++i) {
      v(i) = rng.between(0.95, 1.05);
      theta(i) = rng.between(-0.3, 0.3);
    }
    // The injections that balance this state sum to the losses.
    const auto [p, q] = bus_injections(y, v, theta);
    EXPECT_NEAR(p.sum() * cs.s_base, network_losses(cs, v, theta), 1e-8);
  }
}
