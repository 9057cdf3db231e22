#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "seopf/builtin_cases.hpp"
#include "seopf/nlp.hpp"

namespace seopf::solver {

struct AuditReport {
  int points = 0;
  double max_gradient_error = 0.0;
  double max_jacobian_error = 0.0;
  double max_linear_row_error = 0.0;  // absolute, affine inequality rows only
  std::string worst_entry;
  double tol = 1e-6;

  double max_relative_error() const { return std::max(max_gradient_error, max_jacobian_error); }
  bool passed() const { return max_relative_error() < tol; }
};

namespace detail {

inline double dyadic(double v) { return std::ldexp(std::round(std::ldexp(v, 32)), -32); }

/// Power-of-two step 2^-k relative to |v|, so x +- h is exact on the dyadic
/// grid.
inline double dyadic_step(double v, int k = 20) {
  int e = 0;
  std::frexp(std::max(1.0, std::abs(v)), &e);
  return std::ldexp(1.0, e - 1 - k);
}

/// Small steps lose entries with tiny derivatives to cancellation in large
/// sums; large steps pick up truncation error on curved terms. Each entry is
/// scored at its best step.
inline constexpr int kStepExponents[] = {8, 12, 16, 20};

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

}  // namespace detail

/// Compares the analytic gradient and constraint Jacobians with central
/// differences at `n_points` seeded points strictly inside the box. Free
/// directions are sampled in [-0.5, 0.5].
inline AuditReport finite_difference_audit(const Nlp& nlp, int n_points, std::uint64_t seed, double tol = 1e-6) {
  if (n_points < 1) throw InputError("derivative audit needs at least one point");
  AuditReport rep;
  rep.tol = tol;
  rep.points = n_points;
  const auto n = nlp.num_variables();
  const auto me = nlp.num_equalities();
  const auto mi = nlp.num_inequalities();
  const auto& lo = nlp.lower_bounds();
  const auto& up = nlp.upper_bounds();
  const auto linear = nlp.linear_inequalities();
  seopf::detail::PortableUniform rng(seed);

  double worst = -1.0;
  auto note = [&](double err, const std::string& what) {
    if (err > worst) {
      worst = err;
      rep.worst_entry = what;
    }
  };

  for (int pt = 0; pt < n_points; ++pt) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double a = std::isfinite(lo(i)) ? lo(i) : -0.5;
      double b = std::isfinite(up(i)) ? up(i) : 0.5;
      if (!std::isfinite(lo(i)) && std::isfinite(up(i))) a = b - 1.0;
      if (std::isfinite(lo(i)) && !std::isfinite(up(i))) b = a + 1.0;
      const double margin = 0.05 * (b - a);
      x(i) = detail::dyadic(rng.between(a + margin, b - margin));
    }
    const Vector grad = nlp.gradient(x);
    const Matrix je = me > 0 ? nlp.equality_jacobian(x) : Matrix(0, n);
    const Matrix ji = mi > 0 ? nlp.inequality_jacobian(x) : Matrix(0, n);

    for (Eigen::Index j = 0; j < n; ++j) {
      double eg = std::numeric_limits<double>::infinity();
      Vector ee = Vector::Constant(me, eg), ei = Vector::Constant(mi, eg), li = Vector::Constant(mi, eg);
      for (int k : detail::kStepExponents) {
        const double h = detail::dyadic_step(x(j), k);
        Vector xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        eg = std::min(eg, detail::relative_error(grad(j), (nlp.objective(xp) - nlp.objective(xm)) / (2.0 * h)));
        if (me > 0) {
          const Vector col = (nlp.equalities(xp) - nlp.equalities(xm)) / (2.0 * h);
          for (Eigen::Index r = 0; r < me; ++r) ee(r) = std::min(ee(r), detail::relative_error(je(r, j), col(r)));
        }
        if (mi > 0) {
          const Vector col = (nlp.inequalities(xp) - nlp.inequalities(xm)) / (2.0 * h);
          for (Eigen::Index r = 0; r < mi; ++r) {
            ei(r) = std::min(ei(r), detail::relative_error(ji(r, j), col(r)));
            li(r) = std::min(li(r), std::abs(ji(r, j) - col(r)));
          }
        }
      }
      rep.max_gradient_error = std::max(rep.max_gradient_error, eg);
      if (eg > worst) note(eg, "gradient[" + nlp.variable_name(j) + "]");
      for (Eigen::Index r = 0; r < me; ++r) {
        rep.max_jacobian_error = std::max(rep.max_jacobian_error, ee(r));
        if (ee(r) > worst) note(ee(r), "jacobian[" + nlp.equality_name(r) + ", " + nlp.variable_name(j) + "]");
      }
      for (Eigen::Index r = 0; r < mi; ++r) {
        rep.max_jacobian_error = std::max(rep.max_jacobian_error, ei(r));
        if (linear[static_cast<std::size_t>(r)]) rep.max_linear_row_error = std::max(rep.max_linear_row_error, li(r));
        if (ei(r) > worst) note(ei(r), "jacobian[" + nlp.inequality_name(r) + ", " + nlp.variable_name(j) + "]");
      }
    }
  }
  return rep;
}

}  // namespace seopf::solver
