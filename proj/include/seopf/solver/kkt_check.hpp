#pragma once

#include <algorithm>
#include <cmath>

#include "seopf/nlp.hpp"
#include "seopf/solver/solution.hpp"

namespace seopf::solver {

struct KktReport {
  double stationarity = 0.0;         // |grad L|_inf / s_d
  double primal_feasibility = 0.0;   // max violation of equalities, inequalities, bounds
  double dual_feasibility = 0.0;     // max negative part of inequality and bound multipliers
  double complementarity = 0.0;      // max |multiplier * slack| / s_c
  double tol = 0.0;

  bool passed() const {
    return stationarity < tol && primal_feasibility < tol && dual_feasibility < tol &&
           complementarity < tol;
  }
};

namespace detail {

inline constexpr double kMultiplierScaleCap = 100.0;

/// Scaling of stationarity and complementarity for large multipliers, so a
/// few huge duals do not make the test unattainable in floating point.
inline std::pair<double, double> multiplier_scaling(const Vector& y_eq, const Vector& y_ineq,
                                                    const Vector& z_lower, const Vector& z_upper,
                                                    Eigen::Index z_count) {
  const double z1 = z_lower.lpNorm<1>() + z_upper.lpNorm<1>();
  const double y1 = y_eq.lpNorm<1>() + y_ineq.lpNorm<1>();
  const auto m = y_eq.size() + y_ineq.size();
  const double s_d =
      std::max(kMultiplierScaleCap, (y1 + z1) / std::max<double>(1.0, static_cast<double>(m + z_count))) /
      kMultiplierScaleCap;
  const double s_c =
      std::max(kMultiplierScaleCap, z1 / std::max<double>(1.0, static_cast<double>(z_count))) /
      kMultiplierScaleCap;
  return {s_d, s_c};
}

}  // namespace detail

/// First-order optimality residuals of `sol` for `nlp`, recomputed from
/// scratch (independent of the solver's internal bookkeeping).
inline KktReport kkt_check(const Nlp& nlp, const Solution& sol, double tol) {
  const auto n = nlp.num_variables();
  if (!sol.has_duals || sol.y_eq.size() != nlp.num_equalities() ||
      sol.y_ineq.size() != nlp.num_inequalities() || sol.z_lower.size() != n ||
      sol.z_upper.size() != n)
    throw InputError("kkt_check: solution carries no (or mis-sized) multipliers");
  if (sol.x.size() != n) throw InputError("kkt_check: primal vector has wrong size");

  const auto& lo = nlp.lower_bounds();
  const auto& up = nlp.upper_bounds();
  const Vector& x = sol.x;
  KktReport rep;
  rep.tol = tol;

  Eigen::Index z_count = 0;
  for (Eigen::Index i = 0; i < n; ++i) z_count += std::isfinite(lo(i)) + std::isfinite(up(i));
  z_count += nlp.num_inequalities();
  const auto [s_d, s_c] = detail::multiplier_scaling(sol.y_eq, sol.y_ineq, sol.z_lower, sol.z_upper, z_count);

  Vector grad = sol.objective_factor * nlp.gradient(x);
  if (nlp.num_equalities() > 0) grad += nlp.equality_jacobian(x).transpose() * sol.y_eq;
  if (nlp.num_inequalities() > 0) grad += nlp.inequality_jacobian(x).transpose() * sol.y_ineq;
  grad += sol.z_upper - sol.z_lower;
  rep.stationarity = (n > 0 ? grad.cwiseAbs().maxCoeff() : 0.0) / s_d;

  const Vector ce = nlp.equalities(x);
  const Vector ci = nlp.inequalities(x);
  double primal = ce.size() > 0 ? ce.cwiseAbs().maxCoeff() : 0.0;
  if (ci.size() > 0) primal = std::max(primal, ci.maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) primal = std::max({primal, lo(i) - x(i), x(i) - up(i)});
  rep.primal_feasibility = std::max(primal, 0.0);

  double dual = 0.0;
  if (sol.y_ineq.size() > 0) dual = std::max(dual, -sol.y_ineq.minCoeff());
  if (n > 0) dual = std::max({dual, -sol.z_lower.minCoeff(), -sol.z_upper.minCoeff()});
  rep.dual_feasibility = dual;

  double compl_max = 0.0;
  for (Eigen::Index i = 0; i < ci.size(); ++i)
    compl_max = std::max(compl_max, std::abs(sol.y_ineq(i) * ci(i)));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(lo(i))) compl_max = std::max(compl_max, std::abs(sol.z_lower(i) * (x(i) - lo(i))));
    if (std::isfinite(up(i))) compl_max = std::max(compl_max, std::abs(sol.z_upper(i) * (up(i) - x(i))));
  }
  rep.complementarity = compl_max / s_c;
  return rep;
}

}  // namespace seopf::solver
