#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "seopf/case_model.hpp"
#include "seopf/welfare.hpp"

namespace seopf::solver {

struct CopperPlateResult {
  std::vector<double> p_agg_mw;
  std::vector<double> p_gen_mw;
  double objective = 0.0;  // sum sigma*U - sum C
  double lambda = 0.0;     // system price, $/MWh
};

namespace detail {

inline double copper_demand(const Aggregator& a, double lambda) {
  if (a.sigma <= 0.0) return a.p_c;
  if (lambda <= 0.0) return a.p_n;
  return std::clamp((a.gamma - lambda / a.sigma) / a.mu, a.p_c, a.p_n);
}

inline double copper_supply(const Generator& g, double lambda) {
  if (g.a <= 0.0) return lambda < g.b ? g.p_min : g.p_max;
  return std::clamp((lambda - g.b) / (2.0 * g.a), g.p_min, g.p_max);
}

}  // namespace detail

/// Network-free optimum of sum sigma*U(P_a) - sum C(P_g) subject to
/// sum P_g = sum P_a and the box limits, by bisection on the price.
inline CopperPlateResult copper_plate_oracle(const CaseData& cs) {
  double sum_pc = 0.0, sum_pn = 0.0, sum_min = 0.0, sum_max = 0.0;
  for (const auto& a : cs.aggregators) {
    sum_pc += a.p_c;
    sum_pn += a.p_n;
  }
  for (const auto& g : cs.generators) {
    sum_min += g.p_min;
    sum_max += g.p_max;
  }
  if (sum_max < sum_pc || sum_min > sum_pn)
    throw InputError("copper plate infeasible: generation range [" + std::to_string(sum_min) + ", " +
                     std::to_string(sum_max) + "] MW misses demand range [" + std::to_string(sum_pc) +
                     ", " + std::to_string(sum_pn) + "] MW");

  auto excess = [&cs](double lambda) {
    double s = 0.0;
    for (const auto& g : cs.generators) s += detail::copper_supply(g, lambda);
    for (const auto& a : cs.aggregators) s -= detail::copper_demand(a, lambda);
    return s;
  };

  // Bracket: supply minus demand is nondecreasing in the price.
  double lo = -1.0, hi = 1.0;
  for (const auto& g : cs.generators) {
    lo = std::min(lo, g.b - 1.0);
    hi = std::max(hi, 2.0 * g.a * g.p_max + g.b + 1.0);
  }
  for (const auto& a : cs.aggregators) hi = std::max(hi, a.sigma * a.gamma + 1.0);

  for (int it = 0; it < 400 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = excess(mid);
    if (std::abs(e) < 1e-12) {
      lo = hi = mid;
      break;
    }
    (e > 0.0 ? hi : lo) = mid;
  }
  const double lambda = 0.5 * (lo + hi);

  CopperPlateResult res;
  res.lambda = lambda;
  for (const auto& a : cs.aggregators) res.p_agg_mw.push_back(detail::copper_demand(a, lambda));
  for (const auto& g : cs.generators) res.p_gen_mw.push_back(detail::copper_supply(g, lambda));

  // Units with a flat marginal at the price (linear-cost generators) take up
  // whatever imbalance the bisection leaves.
  double gap = 0.0;
  for (double p : res.p_agg_mw) gap += p;
  for (double p : res.p_gen_mw) gap -= p;
  const double price_tol = 1e-6 * std::max(1.0, std::abs(lambda));
  for (std::size_t k = 0; k < cs.generators.size() && std::abs(gap) > 1e-12; ++k) {
    const auto& g = cs.generators[k];
    if (g.a > 0.0 || std::abs(g.b - lambda) > price_tol) continue;
    const double target = std::clamp(res.p_gen_mw[k] + gap, g.p_min, g.p_max);
    gap -= target - res.p_gen_mw[k];
    res.p_gen_mw[k] = target;
  }
  if (std::abs(gap) > 1e-6)
    throw InputError("copper plate oracle could not balance supply and demand (gap " + std::to_string(gap) +
                     " MW)");

  res.objective = social_objective(cs, res.p_agg_mw, res.p_gen_mw).weighted_objective;
  return res;
}

}  // namespace seopf::solver
