#pragma once

#include <span>
#include <stdexcept>

#include "seopf/case_model.hpp"

namespace seopf {

/// Parameters of the saturating quadratic satisfaction curve
/// U(p) = gamma*p - mu*p^2/2 up to p = gamma/mu, constant beyond.
class SatisfactionParams {
 public:
  SatisfactionParams(double gamma, double mu) : gamma_(gamma), mu_(mu) {
    if (!(gamma > 0.0) || !(mu > 0.0))
      throw InputError("satisfaction parameters require gamma > 0 and mu > 0");
  }
  explicit SatisfactionParams(const Aggregator& a) : SatisfactionParams(a.gamma, a.mu) {}

  double gamma() const { return gamma_; }
  double mu() const { return mu_; }
  /// Consumption (MW) beyond which satisfaction no longer grows.
  double saturation_point() const { return gamma_ / mu_; }
  /// Satisfaction at and beyond the saturation point.
  double max_satisfaction() const { return 0.5 * gamma_ * gamma_ / mu_; }

 private:
  double gamma_;
  double mu_;
};

/// Satisfaction ($/h) of consuming p MW.
inline double satisfaction(const SatisfactionParams& params, double p) {
  if (p < 0.0) throw std::domain_error("satisfaction: negative consumption");
  if (p >= params.saturation_point()) return params.max_satisfaction();
  return params.gamma() * p - 0.5 * params.mu() * p * p;
}

/// Marginal satisfaction gamma - mu*p ($/MWh), the willingness-to-pay price,
/// defined on [0, gamma/mu].
inline double inverse_demand(const SatisfactionParams& params, double p) {
  if (p < 0.0 || p > params.saturation_point())
    throw std::domain_error("inverse_demand: p outside [0, gamma/mu]");
  return params.gamma() - params.mu() * p;
}

/// Derivative of satisfaction for any p >= 0 (zero on the saturated branch).
inline double marginal_satisfaction(const SatisfactionParams& params, double p) {
  return p >= params.saturation_point() ? 0.0 : params.gamma() - params.mu() * p;
}

/// U(p) / U(p_n).
inline double normalized_satisfaction(const Aggregator& agg, double p) {
  const SatisfactionParams params(agg);
  const double reference = agg.p_n >= 0.0 ? satisfaction(params, agg.p_n) : 0.0;
  if (!(reference > 0.0))
    throw std::domain_error("normalized_satisfaction: zero satisfaction at normal limit");
  return satisfaction(params, p) / reference;
}

/// Generation cost ($/h) at p MW.
inline double gen_cost(const Generator& gen, double p) { return gen.a * p * p + gen.b * p + gen.c; }

inline double marginal_cost(const Generator& gen, double p) { return 2.0 * gen.a * p + gen.b; }

struct WelfareBreakdown {
  double weighted_objective = 0.0;   // sum sigma*U - sum C
  double total_satisfaction = 0.0;   // unweighted sum U
  double total_cost = 0.0;           // sum C
  double social_welfare() const { return total_satisfaction - total_cost; }
};

/// Objective terms for per-aggregator and per-generator active powers (MW).
inline WelfareBreakdown social_objective(const CaseData& cs, std::span<const double> p_agg,
                                         std::span<const double> p_gen) {
  if (p_agg.size() != cs.aggregators.size() || p_gen.size() != cs.generators.size())
    throw InputError("social_objective: vector sizes do not match the case");
  WelfareBreakdown w;
  double weighted = 0.0;
  for (std::size_t k = 0; k < p_agg.size(); ++k) {
    const auto& a = cs.aggregators[k];
    const double u = satisfaction(SatisfactionParams(a), p_agg[k]);
    w.total_satisfaction += u;
    weighted += a.sigma * u;
  }
  for (std::size_t g = 0; g < p_gen.size(); ++g) w.total_cost += gen_cost(cs.generators[g], p_gen[g]);
  w.weighted_objective = weighted - w.total_cost;
  return w;
}

}  // namespace seopf
