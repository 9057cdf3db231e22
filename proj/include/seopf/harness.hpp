#pragma once

#include <atomic>
#include <exception>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "seopf/ac_network.hpp"
#include "seopf/case_model.hpp"
#include "seopf/formulation.hpp"
#include "seopf/solver/interior_point.hpp"
#include "seopf/welfare.hpp"

namespace seopf {

struct Metrics {
  double total_satisfaction = 0.0;  // unweighted, $/h
  double weighted_objective = 0.0;  // sum sigma*U - sum C
  double total_cost = 0.0;          // $/h
  double social_welfare = 0.0;      // satisfaction - cost
  std::vector<double> normalized_satisfaction;
  std::vector<double> curtailment_mw;  // p_n - p per aggregator
  double total_curtailment_mw = 0.0;   // sum P_g - sum P_a
  double losses_mw = 0.0;
};

/// Metrics of a primal point of `problem`, whether or not it is feasible.
inline Metrics compute_metrics(const Problem& problem, const Vector& x) {
  const auto& cs = problem.case_data();
  const auto st = problem.decode(x);
  std::vector<double> pa(st.pa_mw.begin(), st.pa_mw.end());
  std::vector<double> pg(st.pg_mw.begin(), st.pg_mw.end());
  // Interior-point iterates sit strictly inside the box; clip round-off so
  // satisfaction stays defined.
  for (std::size_t k = 0; k < pa.size(); ++k) pa[k] = std::max(pa[k], 0.0);

  const auto w = social_objective(cs, pa, pg);
  Metrics m;
  m.total_satisfaction = w.total_satisfaction;
  m.weighted_objective = w.weighted_objective;
  m.total_cost = w.total_cost;
  m.social_welfare = m.total_satisfaction - m.total_cost;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    const auto& a = cs.aggregators[k];
    const SatisfactionParams params(a);
    const double ref = satisfaction(params, std::max(a.p_n, 0.0));
    m.normalized_satisfaction.push_back(ref > 0.0 ? satisfaction(params, pa[k]) / ref
                                                  : std::numeric_limits<double>::quiet_NaN());
    m.curtailment_mw.push_back(a.p_n - pa[k]);
  }
  double gen_total = 0.0, agg_total = 0.0;
  for (double p : pg) gen_total += p;
  for (double p : pa) agg_total += p;
  m.total_curtailment_mw = gen_total - agg_total;
  m.losses_mw = network_losses(cs, st.v, st.theta);
  return m;
}

struct SolveResult {
  Problem problem;
  solver::Solution solution;
  Metrics metrics;
};

inline SolveResult run_solve(const CaseData& cs, const solver::SolverOptions& opts = {},
                             FormulationOptions form = {}) {
  Problem problem(cs, form);
  auto sol = solver::solve(problem, opts);
  auto metrics = compute_metrics(problem, sol.x);
  return {std::move(problem), std::move(sol), std::move(metrics)};
}

struct SweepRecord {
  double scale_pct = 0.0;
  solver::SolveStatus status = solver::SolveStatus::numerical_failure;
  int iterations = 0;
  Metrics metrics;
  std::vector<double> p_agg_mw, p_gen_mw;
};

struct SweepResult {
  std::string case_name;
  std::vector<std::string> aggregator_labels;
  std::vector<SweepRecord> records;  // ascending scale_pct
};

struct SweepOptions {
  double from_pct = 10.0;
  double to_pct = 150.0;
  double step_pct = 2.0;
  int jobs = 1;
  solver::SolverOptions solver;
  FormulationOptions formulation;
};

/// Scale points from `from` to `to` inclusive; computed as from + k*step so
/// no rounding error accumulates.
inline std::vector<double> sweep_points(double from_pct, double to_pct, double step_pct) {
  if (!(from_pct > 0.0) || !(to_pct >= from_pct) || !(step_pct > 0.0) || !std::isfinite(to_pct))
    throw InputError("sweep range requires 0 < from <= to and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((to_pct - from_pct) / step_pct + 1e-9)) + 1;
  std::vector<double> pts(count);
  for (std::size_t k = 0; k < count; ++k) pts[k] = from_pct + static_cast<double>(k) * step_pct;
  return pts;
}

/// Solves the case with every sigma scaled by each point / 100, each from a
/// cold start. Failed points are kept with their status.
inline SweepResult ses_sweep(const CaseData& cs, const SweepOptions& opts = {}) {
  const auto pts = sweep_points(opts.from_pct, opts.to_pct, opts.step_pct);
  opts.solver.validate();
  {
    const auto report = validate_case(cs);
    if (!report.empty()) throw InputError("invalid case:\n" + describe(report));
  }
  SweepResult out;
  out.case_name = cs.name;
  out.aggregator_labels = aggregator_labels(cs);
  out.records.resize(pts.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pts.size(); k = next++) {
      try {
        const auto res = run_solve(scale_ses(cs, pts[k] / 100.0), opts.solver, opts.formulation);
        const auto st = res.problem.decode(res.solution.x);
        out.records[k] = {pts[k], res.solution.status, res.solution.iterations, res.metrics,
                          {st.pa_mw.begin(), st.pa_mw.end()}, {st.pg_mw.begin(), st.pg_mw.end()}};
      } catch (const std::exception&) {
        out.records[k] = {pts[k], solver::SolveStatus::numerical_failure, 0, {}, {}, {}};
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(pts.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  return out;
}

}  // namespace seopf
