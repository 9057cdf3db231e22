#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "seopf/ac_network.hpp"
#include "seopf/harness.hpp"
#include "seopf/solver/kkt_check.hpp"

namespace seopf {

/// Shortest text that reads back to the same double; "nan" and "inf" for
/// non-finite values.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Flow within this many p.u. of its rating counts as binding.
inline constexpr double kBindingTolerance = 1e-5;

// --- sweep ------------------------------------------------------------------

inline std::string sweep_to_csv(const SweepResult& result) {
  std::string out =
      "scale_pct,status,iterations,total_satisfaction,weighted_objective,total_cost,social_welfare,"
      "total_curtailment_mw,losses_mw";
  for (const auto& label : result.aggregator_labels) out += ",norm_sat_" + label;
  out += "\n";
  for (const auto& r : result.records) {
    const auto& m = r.metrics;
    out += format_number(r.scale_pct) + "," + solver::to_string(r.status) + "," + std::to_string(r.iterations);
    for (double v : {m.total_satisfaction, m.weighted_objective, m.total_cost, m.social_welfare,
                     m.total_curtailment_mw, m.losses_mw})
      out += "," + format_number(v);
    for (std::size_t k = 0; k < result.aggregator_labels.size(); ++k)
      out += "," + (k < m.normalized_satisfaction.size() ? format_number(m.normalized_satisfaction[k]) : "nan");
    out += "\n";
  }
  return out;
}

inline nlohmann::ordered_json metrics_to_json(const Metrics& m, const std::vector<std::string>& labels) {
  nlohmann::ordered_json j;
  j["total_satisfaction"] = m.total_satisfaction;
  j["weighted_objective"] = m.weighted_objective;
  j["total_cost"] = m.total_cost;
  j["social_welfare"] = m.social_welfare;
  j["total_curtailment_mw"] = m.total_curtailment_mw;
  j["losses_mw"] = m.losses_mw;
  auto& per = j["normalized_satisfaction"] = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < labels.size() && k < m.normalized_satisfaction.size(); ++k)
    per[labels[k]] = m.normalized_satisfaction[k];
  return j;
}

inline nlohmann::ordered_json sweep_to_json(const SweepResult& result) {
  nlohmann::ordered_json j;
  j["case"] = result.case_name;
  j["aggregators"] = result.aggregator_labels;
  auto& recs = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : result.records) {
    nlohmann::ordered_json e;
    e["scale_pct"] = r.scale_pct;
    e["status"] = solver::to_string(r.status);
    e["iterations"] = r.iterations;
    e["metrics"] = metrics_to_json(r.metrics, result.aggregator_labels);
    e["p_agg_mw"] = r.p_agg_mw;
    e["p_gen_mw"] = r.p_gen_mw;
    recs.push_back(std::move(e));
  }
  return j;
}

// --- single solve -----------------------------------------------------------

/// Nodal price ($/MWh) from the active balance multipliers.
inline Vector locational_prices(const Problem& problem, const solver::Solution& sol) {
  const auto nb = problem.layout().n_bus;
  if (sol.y_eq.size() < nb || sol.objective_factor == 0.0) return Vector::Constant(nb, std::nan(""));
  return sol.y_eq.head(nb) / (sol.objective_factor * problem.case_data().s_base);
}

inline nlohmann::ordered_json solve_to_json(const SolveResult& res) {
  const auto& problem = res.problem;
  const auto& sol = res.solution;
  const auto& cs = problem.case_data();
  const auto st = problem.decode(sol.x);
  const auto agg_labels = aggregator_labels(cs);
  const auto gen_labels = generator_labels(cs);

  nlohmann::ordered_json j;
  j["case"] = cs.name;
  j["status"] = solver::to_string(sol.status);
  j["message"] = sol.message;
  j["iterations"] = sol.iterations;
  j["objective"] = sol.objective;
  j["max_violation_pu"] = problem.max_violation(sol.x);
  if (sol.has_duals) {
    const auto k = solver::kkt_check(problem, sol, 1.0);
    j["kkt"] = {{"stationarity", k.stationarity},
                {"primal_feasibility", k.primal_feasibility},
                {"dual_feasibility", k.dual_feasibility},
                {"complementarity", k.complementarity}};
  }
  j["metrics"] = metrics_to_json(res.metrics, agg_labels);

  const Vector lmp = locational_prices(problem, sol);
  auto& buses = j["buses"] = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < cs.buses.size(); ++b) {
    const auto i = static_cast<Eigen::Index>(b);
    buses.push_back({{"id", cs.buses[b].id}, {"v_pu", st.v(i)}, {"theta_rad", st.theta(i)}, {"lmp", lmp(i)}});
  }
  auto& gens = j["generators"] = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < cs.generators.size(); ++g) {
    const auto i = static_cast<Eigen::Index>(g);
    gens.push_back({{"label", gen_labels[g]}, {"bus", cs.generators[g].bus}, {"p_mw", st.pg_mw(i)},
                    {"q_mvar", st.qg_mvar(i)}});
  }
  auto& aggs = j["aggregators"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < cs.aggregators.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    aggs.push_back({{"label", agg_labels[k]}, {"bus", cs.aggregators[k].bus}, {"p_mw", st.pa_mw(i)},
                    {"q_mvar", st.qa_mvar(i)}, {"curtailment_mw", res.metrics.curtailment_mw[k]},
                    {"normalized_satisfaction", res.metrics.normalized_satisfaction[k]}});
  }
  auto& lines = j["lines"] = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < cs.lines.size(); ++l) {
    const auto& line = cs.lines[l];
    const auto f = line_flow(cs, st.v, st.theta, l);
    const double limit = line.s_max;
    const double tol_mw = kBindingTolerance * cs.s_base;
    lines.push_back({{"label", line_label(line)},
                     {"from_bus", line.from_bus},
                     {"to_bus", line.to_bus},
                     {"s_max_mw", limit},
                     {"p_from_to_mw", f.p_from_to},
                     {"p_to_from_mw", f.p_to_from},
                     {"binding_from_to", f.p_from_to >= limit - tol_mw},
                     {"binding_to_from", f.p_to_from >= limit - tol_mw}});
  }
  return j;
}

/// Long format: section,entity,field,value.
inline std::string solve_to_csv(const SolveResult& res) {
  const auto j = solve_to_json(res);
  std::string out = "section,entity,field,value\n";
  auto cell = [](const nlohmann::ordered_json& v) -> std::string {
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_number(v.get<double>());
    if (v.is_null()) return "nan";
    return v.get<std::string>();
  };
  out += "summary,," + std::string("status,") + cell(j["status"]) + "\n";
  out += "summary,,iterations," + cell(j["iterations"]) + "\n";
  out += "summary,,objective," + cell(j["objective"]) + "\n";
  out += "summary,,max_violation_pu," + cell(j["max_violation_pu"]) + "\n";
  for (const auto& [key, value] : j["metrics"].items()) {
    if (!value.is_object()) out += "metrics,," + key + "," + cell(value) + "\n";
  }
  auto table = [&](const std::string& section, const char* id_key) {
    const std::string singular = section.substr(0, section.size() - 1);
    for (const auto& row : j[section]) {
      const std::string id = cell(row[id_key]);
      for (const auto& [key, value] : row.items())
        if (key != id_key) out += singular + "," + id + "," + key + "," + cell(value) + "\n";
    }
  };
  table("buses", "id");
  table("generators", "label");
  table("aggregators", "label");
  table("lines", "label");
  return out;
}

// --- output -----------------------------------------------------------------

/// Writes `text` to `path`, or to `fallback` when path is empty or "-".
inline void write_output(const std::string& text, const std::string& path, std::ostream& fallback = std::cout) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write output file '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing output file '" + path + "'");
}

}  // namespace seopf
