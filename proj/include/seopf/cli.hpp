#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seopf/builtin_cases.hpp"
#include "seopf/case_io.hpp"
#include "seopf/harness.hpp"
#include "seopf/report_io.hpp"
#include "seopf/solver/copper_plate.hpp"
#include "seopf/solver/derivative_audit.hpp"

namespace seopf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInputError = 2;

/// "builtin:<name>" or a path to a case file.
inline CaseData resolve_case(const std::string& spec, std::uint64_t seed) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string name = spec.substr(prefix.size());
    if (name == "rts24") return rts24_case(seed);
    return builtin_case(name);
  }
  return load_case_file(spec);
}

/// Same case with lossless lines and no flow limits.
inline CaseData copper_plate_reduction(const CaseData& cs) {
  CaseData out = cs;
  for (auto& l : out.lines) {
    l.r = 0.0;
    l.s_max = std::max(l.s_max, 1e6);
  }
  out.name = cs.name + "_copper_plate";
  return out;
}

namespace detail {

inline void print_log(const solver::Solution& sol, std::ostream& err) {
  err << "iter        mu       objective   primal_inf     dual_inf    compl  ls\n";
  for (const auto& r : sol.log) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%4d %9.2e %15.8e %12.4e %12.4e %8.1e %3d%s\n", r.iteration, r.mu, r.objective,
                  r.primal_infeasibility, r.dual_infeasibility, r.complementarity, r.line_search_trials,
                  r.restoration ? " R" : "");
    err << buf;
  }
  err << "status: " << solver::to_string(sol.status) << " (" << sol.message << ")\n";
}

}  // namespace detail

/// Command-line entry point. Returns 0 on success, 1 when a solve does not
/// converge or a check fails, 2 on bad input.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Social-equity-weighted AC optimal power flow"};
  app.require_subcommand(1);

  std::string case_spec, output, format;
  double tol = 1e-6;
  int max_iter = 200;
  std::uint64_t seed = kRts24Seed;
  bool verbose = false;

  std::vector<std::pair<CLI::App*, std::string>> default_formats;
  auto common = [&](CLI::App* sub, const std::string& default_format) {
    sub->add_option("case", case_spec, "case file or builtin:<five_bus|rts24>")->required();
    sub->add_option("--tol", tol, "KKT tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", max_iter, "iteration limit")->check(CLI::Range(1, 100000));
    sub->add_option("--seed", seed, "seed for synthetic data and audit points");
    sub->add_option("--output,-o", output, "output path (default: standard output)");
    default_formats.emplace_back(sub, default_format);
    sub->add_option("--format", format, "csv or json (default: " + default_format + ")")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--verbose,-v", verbose, "print the iteration log to the error stream");
  };

  bool constant_pf = false;
  std::string hessian = "exact";
  auto* solve_cmd = app.add_subcommand("solve", "solve one case at its default scores");
  common(solve_cmd, "json");
  solve_cmd->add_flag("--constant-power-factor", constant_pf, "tie reactive demand to active demand");
  solve_cmd->add_option("--hessian", hessian, "exact or finite-difference")
      ->check(CLI::IsMember({"exact", "finite-difference"}));

  double from = 10.0, to = 150.0, step = 2.0;
  int jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "rescale all scores together and re-solve");
  common(sweep_cmd, "csv");
  sweep_cmd->add_option("--from", from, "first scale, percent");
  sweep_cmd->add_option("--to", to, "last scale, percent");
  sweep_cmd->add_option("--step", step, "scale step, percent");
  sweep_cmd->add_option("--jobs,-j", jobs, "parallel solves")->check(CLI::Range(1, 256));

  int points = 100;
  auto* check_cmd = app.add_subcommand("check", "validate a case and audit derivatives");
  common(check_cmd, "json");
  check_cmd->add_option("--points", points, "audit points")->check(CLI::Range(1, 100000));

  auto* oracle_cmd = app.add_subcommand("oracle", "compare the solver with the copper-plate optimum");
  common(oracle_cmd, "json");

  auto* export_cmd = app.add_subcommand("export", "write a case as a case file");
  common(export_cmd, "json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }
  for (const auto& [sub, fmt] : default_formats)
    if (sub->parsed() && sub->count("--format") == 0) format = fmt;

  try {
    const CaseData cs = resolve_case(case_spec, seed);
    solver::SolverOptions sopts;
    sopts.tol = tol;
    sopts.max_iter = max_iter;
    sopts.hessian = hessian == "exact" ? solver::HessianMode::exact : solver::HessianMode::finite_difference;

    if (app.got_subcommand(export_cmd)) {
      if (format != "json") throw InputError("export supports json only");
      write_output(dump_case(cs), output, out);
      return kExitOk;
    }

    const auto report = validate_case(cs);
    if (!report.empty()) {
      err << "invalid case:\n" << describe(report);
      return kExitInputError;
    }

    if (app.got_subcommand(solve_cmd)) {
      FormulationOptions fopts;
      fopts.constant_power_factor = constant_pf;
      const auto res = run_solve(cs, sopts, fopts);
      if (verbose) detail::print_log(res.solution, err);
      write_output(format == "json" ? solve_to_json(res).dump(2) + "\n" : solve_to_csv(res), output, out);
      if (res.solution.status != solver::SolveStatus::converged) {
        err << "solve did not converge: " << solver::to_string(res.solution.status) << " ("
            << res.solution.message << ")\n";
        return kExitFailure;
      }
      return kExitOk;
    }

    if (app.got_subcommand(sweep_cmd)) {
      SweepOptions wopts;
      wopts.from_pct = from;
      wopts.to_pct = to;
      wopts.step_pct = step;
      wopts.jobs = jobs;
      wopts.solver = sopts;
      const auto result = ses_sweep(cs, wopts);
      write_output(format == "json" ? sweep_to_json(result).dump(2) + "\n" : sweep_to_csv(result), output, out);
      int failed = 0;
      for (const auto& r : result.records) failed += r.status != solver::SolveStatus::converged;
      if (verbose || failed > 0) err << failed << " of " << result.records.size() << " points did not converge\n";
      return failed == 0 ? kExitOk : kExitFailure;
    }

    if (app.got_subcommand(check_cmd)) {
      const Problem problem(cs, {});
      const auto audit = solver::finite_difference_audit(problem, points, seed);
      nlohmann::ordered_json j;
      j["case"] = cs.name;
      j["validation"] = "ok";
      j["audit_points"] = audit.points;
      j["max_gradient_error"] = audit.max_gradient_error;
      j["max_jacobian_error"] = audit.max_jacobian_error;
      j["max_linear_row_error"] = audit.max_linear_row_error;
      j["worst_entry"] = audit.worst_entry;
      j["passed"] = audit.passed();
      if (format == "json") {
        write_output(j.dump(2) + "\n", output, out);
      } else {
        std::string csv = "field,value\n";
        for (const auto& [key, value] : j.items())
          csv += key + "," + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
        write_output(csv, output, out);
      }
      return audit.passed() ? kExitOk : kExitFailure;
    }

    // oracle
    const CaseData reduced = copper_plate_reduction(cs);
    const auto oracle = solver::copper_plate_oracle(reduced);
    const auto res = run_solve(reduced, sopts);
    if (verbose) detail::print_log(res.solution, err);
    const double rel = std::abs(res.solution.objective - oracle.objective) / std::max(1.0, std::abs(oracle.objective));
    const bool ok = res.solution.status == solver::SolveStatus::converged && rel < 1e-5;
    nlohmann::ordered_json j;
    j["case"] = reduced.name;
    j["solver_status"] = solver::to_string(res.solution.status);
    j["solver_objective"] = res.solution.objective;
    j["oracle_objective"] = oracle.objective;
    j["relative_difference"] = rel;
    j["oracle_price"] = oracle.lambda;
    j["oracle_p_agg_mw"] = oracle.p_agg_mw;
    j["oracle_p_gen_mw"] = oracle.p_gen_mw;
    j["passed"] = ok;
    if (format == "json") {
      write_output(j.dump(2) + "\n", output, out);
    } else {
      std::string csv = "field,value\n";
      for (const auto& [key, value] : j.items())
        if (!value.is_array()) csv += key + "," + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
      write_output(csv, output, out);
    }
    return ok ? kExitOk : kExitFailure;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace seopf
