#pragma once

#include <string>
#include <vector>

#include "seopf/case_model.hpp"
#include "seopf/nlp.hpp"

namespace seopf::solver {

enum class HessianMode { exact, finite_difference };

struct SolverOptions {
  double tol = 1e-6;             // KKT tolerance
  int max_iter = 200;
  double mu_init = 0.1;          // initial barrier parameter
  double mu_reduction = 0.2;     // linear barrier decrease factor
  double mu_superlinear = 1.5;   // mu_next <= mu^this
  double fraction_to_boundary = 0.995;
  double bound_push = 1e-2;      // relative push of the start into the box
  double max_gradient = 100.0;   // objective scaled so |grad f(x0)|_inf <= this
  HessianMode hessian = HessianMode::exact;
  int max_restorations = 8;

  void validate() const {
    if (!(tol > 0.0)) throw InputError("solver tolerance must be positive");
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    if (!(mu_init > 0.0)) throw InputError("initial barrier parameter must be positive");
    if (!(mu_reduction > 0.0 && mu_reduction < 1.0))
      throw InputError("barrier reduction factor must lie in (0, 1)");
    if (!(mu_superlinear > 1.0 && mu_superlinear < 2.0))
      throw InputError("superlinear barrier exponent must lie in (1, 2)");
    if (!(fraction_to_boundary > 0.0 && fraction_to_boundary < 1.0))
      throw InputError("fraction-to-boundary must lie in (0, 1)");
  }
};

enum class SolveStatus { converged, iteration_limit, infeasible_detected, numerical_failure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_limit: return "iteration_limit";
    case SolveStatus::infeasible_detected: return "infeasible_detected";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

struct IterationRecord {
  int iteration = 0;
  double mu = 0.0;
  double objective = 0.0;              // problem's own sense and units
  double primal_infeasibility = 0.0;   // |c_eq, c_ineq + s|_inf
  double dual_infeasibility = 0.0;     // scaled stationarity
  double complementarity = 0.0;
  double regularization = 0.0;         // Hessian shift used for the step
  double alpha_primal = 0.0;
  double alpha_dual = 0.0;
  int line_search_trials = 0;
  bool restoration = false;
};

/// Result of a solve. Multipliers belong to the Lagrangian
///   objective_factor * f(x) + y_eq' c_eq(x) + y_ineq' c_ineq(x)
///     - z_lower' (x - lower) - z_upper' (upper - x)
/// where objective_factor folds in objective scaling and the sign flip for
/// maximization.
struct Solution {
  SolveStatus status = SolveStatus::numerical_failure;
  std::string message;
  Vector x;
  Vector y_eq, y_ineq, z_lower, z_upper;
  bool has_duals = false;
  double objective = 0.0;  // problem's own sense and units
  double objective_factor = 1.0;
  int iterations = 0;
  int restoration_iterations = 0;
  double final_mu = 0.0;
  std::vector<IterationRecord> log;
};

}  // namespace seopf::solver
