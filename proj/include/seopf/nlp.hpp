#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace seopf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Sense { minimize, maximize };

/// A smooth nonlinear program
///
///   opt  f(x)   s.t.  c_eq(x) = 0,  c_ineq(x) <= 0,  lower <= x <= upper.
///
/// Infinite bounds mark free directions. All evaluators are const and must
/// be safe to call concurrently.
class Nlp {
 public:
  virtual ~Nlp() = default;

  virtual Sense sense() const = 0;
  virtual Eigen::Index num_variables() const = 0;
  virtual Eigen::Index num_equalities() const = 0;
  virtual Eigen::Index num_inequalities() const = 0;

  virtual const Vector& lower_bounds() const = 0;
  virtual const Vector& upper_bounds() const = 0;
  virtual Vector initial_point() const = 0;

  virtual double objective(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Vector equalities(const Vector& x) const = 0;
  virtual Vector inequalities(const Vector& x) const = 0;
  virtual Matrix equality_jacobian(const Vector& x) const = 0;
  virtual Matrix inequality_jacobian(const Vector& x) const = 0;

  /// obj_factor * Hess f + sum y_eq[i] Hess c_eq[i] + sum y_ineq[i] Hess c_ineq[i],
  /// with f in the problem's own sense.
  virtual Matrix lagrangian_hessian(const Vector& x, double obj_factor, const Vector& y_eq,
                                    const Vector& y_ineq) const = 0;

  /// Rows of c_ineq that are affine in x. Used by presolve.
  virtual std::vector<bool> linear_inequalities() const {
    return std::vector<bool>(static_cast<std::size_t>(num_inequalities()), false);
  }

  virtual std::string variable_name(Eigen::Index i) const { return "x[" + std::to_string(i) + "]"; }
  virtual std::string equality_name(Eigen::Index i) const { return "eq[" + std::to_string(i) + "]"; }
  virtual std::string inequality_name(Eigen::Index i) const { return "ineq[" + std::to_string(i) + "]"; }
};

}  // namespace seopf
