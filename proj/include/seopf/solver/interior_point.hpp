#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "seopf/nlp.hpp"
#include "seopf/solver/kkt_check.hpp"
#include "seopf/solver/solution.hpp"
#include "seopf/solver/symmetric_factorization.hpp"

namespace seopf::solver {

/// Central-difference Hessian of the Lagrangian, symmetrized.
inline Matrix finite_difference_hessian(const Nlp& nlp, const Vector& x, double obj_factor,
                                        const Vector& y_eq, const Vector& y_ineq) {
  const auto n = nlp.num_variables();
  auto grad_lagrangian = [&](const Vector& p) {
    Vector g = obj_factor * nlp.gradient(p);
    if (y_eq.size() > 0) g += nlp.equality_jacobian(p).transpose() * y_eq;
    if (y_ineq.size() > 0) g += nlp.inequality_jacobian(p).transpose() * y_ineq;
    return g;
  };
  Matrix h(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = 1e-5 * std::max(1.0, std::abs(x(j)));
    Vector plus = x, minus = x;
    plus(j) += step;
    minus(j) -= step;
    h.col(j) = (grad_lagrangian(plus) - grad_lagrangian(minus)) / (plus(j) - minus(j));
  }
  return 0.5 * (h + h.transpose());
}

namespace detail {

/// min 0.5*|(c_eq(x), c_ineq(x) + s)|^2 + 0.5*zeta*|D (w - w_ref)|^2 over
/// w = (x, s) with the original bounds on x and s >= 0.
class RestorationNlp final : public Nlp {
 public:
  RestorationNlp(const Nlp& base, Vector w_ref, double zeta) : base_(base), ref_(std::move(w_ref)), zeta_(zeta) {
    const auto n = base.num_variables(), mi = base.num_inequalities();
    lower_.resize(n + mi);
    upper_.resize(n + mi);
    lower_ << base.lower_bounds(), Vector::Zero(mi);
    upper_ << base.upper_bounds(), Vector::Constant(mi, std::numeric_limits<double>::infinity());
    weight_ = ref_.cwiseAbs().cwiseMax(1.0).cwiseInverse().cwiseAbs2();
  }

  Sense sense() const override { return Sense::minimize; }
  Eigen::Index num_variables() const override { return lower_.size(); }
  Eigen::Index num_equalities() const override { return 0; }
  Eigen::Index num_inequalities() const override { return 0; }
  const Vector& lower_bounds() const override { return lower_; }
  const Vector& upper_bounds() const override { return upper_; }
  Vector initial_point() const override { return ref_; }

  Vector residual(const Vector& w) const {
    const auto n = base_.num_variables(), me = base_.num_equalities(), mi = base_.num_inequalities();
    const Vector x = w.head(n);
    Vector c(me + mi);
    if (me > 0) c.head(me) = base_.equalities(x);
    if (mi > 0) c.tail(mi) = base_.inequalities(x) + w.tail(mi);
    return c;
  }

  Matrix residual_jacobian(const Vector& w) const {
    const auto n = base_.num_variables(), me = base_.num_equalities(), mi = base_.num_inequalities();
    const Vector x = w.head(n);
    Matrix a = Matrix::Zero(me + mi, n + mi);
    if (me > 0) a.topLeftCorner(me, n) = base_.equality_jacobian(x);
    if (mi > 0) {
      a.bottomLeftCorner(mi, n) = base_.inequality_jacobian(x);
      a.bottomRightCorner(mi, mi).setIdentity();
    }
    return a;
  }

  double objective(const Vector& w) const override {
    return 0.5 * residual(w).squaredNorm() + 0.5 * zeta_ * (weight_.array() * (w - ref_).array().square()).sum();
  }
  Vector gradient(const Vector& w) const override {
    return residual_jacobian(w).transpose() * residual(w) + zeta_ * weight_.cwiseProduct(w - ref_);
  }
  Vector equalities(const Vector&) const override { return Vector(0); }
  Vector inequalities(const Vector&) const override { return Vector(0); }
  Matrix equality_jacobian(const Vector& w) const override { return Matrix(0, w.size()); }
  Matrix inequality_jacobian(const Vector& w) const override { return Matrix(0, w.size()); }

  /// Exact curvature: J'J plus the residual-weighted constraint Hessians.
  Matrix lagrangian_hessian(const Vector& w, double obj_factor, const Vector&, const Vector&) const override {
    const auto n = base_.num_variables(), me = base_.num_equalities();
    const Matrix a = residual_jacobian(w);
    const Vector c = residual(w);
    Matrix h = a.transpose() * a;
    h.topLeftCorner(n, n) += base_.lagrangian_hessian(w.head(n), 0.0, c.head(me), c.tail(c.size() - me));
    h.diagonal() += zeta_ * weight_;
    return obj_factor * h;
  }

 private:
  const Nlp& base_;
  Vector ref_, lower_, upper_, weight_;
  double zeta_;
};

using StopTest = std::function<bool(const Vector& x)>;

class InteriorPoint {
 public:
  InteriorPoint(const Nlp& nlp, const SolverOptions& opts, StopTest stop, bool allow_restoration)
      : nlp_(nlp), opt_(opts), stop_(std::move(stop)), allow_restoration_(allow_restoration) {
    n_ = nlp.num_variables();
    me_ = nlp.num_equalities();
    mi_ = nlp.num_inequalities();
    m_ = me_ + mi_;
    const auto& lo = nlp.lower_bounds();
    const auto& up = nlp.upper_bounds();
    for (Eigen::Index i = 0; i < n_; ++i)
      if (!(lo(i) == up(i))) free_.push_back(i);
    nf_ = static_cast<Eigen::Index>(free_.size());
    nw_ = nf_ + mi_;
    wl_ = Vector::Constant(nw_, -kInf);
    wu_ = Vector::Constant(nw_, kInf);
    for (Eigen::Index k = 0; k < nf_; ++k) {
      wl_(k) = lo(free_[k]);
      wu_(k) = up(free_[k]);
    }
    for (Eigen::Index k = nf_; k < nw_; ++k) wl_(k) = 0.0;
    has_l_.resize(nw_);
    has_u_.resize(nw_);
    for (Eigen::Index k = 0; k < nw_; ++k) {
      has_l_[k] = std::isfinite(wl_(k));
      has_u_[k] = std::isfinite(wu_(k));
    }
    bound_count_ = std::count(has_l_.begin(), has_l_.end(), true) + std::count(has_u_.begin(), has_u_.end(), true);
  }

  Solution run() {
    Solution sol;
    if (auto why = presolve()) {
      sol.status = SolveStatus::infeasible_detected;
      sol.message = *why;
      sol.x = nlp_.initial_point();
      sol.objective = nlp_.objective(sol.x);
      return sol;
    }

    x_base_ = nlp_.initial_point();
    const auto& lo = nlp_.lower_bounds();
    for (Eigen::Index i = 0; i < n_; ++i)
      if (lo(i) == nlp_.upper_bounds()(i)) x_base_(i) = lo(i);

    Vector w0(nw_);
    for (Eigen::Index k = 0; k < nf_; ++k) w0(k) = x_base_(free_[k]);
    push_into_box(w0, 0, nf_);
    {
      Vector x0 = x_base_;
      for (Eigen::Index k = 0; k < nf_; ++k) x0(free_[k]) = w0(k);
      const Vector ci = mi_ > 0 ? nlp_.inequalities(x0) : Vector(0);
      for (Eigen::Index k = 0; k < mi_; ++k) w0(nf_ + k) = std::max(-ci(k), opt_.bound_push);
      const Vector g0 = nlp_.gradient(x0);
      const double gmax = g0.size() > 0 ? g0.cwiseAbs().maxCoeff() : 0.0;
      const double scale = gmax > opt_.max_gradient ? opt_.max_gradient / gmax : 1.0;
      obj_factor_ = (nlp_.sense() == Sense::maximize ? -1.0 : 1.0) * scale;
    }
    w_ = w0;
    zl_ = Vector::Zero(nw_);
    zu_ = Vector::Zero(nw_);
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k]) zl_(k) = 1.0;
      if (has_u_[k]) zu_(k) = 1.0;
    }
    mu_ = opt_.mu_init;
    if (!evaluate_all()) return finish(SolveStatus::numerical_failure, "non-finite values at the starting point");
    y_ = least_squares_multipliers();

    for (int iter = 0;; ++iter) {
      const Errors e0 = errors(0.0);
      if (stop_ && stop_(current_x())) return finish(SolveStatus::converged, "stop test satisfied");
      if (e0.overall() <= opt_.tol) {
        Solution cand = make_solution(SolveStatus::converged, "optimal solution found");
        if (kkt_check(nlp_, cand, opt_.tol).passed()) return finalize(std::move(cand));
      }
      if (iter >= opt_.max_iter) return finish(SolveStatus::iteration_limit, "iteration limit reached");

      const double mu_min = opt_.tol / 1000.0;
      while (mu_ > mu_min && errors(mu_).overall() <= 10.0 * mu_)
        mu_ = std::max(mu_min, std::min(opt_.mu_reduction * mu_, std::pow(mu_, opt_.mu_superlinear)));

      IterationRecord rec;
      rec.iteration = iter;
      rec.mu = mu_;
      rec.objective = nlp_.objective(current_x());
      rec.primal_infeasibility = e0.primal;
      rec.dual_infeasibility = e0.dual;
      rec.complementarity = e0.compl_;

      const StepResult step = take_step(rec);
      if (step == StepResult::failure) return finish(SolveStatus::numerical_failure, failure_message_);
      if (step == StepResult::infeasible) return finish(SolveStatus::infeasible_detected, failure_message_);
      log_.push_back(rec);
      ++iterations_;
    }
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr double kTau0 = 0.0;

  enum class StepResult { ok, failure, infeasible };

  struct Errors {
    double dual = 0.0, primal = 0.0, compl_ = 0.0;
    double overall() const { return std::max({dual, primal, compl_}); }
  };

  // --- evaluation ---------------------------------------------------------

  Vector to_x(const Vector& w) const {
    Vector x = x_base_;
    for (Eigen::Index k = 0; k < nf_; ++k) x(free_[k]) = w(k);
    return x;
  }
  Vector current_x() const { return to_x(w_); }

  double eval_f(const Vector& w) const { return obj_factor_ * nlp_.objective(to_x(w)); }

  Vector eval_c(const Vector& w) const {
    const Vector x = to_x(w);
    Vector c(m_);
    if (me_ > 0) c.head(me_) = nlp_.equalities(x);
    if (mi_ > 0) c.tail(mi_) = nlp_.inequalities(x) + w.tail(mi_);
    return c;
  }

  Matrix eval_a(const Vector& w) const {
    const Vector x = to_x(w);
    Matrix a = Matrix::Zero(m_, nw_);
    if (me_ > 0) {
      const Matrix je = nlp_.equality_jacobian(x);
      for (Eigen::Index k = 0; k < nf_; ++k) a.block(0, k, me_, 1) = je.col(free_[k]);
    }
    if (mi_ > 0) {
      const Matrix ji = nlp_.inequality_jacobian(x);
      for (Eigen::Index k = 0; k < nf_; ++k) a.block(me_, k, mi_, 1) = ji.col(free_[k]);
      a.bottomRightCorner(mi_, mi_).setIdentity();
    }
    return a;
  }

  Vector eval_grad(const Vector& w) const {
    const Vector g = nlp_.gradient(to_x(w));
    Vector out = Vector::Zero(nw_);
    for (Eigen::Index k = 0; k < nf_; ++k) out(k) = obj_factor_ * g(free_[k]);
    return out;
  }

  bool evaluate_all() {
    f_ = eval_f(w_);
    c_ = eval_c(w_);
    a_ = eval_a(w_);
    grad_ = eval_grad(w_);
    return std::isfinite(f_) && c_.allFinite() && a_.allFinite() && grad_.allFinite();
  }

  double barrier(const Vector& w, double mu) const {
    double b = 0.0;
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k]) b -= mu * std::log(w(k) - wl_(k));
      if (has_u_[k]) b -= mu * std::log(wu_(k) - w(k));
    }
    return b;
  }

  Vector barrier_gradient(const Vector& w, double mu) const {
    Vector g = Vector::Zero(nw_);
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k]) g(k) -= mu / (w(k) - wl_(k));
      if (has_u_[k]) g(k) += mu / (wu_(k) - w(k));
    }
    return g;
  }

  // --- optimality measures ------------------------------------------------

  Errors errors(double mu) const {
    Errors e;
    const auto [s_d, s_c] = scaling();
    Vector gl = grad_ - zl_ + zu_;
    if (m_ > 0) gl += a_.transpose() * y_;
    e.dual = (nw_ > 0 ? gl.cwiseAbs().maxCoeff() : 0.0) / s_d;
    e.primal = m_ > 0 ? c_.cwiseAbs().maxCoeff() : 0.0;
    double cm = 0.0;
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k]) cm = std::max(cm, std::abs((w_(k) - wl_(k)) * zl_(k) - mu));
      if (has_u_[k]) cm = std::max(cm, std::abs((wu_(k) - w_(k)) * zu_(k) - mu));
    }
    e.compl_ = cm / s_c;
    return e;
  }

  std::pair<double, double> scaling() const {
    return kkt_detail_scaling(y_, zl_, zu_);
  }

  std::pair<double, double> kkt_detail_scaling(const Vector& y, const Vector& zl, const Vector& zu) const {
    const double z1 = zl.lpNorm<1>() + zu.lpNorm<1>();
    const double y1 = y.lpNorm<1>();
    const double cap = seopf::solver::detail::kMultiplierScaleCap;
    const double s_d = std::max(cap, (y1 + z1) / std::max<double>(1.0, static_cast<double>(m_ + bound_count_))) / cap;
    const double s_c = std::max(cap, z1 / std::max<double>(1.0, static_cast<double>(bound_count_))) / cap;
    return {s_d, s_c};
  }

  // --- start point and multipliers ----------------------------------------

  void push_into_box(Vector& w, Eigen::Index from, Eigen::Index to) const {
    const double k1 = opt_.bound_push, k2 = opt_.bound_push;
    for (Eigen::Index k = from; k < to; ++k) {
      const double l = wl_(k), u = wu_(k);
      if (has_l_[k] && has_u_[k]) {
        const double pl = std::min(k1 * std::max(1.0, std::abs(l)), k2 * (u - l));
        const double pu = std::min(k1 * std::max(1.0, std::abs(u)), k2 * (u - l));
        w(k) = std::clamp(w(k), l + pl, u - pu);
      } else if (has_l_[k]) {
        w(k) = std::max(w(k), l + k1 * std::max(1.0, std::abs(l)));
      } else if (has_u_[k]) {
        w(k) = std::min(w(k), u - k1 * std::max(1.0, std::abs(u)));
      }
    }
  }

  Vector least_squares_multipliers() const {
    if (m_ == 0) return Vector(0);
    Matrix aat = a_ * a_.transpose();
    aat.diagonal().array() += 1e-8;
    const Vector rhs = -(a_ * (grad_ - zl_ + zu_));
    Vector y = aat.ldlt().solve(rhs);
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e3) y.setZero();
    return y;
  }

  // --- presolve -------------------------------------------------------------

  std::optional<std::string> presolve() const {
    const auto& lo = nlp_.lower_bounds();
    const auto& up = nlp_.upper_bounds();
    for (Eigen::Index i = 0; i < n_; ++i)
      if (lo(i) > up(i)) return "variable " + nlp_.variable_name(i) + " has lower bound above upper bound";
    const auto linear = nlp_.linear_inequalities();
    if (mi_ == 0 || std::none_of(linear.begin(), linear.end(), [](bool b) { return b; })) return std::nullopt;
    Vector x0 = nlp_.initial_point();
    for (Eigen::Index i = 0; i < n_; ++i)
      if (std::isfinite(lo(i)) && std::isfinite(up(i))) x0(i) = std::clamp(x0(i), lo(i), up(i));
    const Vector c0 = nlp_.inequalities(x0);
    const Matrix j0 = nlp_.inequality_jacobian(x0);
    for (Eigen::Index r = 0; r < mi_; ++r) {
      if (!linear[static_cast<std::size_t>(r)]) continue;
      double lowest = c0(r);
      bool bounded = true;
      for (Eigen::Index i = 0; i < n_ && bounded; ++i) {
        const double coef = j0(r, i);
        if (coef == 0.0) continue;
        const double target = coef > 0.0 ? lo(i) : up(i);
        if (!std::isfinite(target)) bounded = false;
        else lowest += coef * (target - x0(i));
      }
      if (bounded && lowest > opt_.tol)
        return "linear constraint " + nlp_.inequality_name(r) +
               " cannot be satisfied within the variable bounds (smallest attainable value " +
               std::to_string(lowest) + ")";
    }
    return std::nullopt;
  }

  // --- Newton step ----------------------------------------------------------

  Matrix hessian_block() const {
    const Vector x = current_x();
    const Vector ye = y_.head(me_), yi = y_.tail(mi_);
    const Matrix h = opt_.hessian == HessianMode::exact
                         ? nlp_.lagrangian_hessian(x, obj_factor_, ye, yi)
                         : finite_difference_hessian(nlp_, x, obj_factor_, ye, yi);
    Matrix hw = Matrix::Zero(nw_, nw_);
    for (Eigen::Index a = 0; a < nf_; ++a)
      for (Eigen::Index b = 0; b < nf_; ++b) hw(a, b) = h(free_[a], free_[b]);
    return hw;
  }

  Vector sigma() const {
    Vector s = Vector::Zero(nw_);
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k]) s(k) += zl_(k) / (w_(k) - wl_(k));
      if (has_u_[k]) s(k) += zu_(k) / (wu_(k) - w_(k));
    }
    return s;
  }

  /// Factorizes the primal-dual matrix with the smallest Hessian shift that
  /// yields inertia (nw, m, 0). Returns false if no shift works.
  bool factorize(const Matrix& w_block, const Vector& sig, SymmetricIndefiniteLdlt& ldl, double& delta_w,
                 double& delta_c) {
    const Eigen::Index dim = nw_ + m_;
    Matrix k = Matrix::Zero(dim, dim);
    k.topLeftCorner(nw_, nw_) = w_block;
    k.topLeftCorner(nw_, nw_).diagonal() += sig;
    if (m_ > 0) {
      k.bottomLeftCorner(m_, nw_) = a_;
      k.topRightCorner(nw_, m_) = a_.transpose();
    }
    auto attempt = [&](double dw, double dc) {
      Matrix kk = k;
      kk.topLeftCorner(nw_, nw_).diagonal().array() += dw;
      if (m_ > 0) kk.bottomRightCorner(m_, m_).diagonal().array() -= dc;
      if (!ldl.factorize(kk)) return false;
      const auto& in = ldl.inertia();
      return in.positive == nw_ && in.negative == m_ && in.zero == 0;
    };
    delta_w = 0.0;
    delta_c = 0.0;
    if (attempt(0.0, 0.0)) return true;
    if (ldl.inertia().zero > 0) {
      delta_c = 1e-8 * std::pow(mu_, 0.25);
      if (attempt(0.0, delta_c)) return true;
    }
    delta_w = last_delta_w_ == 0.0 ? 1e-4 : std::max(1e-20, last_delta_w_ / 3.0);
    while (!attempt(delta_w, delta_c)) {
      delta_w *= last_delta_w_ == 0.0 ? 100.0 : 8.0;
      if (delta_w > 1e40) return false;
    }
    last_delta_w_ = delta_w;
    return true;
  }

  double max_step(const Vector& w, const Vector& dw, double tau) const {
    double alpha = 1.0;
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k] && dw(k) < 0.0) alpha = std::min(alpha, -tau * (w(k) - wl_(k)) / dw(k));
      if (has_u_[k] && dw(k) > 0.0) alpha = std::min(alpha, tau * (wu_(k) - w(k)) / dw(k));
    }
    return alpha;
  }

  double max_dual_step(const Vector& dzl, const Vector& dzu, double tau) const {
    double alpha = 1.0;
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k] && dzl(k) < 0.0) alpha = std::min(alpha, -tau * zl_(k) / dzl(k));
      if (has_u_[k] && dzu(k) < 0.0) alpha = std::min(alpha, -tau * zu_(k) / dzu(k));
    }
    return alpha;
  }

  void bound_duals_step(const Vector& dw, Vector& dzl, Vector& dzu) const {
    dzl = Vector::Zero(nw_);
    dzu = Vector::Zero(nw_);
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k]) {
        const double gap = w_(k) - wl_(k);
        dzl(k) = mu_ / gap - zl_(k) - zl_(k) / gap * dw(k);
      }
      if (has_u_[k]) {
        const double gap = wu_(k) - w_(k);
        dzu(k) = mu_ / gap - zu_(k) + zu_(k) / gap * dw(k);
      }
    }
  }

  double merit(const Vector& w, double f, const Vector& c) const { return f + barrier(w, mu_) + nu_ * c.norm(); }

  struct Trial {
    Vector w;
    double f = 0.0;
    Vector c;
    bool finite = false;
  };

  Trial make_trial(const Vector& w) const {
    Trial t;
    t.w = w;
    t.f = eval_f(w);
    t.c = eval_c(w);
    t.finite = std::isfinite(t.f) && t.c.allFinite();
    for (Eigen::Index k = 0; k < nw_ && t.finite; ++k)
      if ((has_l_[k] && !(w(k) > wl_(k))) || (has_u_[k] && !(w(k) < wu_(k)))) t.finite = false;
    return t;
  }

  StepResult take_step(IterationRecord& rec) {
    const Matrix wb = hessian_block();
    const Vector sig = sigma();
    SymmetricIndefiniteLdlt ldl;
    double delta_w = 0.0, delta_c = 0.0;
    if (!factorize(wb, sig, ldl, delta_w, delta_c)) {
      failure_message_ = "could not regularize the KKT system";
      return StepResult::failure;
    }
    rec.regularization = delta_w;

    const Vector grad_phi = grad_ + barrier_gradient(w_, mu_);
    Vector rhs(nw_ + m_);
    rhs.head(nw_) = -(grad_phi + (m_ > 0 ? Vector(a_.transpose() * y_) : Vector::Zero(nw_)));
    rhs.tail(m_) = -c_;
    const Vector sol = ldl.solve(rhs);
    if (!sol.allFinite()) {
      failure_message_ = "non-finite Newton step";
      return StepResult::failure;
    }
    const Vector dw = sol.head(nw_);
    const Vector dy = sol.tail(m_);

    const double tau = std::max(opt_.fraction_to_boundary, 1.0 - mu_);
    const double alpha_max = max_step(w_, dw, tau);

    // Penalty parameter for the l2 merit function.
    const double cnorm = c_.norm();
    Matrix wtot = wb;
    wtot.diagonal() += sig;
    wtot.diagonal().array() += delta_w;
    const double curvature = dw.dot(wtot * dw);
    if (cnorm > 0.0) {
      const double trial_nu = (grad_phi.dot(dw) + 0.5 * std::max(0.0, curvature)) / ((1.0 - 0.1) * cnorm);
      if (nu_ < trial_nu) nu_ = trial_nu + 1.0;
    }
    const Vector lin_c = c_ + (m_ > 0 ? Vector(a_ * dw) : Vector(0));
    const double slope = grad_phi.dot(dw) - nu_ * cnorm + nu_ * lin_c.norm();
    const double phi0 = merit(w_, f_, c_);

    bool tiny = true;
    for (Eigen::Index k = 0; k < nw_ && tiny; ++k)
      if (std::abs(dw(k)) / (1.0 + std::abs(w_(k))) >= 10.0 * std::numeric_limits<double>::epsilon()) tiny = false;

    constexpr double eta = 1e-4;
    double alpha = alpha_max;
    Vector step_w = dw, step_y = dy;
    bool accepted = false;
    int trials = 0;
    if (tiny) {
      accepted = true;
    }
    while (!accepted) {
      ++trials;
      const Trial t = make_trial(w_ + alpha * dw);
      if (t.finite && merit(t.w, t.f, t.c) <= phi0 + eta * alpha * slope) {
        accepted = true;
        break;
      }
      if (trials == 1 && t.finite && t.c.norm() >= cnorm && m_ > 0) {
        // Second-order correction against the Maratos effect.
        Vector c_soc = alpha * c_ + t.c;
        double prev_norm = t.c.norm();
        for (int p = 0; p < 4 && !accepted; ++p) {
          Vector rhs_soc = rhs;
          rhs_soc.tail(m_) = -c_soc;
          const Vector s2 = ldl.solve(rhs_soc);
          if (!s2.allFinite()) break;
          const Vector dw_soc = s2.head(nw_);
          const double a_soc = max_step(w_, dw_soc, tau);
          const Trial ts = make_trial(w_ + a_soc * dw_soc);
          if (!ts.finite) break;
          if (merit(ts.w, ts.f, ts.c) <= phi0 + eta * alpha * slope) {
            accepted = true;
            step_w = dw_soc;
            step_y = s2.tail(m_);
            alpha = a_soc;
            break;
          }
          const double nrm = ts.c.norm();
          if (nrm > 0.99 * prev_norm) break;
          prev_norm = nrm;
          c_soc = a_soc * c_soc + ts.c;
        }
        if (accepted) break;
      }
      alpha *= 0.5;
      if (alpha < 1e-12) break;
    }
    rec.line_search_trials = trials;

    // Blocked steps that make no progress on feasibility, or a runaway
    // penalty, mean the iterate is stuck against its bounds.
    if (accepted && cnorm > opt_.tol) {
      const Trial t = make_trial(w_ + alpha * step_w);
      const bool progress = t.c.norm() <= 0.99 * cnorm;
      stalled_ = (alpha < 1e-4 && !progress) ? stalled_ + 1 : 0;
      if (stalled_ >= 5 || nu_ > 1e10) accepted = false;
    }

    if (!accepted) {
      if (!allow_restoration_ || restorations_ >= opt_.max_restorations) {
        failure_message_ = allow_restoration_ ? "too many restoration phases" : "line search failed";
        return StepResult::failure;
      }
      rec.restoration = true;
      stalled_ = 0;
      nu_ = 1.0;
      return restore();
    }

    Vector dzl, dzu;
    bound_duals_step(step_w, dzl, dzu);
    const double alpha_z = max_dual_step(dzl, dzu, tau);
    w_ += alpha * step_w;
    if (m_ > 0) y_ += alpha * step_y;
    zl_ += alpha_z * dzl;
    zu_ += alpha_z * dzu;
    safeguard_bound_duals();
    rec.alpha_primal = alpha;
    rec.alpha_dual = alpha_z;
    if (!evaluate_all()) {
      failure_message_ = "non-finite function values";
      return StepResult::failure;
    }
    return StepResult::ok;
  }

  void safeguard_bound_duals() {
    constexpr double kappa = 1e10;
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k]) {
        const double gap = w_(k) - wl_(k);
        zl_(k) = std::clamp(zl_(k), mu_ / (kappa * gap), kappa * mu_ / gap);
      }
      if (has_u_[k]) {
        const double gap = wu_(k) - w_(k);
        zu_(k) = std::clamp(zu_(k), mu_ / (kappa * gap), kappa * mu_ / gap);
      }
    }
  }

  // --- restoration ----------------------------------------------------------

  StepResult restore() {
    ++restorations_;
    const Vector x = current_x();
    Vector ref(n_ + mi_);
    ref << x, w_.tail(mi_);
    RestorationNlp resto(nlp_, ref, 1e-8);
    const double start_norm = c_.norm();
    SolverOptions inner = opt_;
    inner.max_iter = 500;
    inner.hessian = HessianMode::exact;
    StopTest stop = [&](const Vector& r) { return resto.residual(r).norm() <= 0.9 * start_norm; };
    InteriorPoint phase(resto, inner, stop, false);
    Solution rs = phase.run();
    restoration_iterations_ += rs.iterations;

    const Vector rc = resto.residual(rs.x);
    const bool reduced = rc.norm() <= 0.9 * start_norm;
    if (!reduced) {
      // A stationary point of the violation close to feasibility is more
      // likely a loose inner tolerance than a genuinely infeasible case.
      if (rs.status == SolveStatus::converged && rc.cwiseAbs().maxCoeff() > std::sqrt(opt_.tol)) {
        failure_message_ = "restoration converged to a point of local infeasibility (|c| = " +
                           std::to_string(rc.cwiseAbs().maxCoeff()) + ")";
        return StepResult::infeasible;
      }
      if (rs.status != SolveStatus::converged) {
        failure_message_ = std::string("restoration phase failed: ") + rs.message;
        return StepResult::failure;
      }
    }
    for (Eigen::Index k = 0; k < nf_; ++k) w_(k) = rs.x(free_[k]);
    for (Eigen::Index k = 0; k < mi_; ++k) w_(nf_ + k) = rs.x(n_ + k);
    push_strictly_inside();
    if (!evaluate_all()) {
      failure_message_ = "non-finite values after restoration";
      return StepResult::failure;
    }
    for (Eigen::Index k = 0; k < nw_; ++k) {
      if (has_l_[k]) zl_(k) = std::min(1.0, mu_ / (w_(k) - wl_(k)));
      if (has_u_[k]) zu_(k) = std::min(1.0, mu_ / (wu_(k) - w_(k)));
    }
    y_ = least_squares_multipliers();
    return StepResult::ok;
  }

  void push_strictly_inside() {
    for (Eigen::Index k = 0; k < nw_; ++k) {
      const double eps = 1e-12 * std::max(1.0, std::abs(w_(k)));
      if (has_l_[k]) w_(k) = std::max(w_(k), wl_(k) + eps);
      if (has_u_[k]) w_(k) = std::min(w_(k), wu_(k) - eps);
    }
  }

  // --- output ---------------------------------------------------------------

  Solution make_solution(SolveStatus status, std::string message) const {
    Solution sol;
    sol.status = status;
    sol.message = std::move(message);
    sol.x = current_x();
    sol.objective = nlp_.objective(sol.x);
    sol.objective_factor = obj_factor_;
    sol.y_eq = y_.head(me_);
    sol.y_ineq = y_.tail(mi_);
    sol.z_lower = Vector::Zero(n_);
    sol.z_upper = Vector::Zero(n_);
    for (Eigen::Index k = 0; k < nf_; ++k) {
      sol.z_lower(free_[k]) = zl_(k);
      sol.z_upper(free_[k]) = zu_(k);
    }
    if (nf_ < n_) {
      Vector g = obj_factor_ * nlp_.gradient(sol.x);
      if (me_ > 0) g += nlp_.equality_jacobian(sol.x).transpose() * sol.y_eq;
      if (mi_ > 0) g += nlp_.inequality_jacobian(sol.x).transpose() * sol.y_ineq;
      std::vector<bool> is_free(static_cast<std::size_t>(n_), false);
      for (auto i : free_) is_free[static_cast<std::size_t>(i)] = true;
      for (Eigen::Index i = 0; i < n_; ++i)
        if (!is_free[static_cast<std::size_t>(i)]) {
          sol.z_lower(i) = std::max(0.0, g(i));
          sol.z_upper(i) = std::max(0.0, -g(i));
        }
    }
    sol.has_duals = true;
    sol.iterations = iterations_;
    sol.restoration_iterations = restoration_iterations_;
    sol.final_mu = mu_;
    sol.log = log_;
    return sol;
  }

  Solution finalize(Solution sol) const { return sol; }

  Solution finish(SolveStatus status, std::string message) const {
    return make_solution(status, std::move(message));
  }

  const Nlp& nlp_;
  SolverOptions opt_;
  StopTest stop_;
  bool allow_restoration_;

  Eigen::Index n_ = 0, me_ = 0, mi_ = 0, m_ = 0, nf_ = 0, nw_ = 0;
  std::vector<Eigen::Index> free_;
  Vector x_base_, wl_, wu_;
  std::vector<bool> has_l_, has_u_;
  Eigen::Index bound_count_ = 0;

  double obj_factor_ = 1.0;
  double mu_ = 0.1;
  double nu_ = 1.0;
  int stalled_ = 0;
  double last_delta_w_ = 0.0;
  int iterations_ = 0;
  int restorations_ = 0;
  int restoration_iterations_ = 0;
  std::string failure_message_;

  Vector w_, y_, zl_, zu_;
  double f_ = 0.0;
  Vector c_, grad_;
  Matrix a_;
  std::vector<IterationRecord> log_;
};

}  // namespace detail

/// Primal-dual interior-point solve of `nlp` from its initial point.
/// Deterministic for a given problem and options.
inline Solution solve(const Nlp& nlp, const SolverOptions& opts = {}) {
  opts.validate();
  detail::InteriorPoint ip(nlp, opts, nullptr, true);
  return ip.run();
}

}  // namespace seopf::solver
