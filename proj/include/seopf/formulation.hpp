#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "seopf/ac_network.hpp"
#include "seopf/case_model.hpp"
#include "seopf/nlp.hpp"
#include "seopf/welfare.hpp"

namespace seopf {

struct FormulationOptions {
  /// Tie each aggregator's reactive demand to its active demand at the
  /// q_n/p_n ratio instead of leaving it free in [q_c, q_n].
  bool constant_power_factor = false;
};

/// Offsets of the variable blocks in the decision vector:
/// [P_g | Q_g | P_a | Q_a | V | theta (non-slack buses)], all per-unit.
struct VariableLayout {
  Eigen::Index n_gen = 0, n_agg = 0, n_bus = 0;
  Eigen::Index pg = 0, qg = 0, pa = 0, qa = 0, v = 0, theta = 0, size = 0;
  std::size_t slack = 0;
  std::vector<Eigen::Index> theta_of_bus;  // -1 for the slack bus

  Eigen::Index theta_index(std::size_t bus) const { return theta_of_bus[bus]; }
};

/// Decoded primal point in engineering units.
struct DispatchState {
  Vector pg_mw, qg_mvar, pa_mw, qa_mvar;
  Vector v;      // p.u.
  Vector theta;  // rad, every bus (slack = 0)
};

namespace detail {

/// Scatters the derivatives of f = Vi Vj (alpha cos t + beta sin t),
/// t = theta_i - theta_j, into gradient row `row` and (weighted) Hessian.
/// Angle indices of -1 denote the fixed slack angle.
struct TrigPairTerm {
  Eigen::Index vi, vj, ti, tj;
  double alpha, beta;

  template <class Row>
  void add_gradient(Row&& row, double scale, double Vi, double Vj, double t) const {
    const double c = std::cos(t), s = std::sin(t);
    const double k = alpha * c + beta * s;
    const double kt = -alpha * s + beta * c;
    row(vi) += scale * Vj * k;
    row(vj) += scale * Vi * k;
    if (ti >= 0) row(ti) += scale * Vi * Vj * kt;
    if (tj >= 0) row(tj) -= scale * Vi * Vj * kt;
  }

  void add_hessian(Matrix& h, double w, double Vi, double Vj, double t) const {
    if (w == 0.0) return;
    const double c = std::cos(t), s = std::sin(t);
    const double k = alpha * c + beta * s;
    const double kt = -alpha * s + beta * c;
    const double ktt = -k;
    auto sym = [&h](Eigen::Index a, Eigen::Index b, double val) {
      if (a < 0 || b < 0) return;
      h(a, b) += val;
      if (a != b) h(b, a) += val;
    };
    sym(vi, vj, w * k);
    sym(vi, ti, w * Vj * kt);
    sym(vi, tj, -w * Vj * kt);
    sym(vj, ti, w * Vi * kt);
    sym(vj, tj, -w * Vi * kt);
    sym(ti, ti, w * Vi * Vj * ktt);
    sym(tj, tj, w * Vi * Vj * ktt);
    sym(ti, tj, -w * Vi * Vj * ktt);
  }
};

}  // namespace detail

/// The social-equity-weighted AC OPF as a maximization NLP.
///
/// Objective: sum sigma*U(P_a) - sum C(P_g), $/h, with powers converted from
/// per-unit to MW. Equalities: active then reactive balance at every bus
/// (injection minus network flow), then optional constant-power-factor rows.
/// Inequalities (<= 0): from->to and to->from flow of every line minus its
/// rating, then active and reactive adequacy.
class Problem final : public Nlp {
 public:
  Problem(CaseData cs, FormulationOptions opts) : case_(std::move(cs)), opts_(opts) {
    const auto report = validate_case(case_);
    if (!report.empty()) throw InputError("invalid case:\n" + describe(report));
    y_ = build_admittance(case_);
    build_layout();
    build_bounds();
    agg_bus_.reserve(case_.aggregators.size());
    for (const auto& a : case_.aggregators) agg_bus_.push_back(static_cast<Eigen::Index>(case_.bus_index(a.bus)));
    for (const auto& g : case_.generators) gen_bus_.push_back(static_cast<Eigen::Index>(case_.bus_index(g.bus)));
    agg_labels_ = aggregator_labels(case_);
    gen_labels_ = generator_labels(case_);
  }

  const CaseData& case_data() const { return case_; }
  const VariableLayout& layout() const { return layout_; }
  const Admittance& admittance() const { return y_; }
  const FormulationOptions& options() const { return opts_; }

  Sense sense() const override { return Sense::maximize; }
  Eigen::Index num_variables() const override { return layout_.size; }
  Eigen::Index num_equalities() const override {
    return 2 * layout_.n_bus + (opts_.constant_power_factor ? layout_.n_agg : 0);
  }
  Eigen::Index num_inequalities() const override {
    return 2 * static_cast<Eigen::Index>(case_.lines.size()) + 2;
  }
  const Vector& lower_bounds() const override { return lower_; }
  const Vector& upper_bounds() const override { return upper_; }

  /// Flat start, generators at box midpoints, demands at critical limits.
  Vector initial_point() const override {
    const auto& L = layout_;
    Vector x = Vector::Zero(L.size);
    for (Eigen::Index k = L.pg; k < L.pa; ++k) x(k) = 0.5 * (lower_(k) + upper_(k));
    for (Eigen::Index k = L.pa; k < L.v; ++k) x(k) = lower_(k);
    for (Eigen::Index k = L.v; k < L.theta; ++k) x(k) = std::clamp(1.0, lower_(k), upper_(k));
    return x;
  }

  double objective(const Vector& x) const override {
    const double s = case_.s_base;
    double total = 0.0;
    for (Eigen::Index k = 0; k < layout_.n_agg; ++k) {
      const auto& a = case_.aggregators[k];
      total += a.sigma * smooth_satisfaction(a, s * x(layout_.pa + k));
    }
    for (Eigen::Index g = 0; g < layout_.n_gen; ++g)
      total -= gen_cost(case_.generators[g], s * x(layout_.pg + g));
    return total;
  }

  Vector gradient(const Vector& x) const override {
    const double s = case_.s_base;
    Vector grad = Vector::Zero(layout_.size);
    for (Eigen::Index k = 0; k < layout_.n_agg; ++k) {
      const auto& a = case_.aggregators[k];
      const double p = s * x(layout_.pa + k);
      grad(layout_.pa + k) = s * a.sigma * (p >= a.gamma / a.mu ? 0.0 : a.gamma - a.mu * p);
    }
    for (Eigen::Index g = 0; g < layout_.n_gen; ++g)
      grad(layout_.pg + g) = -s * marginal_cost(case_.generators[g], s * x(layout_.pg + g));
    return grad;
  }

  Vector equalities(const Vector& x) const override {
    const auto& L = layout_;
    const Vector v = x.segment(L.v, L.n_bus);
    const Vector theta = full_angles(x);
    Vector p_net = Vector::Zero(L.n_bus), q_net = Vector::Zero(L.n_bus);
    for (Eigen::Index g = 0; g < L.n_gen; ++g) {
      p_net(gen_bus_[g]) += x(L.pg + g);
      q_net(gen_bus_[g]) += x(L.qg + g);
    }
    for (Eigen::Index k = 0; k < L.n_agg; ++k) {
      p_net(agg_bus_[k]) -= x(L.pa + k);
      q_net(agg_bus_[k]) -= x(L.qa + k);
    }
    auto [rp, rq] = injection_residuals(y_, v, theta, p_net, q_net);
    Vector c(num_equalities());
    c.head(L.n_bus) = rp;
    c.segment(L.n_bus, L.n_bus) = rq;
    if (opts_.constant_power_factor)
      for (Eigen::Index k = 0; k < L.n_agg; ++k)
        c(2 * L.n_bus + k) = x(L.qa + k) - power_factor_ratio(k) * x(L.pa + k);
    return c;
  }

  Vector inequalities(const Vector& x) const override {
    const auto& L = layout_;
    const Vector theta = full_angles(x);
    const auto nl = static_cast<Eigen::Index>(case_.lines.size());
    Vector c(num_inequalities());
    for (Eigen::Index l = 0; l < nl; ++l) {
      const auto& line = case_.lines[l];
      const auto ys = series_admittance(line);
      const auto i = line_from_[l], j = line_to_[l];
      const double vi = x(L.v + i), vj = x(L.v + j), t = theta(i) - theta(j);
      const double limit = line.s_max / case_.s_base;
      c(2 * l) = directed_flow_pu(ys.real(), ys.imag(), vi, vj, t) - limit;
      c(2 * l + 1) = directed_flow_pu(ys.real(), ys.imag(), vj, vi, -t) - limit;
    }
    c(2 * nl) = x.segment(L.pa, L.n_agg).sum() - x.segment(L.pg, L.n_gen).sum();
    c(2 * nl + 1) = x.segment(L.qa, L.n_agg).sum() - x.segment(L.qg, L.n_gen).sum();
    return c;
  }

  Matrix equality_jacobian(const Vector& x) const override {
    const auto& L = layout_;
    Matrix jac = Matrix::Zero(num_equalities(), L.size);
    for (Eigen::Index g = 0; g < L.n_gen; ++g) {
      jac(gen_bus_[g], L.pg + g) += 1.0;
      jac(L.n_bus + gen_bus_[g], L.qg + g) += 1.0;
    }
    for (Eigen::Index k = 0; k < L.n_agg; ++k) {
      jac(agg_bus_[k], L.pa + k) -= 1.0;
      jac(L.n_bus + agg_bus_[k], L.qa + k) -= 1.0;
    }
    const Vector theta = full_angles(x);
    for_each_balance_term(x, theta, [&](Eigen::Index row, auto&& term, double vi, double vj, double t) {
      term.add_gradient(jac.row(row), -1.0, vi, vj, t);
    }, [&](Eigen::Index row, Eigen::Index var, double coeff, double vi) {
      jac(row, var) -= 2.0 * coeff * vi;
    });
    if (opts_.constant_power_factor)
      for (Eigen::Index k = 0; k < L.n_agg; ++k) {
        jac(2 * L.n_bus + k, L.qa + k) = 1.0;
        jac(2 * L.n_bus + k, L.pa + k) = -power_factor_ratio(k);
      }
    return jac;
  }

  Matrix inequality_jacobian(const Vector& x) const override {
    const auto& L = layout_;
    Matrix jac = Matrix::Zero(num_inequalities(), L.size);
    const Vector theta = full_angles(x);
    for_each_flow_term(x, theta, [&](Eigen::Index row, auto&& term, double vi, double vj, double t) {
      term.add_gradient(jac.row(row), 1.0, vi, vj, t);
    }, [&](Eigen::Index row, Eigen::Index var, double coeff, double vi) {
      jac(row, var) += 2.0 * coeff * vi;
    });
    const auto nl = static_cast<Eigen::Index>(case_.lines.size());
    jac.row(2 * nl).segment(L.pa, L.n_agg).setOnes();
    jac.row(2 * nl).segment(L.pg, L.n_gen).setConstant(-1.0);
    jac.row(2 * nl + 1).segment(L.qa, L.n_agg).setOnes();
    jac.row(2 * nl + 1).segment(L.qg, L.n_gen).setConstant(-1.0);
    return jac;
  }

  Matrix lagrangian_hessian(const Vector& x, double obj_factor, const Vector& y_eq,
                            const Vector& y_ineq) const override {
    const auto& L = layout_;
    const double s = case_.s_base;
    Matrix h = Matrix::Zero(L.size, L.size);
    for (Eigen::Index k = 0; k < L.n_agg; ++k) {
      const auto& a = case_.aggregators[k];
      const double p = s * x(L.pa + k);
      if (p < a.gamma / a.mu) h(L.pa + k, L.pa + k) += obj_factor * (-a.sigma * a.mu * s * s);
    }
    for (Eigen::Index g = 0; g < L.n_gen; ++g)
      h(L.pg + g, L.pg + g) += obj_factor * (-2.0 * case_.generators[g].a * s * s);

    const Vector theta = full_angles(x);
    for_each_balance_term(x, theta, [&](Eigen::Index row, auto&& term, double vi, double vj, double t) {
      term.add_hessian(h, -y_eq(row), vi, vj, t);
    }, [&](Eigen::Index row, Eigen::Index var, double coeff, double) {
      h(var, var) -= y_eq(row) * 2.0 * coeff;
    });
    for_each_flow_term(x, theta, [&](Eigen::Index row, auto&& term, double vi, double vj, double t) {
      term.add_hessian(h, y_ineq(row), vi, vj, t);
    }, [&](Eigen::Index row, Eigen::Index var, double coeff, double) {
      h(var, var) += y_ineq(row) * 2.0 * coeff;
    });
    return h;
  }

  std::vector<bool> linear_inequalities() const override {
    std::vector<bool> lin(static_cast<std::size_t>(num_inequalities()), false);
    lin[lin.size() - 1] = true;
    lin[lin.size() - 2] = true;
    return lin;
  }

  std::string variable_name(Eigen::Index i) const override {
    const auto& L = layout_;
    if (i < L.qg) return "P_g[" + gen_labels_[i - L.pg] + "]";
    if (i < L.pa) return "Q_g[" + gen_labels_[i - L.qg] + "]";
    if (i < L.qa) return "P_a[" + agg_labels_[i - L.pa] + "]";
    if (i < L.v) return "Q_a[" + agg_labels_[i - L.qa] + "]";
    if (i < L.theta) return "V[" + std::to_string(case_.buses[i - L.v].id) + "]";
    for (std::size_t b = 0; b < case_.buses.size(); ++b)
      if (L.theta_of_bus[b] == i) return "theta[" + std::to_string(case_.buses[b].id) + "]";
    return Nlp::variable_name(i);
  }

  std::string equality_name(Eigen::Index i) const override {
    const auto nb = layout_.n_bus;
    if (i < nb) return "P_balance[" + std::to_string(case_.buses[i].id) + "]";
    if (i < 2 * nb) return "Q_balance[" + std::to_string(case_.buses[i - nb].id) + "]";
    return "power_factor[" + agg_labels_[i - 2 * nb] + "]";
  }

  std::string inequality_name(Eigen::Index i) const override {
    const auto nl = static_cast<Eigen::Index>(case_.lines.size());
    if (i < 2 * nl)
      return "flow[" + line_label(case_.lines[i / 2]) + (i % 2 == 0 ? " from->to]" : " to->from]");
    return i == 2 * nl ? "adequacy_P" : "adequacy_Q";
  }

  /// Angles for every bus with the slack fixed at zero.
  Vector full_angles(const Vector& x) const {
    Vector theta = Vector::Zero(layout_.n_bus);
    for (Eigen::Index b = 0; b < layout_.n_bus; ++b)
      if (layout_.theta_of_bus[b] >= 0) theta(b) = x(layout_.theta_of_bus[b]);
    return theta;
  }

  DispatchState decode(const Vector& x) const {
    const auto& L = layout_;
    const double s = case_.s_base;
    return {s * x.segment(L.pg, L.n_gen), s * x.segment(L.qg, L.n_gen), s * x.segment(L.pa, L.n_agg),
            s * x.segment(L.qa, L.n_agg), x.segment(L.v, L.n_bus), full_angles(x)};
  }

  /// Largest violation (p.u.) of bounds, equalities and inequalities at x.
  double max_violation(const Vector& x) const {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < layout_.size; ++i)
      worst = std::max({worst, lower_(i) - x(i), x(i) - upper_(i)});
    worst = std::max(worst, equalities(x).cwiseAbs().maxCoeff());
    const Vector ci = inequalities(x);
    if (ci.size() > 0) worst = std::max(worst, ci.maxCoeff());
    return worst;
  }

 private:
  static double smooth_satisfaction(const Aggregator& a, double p) {
    if (p >= a.gamma / a.mu) return 0.5 * a.gamma * a.gamma / a.mu;
    return a.gamma * p - 0.5 * a.mu * p * p;
  }

  double power_factor_ratio(Eigen::Index k) const {
    const auto& a = case_.aggregators[k];
    return a.p_n > 0.0 ? a.q_n / a.p_n : 0.0;
  }

  void build_layout() {
    auto& L = layout_;
    L.n_gen = static_cast<Eigen::Index>(case_.generators.size());
    L.n_agg = static_cast<Eigen::Index>(case_.aggregators.size());
    L.n_bus = static_cast<Eigen::Index>(case_.buses.size());
    L.pg = 0;
    L.qg = L.pg + L.n_gen;
    L.pa = L.qg + L.n_gen;
    L.qa = L.pa + L.n_agg;
    L.v = L.qa + L.n_agg;
    L.theta = L.v + L.n_bus;
    L.size = L.theta + L.n_bus - 1;
    L.slack = case_.slack_index();
    L.theta_of_bus.assign(case_.buses.size(), -1);
    Eigen::Index next = L.theta;
    for (std::size_t b = 0; b < case_.buses.size(); ++b)
      if (b != L.slack) L.theta_of_bus[b] = next++;
    for (const auto& line : case_.lines) {
      line_from_.push_back(static_cast<Eigen::Index>(case_.bus_index(line.from_bus)));
      line_to_.push_back(static_cast<Eigen::Index>(case_.bus_index(line.to_bus)));
    }
  }

  void build_bounds() {
    const auto& L = layout_;
    const double s = case_.s_base;
    const double inf = std::numeric_limits<double>::infinity();
    lower_ = Vector::Constant(L.size, -inf);
    upper_ = Vector::Constant(L.size, inf);
    for (Eigen::Index g = 0; g < L.n_gen; ++g) {
      const auto& gen = case_.generators[g];
      lower_(L.pg + g) = gen.p_min / s;
      upper_(L.pg + g) = gen.p_max / s;
      lower_(L.qg + g) = gen.q_min / s;
      upper_(L.qg + g) = gen.q_max / s;
    }
    for (Eigen::Index k = 0; k < L.n_agg; ++k) {
      const auto& a = case_.aggregators[k];
      lower_(L.pa + k) = a.p_c / s;
      upper_(L.pa + k) = a.p_n / s;
      lower_(L.qa + k) = a.q_c / s;
      upper_(L.qa + k) = a.q_n / s;
    }
    for (Eigen::Index b = 0; b < L.n_bus; ++b) {
      lower_(L.v + b) = case_.buses[b].v_min;
      upper_(L.v + b) = case_.buses[b].v_max;
    }
  }

  /// Visits every term of P_i(V, theta) and Q_i(V, theta). `pair` receives
  /// (row, TrigPairTerm, Vi, Vj, t); `diag` receives (row, V index, kappa, Vi)
  /// for a kappa*Vi^2 term.
  template <class PairFn, class DiagFn>
  void for_each_balance_term(const Vector& x, const Vector& theta, PairFn&& pair, DiagFn&& diag) const {
    const auto& L = layout_;
    for (Eigen::Index i = 0; i < L.n_bus; ++i) {
      const double vi = x(L.v + i);
      diag(i, L.v + i, y_.g(i, i), vi);
      diag(L.n_bus + i, L.v + i, -y_.b(i, i), vi);
      for (Eigen::Index j = 0; j < L.n_bus; ++j) {
        if (j == i) continue;
        const double gij = y_.g(i, j), bij = y_.b(i, j);
        if (gij == 0.0 && bij == 0.0) continue;
        const double vj = x(L.v + j), t = theta(i) - theta(j);
        const auto ti = L.theta_of_bus[i], tj = L.theta_of_bus[j];
        pair(i, detail::TrigPairTerm{L.v + i, L.v + j, ti, tj, gij, bij}, vi, vj, t);
        pair(L.n_bus + i, detail::TrigPairTerm{L.v + i, L.v + j, ti, tj, -bij, gij}, vi, vj, t);
      }
    }
  }

  /// Visits the terms of both directed flows of every line.
  template <class PairFn, class DiagFn>
  void for_each_flow_term(const Vector& x, const Vector& theta, PairFn&& pair, DiagFn&& diag) const {
    const auto& L = layout_;
    for (std::size_t l = 0; l < case_.lines.size(); ++l) {
      const auto ys = series_admittance(case_.lines[l]);
      const double g = ys.real(), b = ys.imag();
      const auto i = line_from_[l], j = line_to_[l];
      const double vi = x(L.v + i), vj = x(L.v + j), t = theta(i) - theta(j);
      const auto ti = L.theta_of_bus[i], tj = L.theta_of_bus[j];
      const auto row = static_cast<Eigen::Index>(2 * l);
      diag(row, L.v + i, g, vi);
      pair(row, detail::TrigPairTerm{L.v + i, L.v + j, ti, tj, -g, -b}, vi, vj, t);
      diag(row + 1, L.v + j, g, vj);
      pair(row + 1, detail::TrigPairTerm{L.v + j, L.v + i, tj, ti, -g, -b}, vj, vi, -t);
    }
  }

  CaseData case_;
  FormulationOptions opts_;
  Admittance y_;
  VariableLayout layout_;
  Vector lower_, upper_;
  std::vector<Eigen::Index> agg_bus_, gen_bus_, line_from_, line_to_;
  std::vector<std::string> agg_labels_, gen_labels_;
};

inline Problem build_problem(const CaseData& cs, FormulationOptions opts = {}) { return Problem(cs, opts); }

/// Load curtailment at a primal point.
struct CurtailmentReport {
  std::vector<double> per_aggregator_mw;  // p_n - p
  double total_effective_mw = 0.0;        // sum P_g - sum P_a (includes losses)
};

inline CurtailmentReport curtailment_report(const Problem& problem, const Vector& x,
                                            double feasibility_tol = 1e-6) {
  if (x.size() != problem.num_variables()) throw InputError("curtailment_report: wrong vector size");
  if (problem.max_violation(x) > feasibility_tol)
    throw InputError("curtailment_report: solution is infeasible");
  const auto st = problem.decode(x);
  const auto& cs = problem.case_data();
  CurtailmentReport rep;
  for (std::size_t k = 0; k < cs.aggregators.size(); ++k)
    rep.per_aggregator_mw.push_back(cs.aggregators[k].p_n - st.pa_mw(static_cast<Eigen::Index>(k)));
  rep.total_effective_mw = st.pg_mw.sum() - st.pa_mw.sum();
  return rep;
}

}  // namespace seopf
