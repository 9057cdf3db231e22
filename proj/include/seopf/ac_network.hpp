#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "seopf/case_model.hpp"

namespace seopf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Bus admittance matrix split into conductance and susceptance parts.
/// Series elements only: no line charging, no shunts.
struct Admittance {
  Matrix g;
  Matrix b;
};

/// Series admittance 1/(r + jx) of a line.
inline std::complex<double> series_admittance(const Line& line) {
  if (line.r == 0.0 && line.x == 0.0) throw InputError("line " + line_label(line) + " has zero impedance");
  return 1.0 / std::complex<double>(line.r, line.x);
}

inline Admittance build_admittance(const CaseData& cs) {
  const auto n = static_cast<Eigen::Index>(cs.buses.size());
  Admittance y{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (const auto& line : cs.lines) {
    const auto ys = series_admittance(line);
    const auto i = static_cast<Eigen::Index>(cs.bus_index(line.from_bus));
    const auto j = static_cast<Eigen::Index>(cs.bus_index(line.to_bus));
    y.g(i, i) += ys.real();
    y.g(j, j) += ys.real();
    y.g(i, j) -= ys.real();
    y.g(j, i) -= ys.real();
    y.b(i, i) += ys.imag();
    y.b(j, j) += ys.imag();
    y.b(i, j) -= ys.imag();
    y.b(j, i) -= ys.imag();
  }
  return y;
}

/// Active and reactive power leaving each bus into the network, p.u.
///   P_i = V_i sum_j V_j (G_ij cos t_ij + B_ij sin t_ij)
///   Q_i = V_i sum_j V_j (G_ij sin t_ij - B_ij cos t_ij)
inline std::pair<Vector, Vector> bus_injections(const Admittance& y, const Vector& v,
                                                const Vector& theta) {
  const auto n = y.g.rows();
  Vector p = Vector::Zero(n), q = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double gij = y.g(i, j), bij = y.b(i, j);
      if (gij == 0.0 && bij == 0.0) continue;
      const double t = theta(i) - theta(j);
      const double c = std::cos(t), s = std::sin(t);
      p(i) += v(i) * v(j) * (gij * c + bij * s);
      q(i) += v(i) * v(j) * (gij * s - bij * c);
    }
  return {std::move(p), std::move(q)};
}

/// Balance residuals: net injection minus power leaving into the network.
/// Zero means the bus is balanced.
inline std::pair<Vector, Vector> injection_residuals(const Admittance& y, const Vector& v,
                                                     const Vector& theta, const Vector& p_net,
                                                     const Vector& q_net) {
  const auto n = y.g.rows();
  if (v.size() != n || theta.size() != n || p_net.size() != n || q_net.size() != n)
    throw InputError("injection_residuals: vector sizes must equal the bus count");
  auto [p, q] = bus_injections(y, v, theta);
  return {p_net - p, q_net - q};
}

/// Directed active flows of one line, MW.
struct LineFlow {
  double p_from_to = 0.0;
  double p_to_from = 0.0;
};

/// P_ij = V_i^2 g - V_i V_j (g cos t_ij + b sin t_ij) for the series admittance
/// g + jb of the line, in p.u.
inline double directed_flow_pu(double g, double b, double vi, double vj, double tij) {
  return vi * vi * g - vi * vj * (g * std::cos(tij) + b * std::sin(tij));
}

inline LineFlow line_flow(const CaseData& cs, const Vector& v, const Vector& theta,
                          std::size_t line_index) {
  if (line_index >= cs.lines.size()) throw InputError("unknown line index " + std::to_string(line_index));
  const auto& line = cs.lines[line_index];
  const auto ys = series_admittance(line);
  const auto i = static_cast<Eigen::Index>(cs.bus_index(line.from_bus));
  const auto j = static_cast<Eigen::Index>(cs.bus_index(line.to_bus));
  const double tij = theta(i) - theta(j);
  return {cs.s_base * directed_flow_pu(ys.real(), ys.imag(), v(i), v(j), tij),
          cs.s_base * directed_flow_pu(ys.real(), ys.imag(), v(j), v(i), -tij)};
}

/// Total series losses, MW.
inline double network_losses(const CaseData& cs, const Vector& v, const Vector& theta) {
  double total = 0.0;
  for (std::size_t l = 0; l < cs.lines.size(); ++l) {
    const auto f = line_flow(cs, v, theta, l);
    total += f.p_from_to + f.p_to_from;
  }
  return total;
}

}  // namespace seopf
