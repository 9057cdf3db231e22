#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace seopf::solver {

/// Number of positive, negative and zero eigenvalues of a symmetric matrix.
struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

/// Dense symmetric indefinite factorization P^T (D A D) P = L B L^T with
/// Bunch-Kaufman pivoting (1x1 and 2x2 blocks in B). D is a symmetric
/// equilibration, which keeps the inertia and lets barrier terms spanning
/// many orders of magnitude share one zero-pivot threshold.
class SymmetricIndefiniteLdlt {
 public:
  /// Returns false only for non-finite input; singular matrices factor with
  /// zero pivots counted in the inertia.
  bool factorize(const Eigen::MatrixXd& a) {
    original_ = a;
    inertia_ = {};
    swaps_.clear();
    blocks_.clear();
    if (!a.allFinite()) return false;
    equilibrate(a);
    lower_ = scale_.asDiagonal() * a * scale_.asDiagonal();
    lower_ = (0.5 * (lower_ + lower_.transpose())).eval();
    zero_tol_ = 1e-14 * std::max(1.0, lower_.cwiseAbs().maxCoeff());
    decompose();
    return true;
  }

  const Inertia& inertia() const { return inertia_; }

  /// Solves A x = b with two steps of iterative refinement.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = raw_solve(b);
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd r = b - original_ * x;
      if (!r.allFinite()) break;
      x += raw_solve(r);
    }
    return x;
  }

 private:
  struct Block {
    Eigen::Index start;
    int size;                // 1 or 2
    Eigen::Matrix2d d;       // pivot block (top-left entry only for size 1)
    Eigen::Matrix2d d_inv;   // zero when the pivot is numerically singular
  };

  // Symmetric Ruiz scaling: a few passes of D_i <- D_i / sqrt(max_j |(DAD)_ij|).
  void equilibrate(const Eigen::MatrixXd& a) {
    const auto n = a.rows();
    scale_ = Eigen::VectorXd::Ones(n);
    for (int pass = 0; pass < 5; ++pass) {
      const Eigen::MatrixXd s = scale_.asDiagonal() * a.cwiseAbs() * scale_.asDiagonal();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = s.row(i).maxCoeff();
        if (m > 0.0 && std::isfinite(m)) scale_(i) /= std::sqrt(m);
      }
    }
  }

  // Symmetric interchange of rows and columns i < j of the working matrix.
  // Columns before `from` already hold multipliers, so only rows swap there.
  void interchange(Eigen::Index from, Eigen::Index i, Eigen::Index j) {
    if (i == j) return;
    auto& m = lower_;
    m.row(i).head(from).swap(m.row(j).head(from));
    const auto n = m.rows();
    for (Eigen::Index c = from; c < n; ++c) std::swap(m(i, c), m(j, c));
    for (Eigen::Index r = from; r < n; ++r) std::swap(m(r, i), m(r, j));
  }

  void classify(double ev) {
    if (std::abs(ev) <= zero_tol_) ++inertia_.zero;
    else if (ev > 0.0) ++inertia_.positive;
    else ++inertia_.negative;
  }

  void decompose() {
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    auto& m = lower_;
    const auto n = m.rows();
    for (Eigen::Index k = 0; k < n;) {
      const double absakk = std::abs(m(k, k));
      Eigen::Index imax = k;
      double colmax = 0.0;
      if (k + 1 < n) {
        colmax = m.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&imax);
        imax += k + 1;
      }

      int step = 1;
      Eigen::Index pivot = k;
      if (std::max(absakk, colmax) > 0.0 && absakk < alpha * colmax) {
        double rowmax = 0.0;
        for (Eigen::Index j = k; j < n; ++j)
          if (j != imax) rowmax = std::max(rowmax, std::abs(m(imax, j)));
        if (absakk >= alpha * colmax * (colmax / rowmax)) {
          pivot = k;
        } else if (std::abs(m(imax, imax)) >= alpha * rowmax) {
          pivot = imax;
        } else {
          pivot = imax;
          step = 2;
        }
      }
      const Eigen::Index kk = k + step - 1;
      interchange(k, kk, pivot);
      swaps_.emplace_back(kk, pivot);

      const Eigen::Index rest = n - k - step;
      Block blk{k, step, Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
      if (step == 1) {
        const double d = m(k, k);
        blk.d(0, 0) = d;
        classify(d);
        if (std::abs(d) > zero_tol_) {
          blk.d_inv(0, 0) = 1.0 / d;
          if (rest > 0) {
            const Eigen::VectorXd w = m.col(k).tail(rest);
            m.bottomRightCorner(rest, rest).noalias() -= (w / d) * w.transpose();
            m.col(k).tail(rest) = w / d;
          }
        } else if (rest > 0) {
          m.col(k).tail(rest).setZero();
        }
      } else {
        blk.d << m(k, k), m(k + 1, k), m(k + 1, k), m(k + 1, k + 1);
        const double mean = 0.5 * (blk.d(0, 0) + blk.d(1, 1));
        const double radius = std::hypot(0.5 * (blk.d(0, 0) - blk.d(1, 1)), blk.d(1, 0));
        classify(mean + radius);
        classify(mean - radius);
        const double det = blk.d(0, 0) * blk.d(1, 1) - blk.d(1, 0) * blk.d(1, 0);
        if (std::abs(det) > zero_tol_ * zero_tol_) {
          blk.d_inv << blk.d(1, 1) / det, -blk.d(1, 0) / det, -blk.d(1, 0) / det, blk.d(0, 0) / det;
          if (rest > 0) {
            const Eigen::MatrixXd w = m.block(k + 2, k, rest, 2);
            const Eigen::MatrixXd l = w * blk.d_inv;
            m.bottomRightCorner(rest, rest).noalias() -= l * w.transpose();
            m.block(k + 2, k, rest, 2) = l;
          }
        } else if (rest > 0) {
          m.block(k + 2, k, rest, 2).setZero();
        }
      }
      blocks_.push_back(blk);
      k += step;
    }
  }

  Eigen::VectorXd raw_solve(const Eigen::VectorXd& b) const {
    const auto n = lower_.rows();
    Eigen::VectorXd x = scale_.cwiseProduct(b);
    if (n == 0) return x;
    for (const auto& [i, j] : swaps_) std::swap(x(i), x(j));
    // L z = P^T b (unit lower triangular, block columns).
    for (const auto& blk : blocks_) {
      const Eigen::Index rest = n - blk.start - blk.size;
      if (rest > 0) x.tail(rest).noalias() -= lower_.block(blk.start + blk.size, blk.start, rest, blk.size) *
                                               x.segment(blk.start, blk.size);
    }
    for (const auto& blk : blocks_) {
      if (blk.size == 1) x(blk.start) *= blk.d_inv(0, 0);
      else x.segment<2>(blk.start) = blk.d_inv * x.segment<2>(blk.start);
    }
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
      const Eigen::Index rest = n - it->start - it->size;
      if (rest > 0)
        x.segment(it->start, it->size).noalias() -=
            lower_.block(it->start + it->size, it->start, rest, it->size).transpose() * x.tail(rest);
    }
    for (auto it = swaps_.rbegin(); it != swaps_.rend(); ++it) std::swap(x(it->first), x(it->second));
    return scale_.cwiseProduct(x);
  }

  Eigen::MatrixXd original_;
  Eigen::MatrixXd lower_;
  Eigen::VectorXd scale_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> swaps_;
  std::vector<Block> blocks_;
  double zero_tol_ = 0.0;
  Inertia inertia_;
};

}  // namespace seopf::solver
