#include "qcm/lp.h"

#include <limits>

#include "qcm/errors.h"

namespace qcm::lp {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kMaxPivots = 100000;

class Tableau {
 public:
  Tableau(const Matrix& A, const Vector& b)
      : rows_(A.rows()), vars_(A.cols()), t_(Matrix::Zero(A.rows() + 1, A.cols() + A.rows() + 1)) {
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(vars_) = sign * A.row(i);
      t_(i, vars_ + i) = 1.0;
      t_(i, rhs()) = sign * b(i);
      basis_[static_cast<std::size_t>(i)] = vars_ + i;
    }
  }

  Eigen::Index rhs() const { return t_.cols() - 1; }

  // Runs simplex pivots on the objective row, entering only columns below
  // `enter_limit`. Returns false if unbounded.
  bool optimize(Eigen::Index enter_limit) {
    for (int iter = 0; iter < kMaxPivots; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < enter_limit; ++j) {
        if (t_(rows_, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double a = t_(i, enter);
        if (a > kPivotTol) best_ratio = std::min(best_ratio, t_(i, rhs()) / a);
      }
      // Bland: among the minimum-ratio rows, the lowest basic variable leaves.
      Eigen::Index leave = -1;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol || t_(i, rhs()) / a > best_ratio + kPivotTol) continue;
        if (leave < 0 ||
            basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw Error("simplex iteration limit reached");
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Loads max c'x over the columns [0, c.size()) and prices out the basis.
  void set_objective(const Vector& c) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(c.size()) = -c.transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index bv = basis_[static_cast<std::size_t>(i)];
      const double f = t_(rows_, bv);
      if (f != 0.0) t_.row(rows_) -= f * t_.row(i);
    }
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < vars_) continue;
      for (Eigen::Index j = 0; j < vars_; ++j) {
        if (std::abs(t_(i, j)) > kPivotTol) {
          pivot(i, j);
          break;
        }
      }
      // A row with no usable column is redundant; its artificial stays basic at 0.
    }
  }

  double value() const { return t_(rows_, rhs()); }

  Vector solution() const {
    Vector x = Vector::Zero(vars_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index bv = basis_[static_cast<std::size_t>(i)];
      if (bv < vars_) x(bv) = t_(i, rhs());
    }
    return x;
  }

  Eigen::Index vars() const { return vars_; }
  Eigen::Index rows() const { return rows_; }

 private:
  Eigen::Index rows_;
  Eigen::Index vars_;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

Result maximize(const Matrix& A, const Vector& b, const Vector& c) {
  if (A.rows() != b.size() || A.cols() != c.size()) {
    throw InvalidArgument("lp::maximize: dimension mismatch");
  }
  Tableau tab(A, b);
  // Phase 1: maximize -sum(artificials).
  Vector phase1 = Vector::Zero(A.cols() + A.rows());
  phase1.tail(A.rows()).setConstant(-1.0);
  tab.set_objective(phase1);
  tab.optimize(tab.vars() + tab.rows());
  Result result;
  const double scale = std::max(1.0, b.cwiseAbs().sum());
  if (tab.value() < -1e-9 * scale) {
    result.status = Status::kInfeasible;
    return result;
  }
  tab.drive_out_artificials();
  tab.set_objective(c);
  if (!tab.optimize(tab.vars())) {
    result.status = Status::kUnbounded;
    return result;
  }
  result.status = Status::kOptimal;
  result.x = tab.solution();
  result.value = c.dot(result.x);
  return result;
}

}  // namespace qcm::lp
