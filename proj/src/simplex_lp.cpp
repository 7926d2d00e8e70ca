#include "sfw/simplex_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sfw/error.hpp"

namespace sfw {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kPhaseOneTol = 1e-9;
constexpr int kMaxPivots = 100000;

// Dense tableau: rows 0..m-1 are constraints, row m is the reduced-cost row;
// the last column holds the right-hand side (and -objective in row m).
class Tableau {
 public:
  Tableau(int m, int ncols) : t_(Matrix::Zero(m + 1, ncols + 1)), basis_(m, -1), m_(m), n_(ncols) {}

  double& at(int r, int c) { return t_(r, c); }
  double rhs(int r) const { return t_(r, n_); }
  double cost(int c) const { return t_(m_, c); }
  int basic(int r) const { return basis_[r]; }
  void set_basic(int r, int c) { basis_[r] = c; }
  int rows() const { return m_; }
  int cols() const { return n_; }
  int pivots() const { return pivots_; }

  void set_costs(const Vector& c) {
    t_.row(m_).setZero();
    t_.row(m_).head(n_) = c.transpose();
    for (int r = 0; r < m_; ++r) {
      const double cb = c(basis_[r]);
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(r);
    }
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= m_; ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
    if (++pivots_ > kMaxPivots) throw Error(ErrorCode::NoConvergence, "simplex pivot limit");
  }

  // Bland's rule over columns [0, allowed). Returns false when optimal.
  bool step(int allowed) {
    int enter = -1;
    for (int c = 0; c < allowed; ++c) {
      if (cost(c) < -kPivotTol) {
        enter = c;
        break;
      }
    }
    if (enter < 0) return false;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m_; ++r) {
      const double a = t_(r, enter);
      if (a <= kPivotTol) continue;
      const double ratio = rhs(r) / a;
      const bool strictly_better = leave < 0 || ratio < best - kPivotTol;
      const bool tie_lower_index = !strictly_better && ratio <= best + kPivotTol &&
                                   basis_[r] < basis_[leave];
      if (strictly_better || tie_lower_index) {
        best = strictly_better ? ratio : std::min(best, ratio);
        leave = r;
      }
    }
    if (leave < 0) throw Error(ErrorCode::Unbounded, "LP objective is unbounded below");
    pivot(leave, enter);
    return true;
  }

 private:
  Matrix t_;
  std::vector<int> basis_;
  int m_;
  int n_;
  int pivots_ = 0;
};

}  // namespace

LpSolution solve_lp_bland(const Matrix& A, const Vector& b, const Vector& c) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "LP data shapes disagree");
  }

  int n_art = 0;
  for (int i = 0; i < m; ++i) n_art += b(i) < 0.0 ? 1 : 0;
  const int structural = 2 * d + m;  // x_plus, x_minus, slack
  const int ncols = structural + n_art;

  Tableau tab(m, ncols);
  int art = structural;
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < d; ++j) {
      tab.at(i, j) = sign * A(i, j);
      tab.at(i, d + j) = -sign * A(i, j);
    }
    tab.at(i, 2 * d + i) = sign;
    tab.at(i, ncols) = sign * b(i);
    if (sign < 0.0) {
      tab.at(i, art) = 1.0;
      tab.set_basic(i, art++);
    } else {
      tab.set_basic(i, 2 * d + i);
    }
  }

  if (n_art > 0) {
    Vector phase_one = Vector::Zero(ncols);
    phase_one.tail(n_art).setOnes();
    tab.set_costs(phase_one);
    while (tab.step(ncols)) {
    }
    double infeasibility = 0.0;
    for (int r = 0; r < m; ++r) {
      if (tab.basic(r) >= structural) infeasibility += tab.rhs(r);
    }
    if (infeasibility > kPhaseOneTol * (1.0 + b.cwiseAbs().maxCoeff())) {
      throw Error(ErrorCode::Infeasible, "no point satisfies A x <= b");
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and stay inert.
    for (int r = 0; r < m; ++r) {
      if (tab.basic(r) < structural) continue;
      for (int col = 0; col < structural; ++col) {
        if (std::abs(tab.at(r, col)) > kPivotTol) {
          tab.pivot(r, col);
          break;
        }
      }
    }
  }

  Vector cost = Vector::Zero(ncols);
  cost.head(d) = c;
  cost.segment(d, d) = -c;
  tab.set_costs(cost);
  while (tab.step(structural)) {
  }

  LpSolution sol;
  sol.x = Vector::Zero(d);
  for (int r = 0; r < m; ++r) {
    const int col = tab.basic(r);
    if (col < d) {
      sol.x(col) += tab.rhs(r);
    } else if (col < 2 * d) {
      sol.x(col - d) -= tab.rhs(r);
    }
  }
  sol.objective = c.dot(sol.x);
  sol.pivots = tab.pivots();
  return sol;
}

}  // namespace sfw
