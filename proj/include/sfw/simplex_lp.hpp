#pragma once

#include "sfw/geometry.hpp"

namespace sfw {

struct LpSolution {
  Vector x;
  double objective = 0.0;
  int pivots = 0;
};

/// Minimizes c^T x subject to A x <= b with x free, by a two-phase dense
/// tableau simplex method using Bland's smallest-index rule.
///
/// x is split as x = x_plus - x_minus and every row gets a slack; rows with
/// b_i < 0 are negated and receive an artificial variable for phase one.
/// The returned x is a basic feasible solution, hence a vertex when the
/// feasible set is a polytope.
///
/// Throws Infeasible or Unbounded.
LpSolution solve_lp_bland(const Matrix& A, const Vector& b, const Vector& c);

}  // namespace sfw
