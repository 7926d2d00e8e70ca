#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sfw/geometry.hpp"

namespace sfw {

/// f(x) = 1/2 (x - z)^T Q (x - z) with Q = R diag(eigenvalues) R^T.
///
/// The rotation R is either the identity or a Haar-like random orthogonal
/// matrix drawn from rotation_seed, so L and mu are known exactly.
class QuadraticObjective {
 public:
  QuadraticObjective(std::vector<double> eigenvalues, Vector z,
                     std::optional<std::uint64_t> rotation_seed = std::nullopt);

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  int dim() const { return static_cast<int>(z_.size()); }
  double L() const { return L_; }
  double mu() const { return mu_; }
  const Matrix& Q() const { return Q_; }
  const Matrix& rotation() const { return R_; }
  const Vector& z() const { return z_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  std::optional<std::uint64_t> rotation_seed() const { return rotation_seed_; }

 private:
  std::vector<double> eigenvalues_;
  Vector z_;
  std::optional<std::uint64_t> rotation_seed_;
  Matrix R_;
  Matrix Q_;
  double L_ = 0.0;
  double mu_ = 0.0;
};

struct ReferenceSolution {
  Vector x_star;
  double f_star = 0.0;
  double certified_gap = 0.0;  // >= f(x_star) - true minimum
  long iterations = 0;
};

inline constexpr long kReferenceMaxIter = 10'000'000;

/// High-accuracy minimizer over P. Returns z itself when feasible; otherwise
/// runs exact-gradient away-step Frank-Wolfe until the Frank-Wolfe duality
/// gap drops below 1e-12 * max(1, |f|). Throws NoConvergence past max_iter.
ReferenceSolution reference_solution(const QuadraticObjective& obj, const Polytope& P,
                                     long max_iter = kReferenceMaxIter);

/// max{ max_{x in P} |f(x)|, 1 }. f is convex and nonnegative, so the
/// maximum over the polytope sits at a vertex.
double objective_bound_M(const QuadraticObjective& obj, const Polytope& P);

}  // namespace sfw
