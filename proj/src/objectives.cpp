#include "sfw/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sfw/error.hpp"
#include "sfw/frank_wolfe.hpp"
#include "sfw/rng.hpp"

namespace sfw {

namespace {

Matrix random_rotation(int d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Qm = qr.householderQ() * Matrix::Identity(d, d);
  // Fix column signs so the factorization is unique.
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (R(j, j) < 0.0) Qm.col(j) *= -1.0;
  }
  return Qm;
}

}  // namespace

QuadraticObjective::QuadraticObjective(std::vector<double> eigenvalues, Vector z,
                                       std::optional<std::uint64_t> rotation_seed)
    : eigenvalues_(std::move(eigenvalues)), z_(std::move(z)), rotation_seed_(rotation_seed) {
  const int d = static_cast<int>(z_.size());
  if (d == 0 || static_cast<int>(eigenvalues_.size()) != d) {
    throw Error(ErrorCode::DimensionMismatch, "eigenvalues and z must have the same nonzero size");
  }
  for (double l : eigenvalues_) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw Error(ErrorCode::InvalidArgument, "eigenvalues must be positive and finite");
    }
  }
  R_ = rotation_seed_ ? random_rotation(d, *rotation_seed_) : Matrix::Identity(d, d);
  const Vector lambda = Eigen::Map<const Vector>(eigenvalues_.data(), d);
  Q_ = R_ * lambda.asDiagonal() * R_.transpose();
  Q_ = 0.5 * (Q_ + Q_.transpose());
  L_ = *std::max_element(eigenvalues_.begin(), eigenvalues_.end());
  mu_ = *std::min_element(eigenvalues_.begin(), eigenvalues_.end());
}

double QuadraticObjective::value(const Vector& x) const {
  if (x.size() != z_.size()) throw Error(ErrorCode::DimensionMismatch, "point size");
  const Vector y = x - z_;
  return 0.5 * y.dot(Q_ * y);
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  if (x.size() != z_.size()) throw Error(ErrorCode::DimensionMismatch, "point size");
  return Q_ * (x - z_);
}

ReferenceSolution reference_solution(const QuadraticObjective& obj, const Polytope& P,
                                     long max_iter) {
  if (obj.dim() != P.dim()) throw Error(ErrorCode::DimensionMismatch, "objective vs polytope");
  if (P.contains(obj.z(), 0.0)) return {obj.z(), 0.0, 0.0, 0};

  ActiveSet active = ActiveSet::single(P, initial_vertex(P));
  double gap = 0.0;
  for (long it = 0; it < max_iter; ++it) {
    const Vector& x = active.point();
    const Vector g = obj.gradient(x);
    const LmoResult s = lmo(P, g);
    gap = g.dot(x - s.vertex);
    const double f = obj.value(x);
    if (gap <= 1e-12 * std::max(1.0, std::abs(f))) {
      return {x, f, std::max(gap, 0.0), it};
    }
    try {
      active = away_fw_step(active, g, P, obj.L()).next;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateDirection) throw;
      break;
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "reference solve stopped with duality gap " + std::to_string(gap));
}

double objective_bound_M(const QuadraticObjective& obj, const Polytope& P) {
  double m = 1.0;
  for (const Vector& v : P.vertices()) m = std::max(m, std::abs(obj.value(v)));
  return m;
}

}  // namespace sfw
