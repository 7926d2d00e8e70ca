#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sfw {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kVertexDedupTol = 1e-8;

// Per-row feasibility slack used everywhere a point is tested against Ax <= b.
inline double row_tolerance(double b_i) { return kFeasibilityTol * (1.0 + std::abs(b_i)); }

/// All basic feasible solutions of {x : Ax <= b}, deduplicated and sorted
/// lexicographically. Throws UnboundedOrEmpty when no vertex exists.
std::vector<Vector> enumerate_vertices(const Matrix& A, const Vector& b);

/// Bounded polytope {x : Ax <= b} in H-form with its vertex list.
///
/// Vertices are enumerated once at construction, so a Polytope is immutable
/// and can be shared across threads. Vertex ids are positions in the
/// deterministic (lexicographic) enumeration order.
class Polytope {
 public:
  Polytope(Matrix A, Vector b);

  static Polytope unit_simplex(int dim, double scale = 1.0);
  static Polytope box(int dim, double scale = 1.0);

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& row_norms() const { return row_norms_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const Vector& vertex(std::size_t id) const;

  int dim() const { return static_cast<int>(A_.cols()); }
  int num_rows() const { return static_cast<int>(A_.rows()); }
  std::size_t num_vertices() const { return vertices_.size(); }

  bool contains(const Vector& x, double slack = 1e-8) const;

 private:
  Matrix A_;
  Vector b_;
  Vector row_norms_;
  std::vector<Vector> vertices_;
};

struct LmoResult {
  Vector vertex;
  std::size_t vertex_id = 0;
};

/// Linear minimization by vertex scan; ties go to the smallest vertex id.
LmoResult lmo(const Polytope& P, const Vector& g);

/// Linear minimization through the dense simplex method (Bland's rule),
/// without touching the vertex list.
Vector lmo_simplex_method(const Polytope& P, const Vector& g);

/// I(x) = { i : |A_i x - b_i| <= tol }. Without an explicit tol each row uses
/// row_tolerance(b_i). Throws InfeasiblePoint if some row is violated.
std::vector<std::size_t> active_index_set(const Polytope& P, const Vector& x,
                                          std::optional<double> tol = std::nullopt);

/// I(U): rows active at every vertex of U.
std::vector<std::size_t> active_index_set_of_vertex_set(const Polytope& P,
                                                        std::span<const std::size_t> ids);

struct GeometryConstants {
  double diameter = 0.0;
  std::size_t num_vertices = 0;
  double zeta = 0.0;   // smallest positive slack over (vertex, row) pairs
  double phi = 0.0;    // largest row norm among rows not active at every vertex
  double omega = 0.0;  // zeta / phi
};

GeometryConstants geometry_constants(const Polytope& P);

// Same computation over an explicit vertex list (any order).
GeometryConstants geometry_constants(const Matrix& A, const Vector& b,
                                     std::span<const Vector> vertices);

}  // namespace sfw
