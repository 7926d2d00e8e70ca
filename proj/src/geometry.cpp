#include "sfw/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "sfw/error.hpp"
#include "sfw/simplex_lp.hpp"

namespace sfw {

namespace {

constexpr double kLexTol = 1e-9;
constexpr double kSnapTol = 1e-13;
constexpr double kMaxSubsets = 1e6;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) < b(j) - kLexTol) return true;
    if (a(j) > b(j) + kLexTol) return false;
  }
  return false;
}

bool feasible(const Matrix& A, const Vector& b, const Vector& x) {
  const Vector r = A * x - b;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (r(i) > row_tolerance(b(i))) return false;
  }
  return true;
}

// Advances idx to the next k-combination of {0..n-1}; false when exhausted.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

void check_shapes(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "A has " + std::to_string(A.rows()) + " rows but b has " +
                    std::to_string(b.size()) + " entries");
  }
  if (A.cols() == 0) throw Error(ErrorCode::DimensionMismatch, "A has no columns");
}

}  // namespace

std::vector<Vector> enumerate_vertices(const Matrix& A, const Vector& b) {
  check_shapes(A, b);
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  if (m < d) {
    throw Error(ErrorCode::UnboundedOrEmpty, "fewer constraints than dimensions");
  }
  if (binomial(m, d) > kMaxSubsets) {
    throw Error(ErrorCode::InvalidArgument, "too many row subsets for vertex enumeration");
  }

  std::vector<Vector> found;
  std::vector<int> rows(d);
  std::iota(rows.begin(), rows.end(), 0);
  Matrix As(d, d);
  Vector bs(d);
  do {
    for (int r = 0; r < d; ++r) {
      As.row(r) = A.row(rows[r]);
      bs(r) = b(rows[r]);
    }
    Eigen::FullPivLU<Matrix> lu(As);
    if (!lu.isInvertible()) continue;
    Vector x = lu.solve(bs);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (std::abs(x(j)) < kSnapTol) x(j) = 0.0;
    }
    if (!x.allFinite() || !feasible(A, b, x)) continue;
    const bool dup = std::any_of(found.begin(), found.end(), [&](const Vector& v) {
      return (v - x).norm() <= kVertexDedupTol;
    });
    if (!dup) found.push_back(std::move(x));
  } while (next_combination(rows, m));

  if (found.empty()) throw Error(ErrorCode::UnboundedOrEmpty, "no vertex found");
  std::stable_sort(found.begin(), found.end(), lex_less);
  return found;
}

Polytope::Polytope(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
  check_shapes(A_, b_);
  row_norms_ = A_.rowwise().norm();
  vertices_ = enumerate_vertices(A_, b_);
  // A bounded polytope has a finite LMO in every direction; probing the
  // coordinate directions with the LP solver catches unbounded H-forms.
  for (int j = 0; j < dim(); ++j) {
    for (double sign : {1.0, -1.0}) {
      Vector c = Vector::Zero(dim());
      c(j) = sign;
      try {
        solve_lp_bland(A_, b_, c);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Unbounded) {
          throw Error(ErrorCode::UnboundedOrEmpty, "polytope is unbounded");
        }
        throw;
      }
    }
  }
}

Polytope Polytope::unit_simplex(int dim, double scale) {
  if (dim < 1 || !(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "bad simplex preset");
  Matrix A(dim + 1, dim);
  Vector b(dim + 1);
  A.topRows(dim) = -Matrix::Identity(dim, dim);
  b.head(dim).setZero();
  A.row(dim).setOnes();
  b(dim) = scale;
  return Polytope(std::move(A), std::move(b));
}

Polytope Polytope::box(int dim, double scale) {
  if (dim < 1 || !(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "bad box preset");
  Matrix A(2 * dim, dim);
  Vector b(2 * dim);
  A.topRows(dim) = Matrix::Identity(dim, dim);
  A.bottomRows(dim) = -Matrix::Identity(dim, dim);
  b.head(dim).setConstant(scale);
  b.tail(dim).setZero();
  return Polytope(std::move(A), std::move(b));
}

const Vector& Polytope::vertex(std::size_t id) const {
  if (id >= vertices_.size()) {
    throw Error(ErrorCode::UnknownVertexId, "vertex id " + std::to_string(id));
  }
  return vertices_[id];
}

bool Polytope::contains(const Vector& x, double slack) const {
  if (x.size() != dim()) return false;
  return ((A_ * x - b_).array() <= slack).all();
}

LmoResult lmo(const Polytope& P, const Vector& g) {
  if (P.num_vertices() == 0) throw Error(ErrorCode::EmptyVertexList, "no vertices");
  if (g.size() != P.dim()) throw Error(ErrorCode::DimensionMismatch, "direction size");
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < P.num_vertices(); ++i) {
    const double val = g.dot(P.vertices()[i]);
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  return {P.vertices()[best], best};
}

Vector lmo_simplex_method(const Polytope& P, const Vector& g) {
  if (g.size() != P.dim()) throw Error(ErrorCode::DimensionMismatch, "direction size");
  return solve_lp_bland(P.A(), P.b(), g).x;
}

std::vector<std::size_t> active_index_set(const Polytope& P, const Vector& x,
                                          std::optional<double> tol) {
  if (x.size() != P.dim()) throw Error(ErrorCode::DimensionMismatch, "point size");
  const Vector r = P.A() * x - P.b();
  std::vector<std::size_t> active;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double t = tol ? *tol : row_tolerance(P.b()(i));
    if (r(i) > t) {
      throw Error(ErrorCode::InfeasiblePoint,
                  "row " + std::to_string(i) + " violated by " + std::to_string(r(i)));
    }
    if (std::abs(r(i)) <= t) active.push_back(static_cast<std::size_t>(i));
  }
  return active;
}

std::vector<std::size_t> active_index_set_of_vertex_set(const Polytope& P,
                                                        std::span<const std::size_t> ids) {
  if (ids.empty()) throw Error(ErrorCode::InvalidArgument, "empty vertex set");
  std::vector<std::size_t> result = active_index_set(P, P.vertex(ids[0]));
  for (std::size_t k = 1; k < ids.size(); ++k) {
    const auto next = active_index_set(P, P.vertex(ids[k]));
    std::vector<std::size_t> both;
    std::set_intersection(result.begin(), result.end(), next.begin(), next.end(),
                          std::back_inserter(both));
    result = std::move(both);
  }
  return result;
}

GeometryConstants geometry_constants(const Matrix& A, const Vector& b,
                                     std::span<const Vector> vertices) {
  check_shapes(A, b);
  if (vertices.empty()) throw Error(ErrorCode::EmptyVertexList, "no vertices");

  GeometryConstants gc;
  gc.num_vertices = vertices.size();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      gc.diameter = std::max(gc.diameter, (vertices[i] - vertices[j]).norm());
    }
  }

  const Vector row_norms = A.rowwise().norm();
  double zeta = std::numeric_limits<double>::infinity();
  double phi = 0.0;
  bool any_inactive_row = false;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    bool active_everywhere = true;
    for (const Vector& v : vertices) {
      const double slack = b(i) - A.row(i).dot(v);
      if (slack > row_tolerance(b(i))) {
        active_everywhere = false;
        zeta = std::min(zeta, slack);
      }
    }
    if (!active_everywhere) {
      any_inactive_row = true;
      phi = std::max(phi, row_norms(i));
    }
  }
  if (!any_inactive_row || !(phi > 0.0)) {
    throw Error(ErrorCode::DegeneratePolytope,
                "every constraint is active at every vertex; phi is undefined");
  }
  gc.zeta = zeta;
  gc.phi = phi;
  gc.omega = zeta / phi;
  return gc;
}

GeometryConstants geometry_constants(const Polytope& P) {
  return geometry_constants(P.A(), P.b(), P.vertices());
}

}  // namespace sfw
