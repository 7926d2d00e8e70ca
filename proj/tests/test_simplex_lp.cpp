#include <doctest.h>

#include "sfw/error.hpp"
#include "sfw/simplex_lp.hpp"

using namespace sfw;

TEST_CASE("two-variable LP with a unique corner optimum") {
  Matrix A(4, 2);
  A << 1, 2, 3, 1, -1, 0, 0, -1;
  Vector b(4);
  b << 4, 6, 0, 0;
  Vector c(2);
  c << -1, -1;
  const LpSolution sol = solve_lp_bland(A, b, c);
  CHECK(sol.x(0) == doctest::Approx(1.6));
  CHECK(sol.x(1) == doctest::Approx(1.2));
  CHECK(sol.objective == doctest::Approx(-2.8));
}

TEST_CASE("negative right-hand sides go through phase one") {
  Matrix A(2, 1);
  A << -1, 1;
  Vector b(2);
  b << -1, 3;
  Vector c(1);
  c << 1;
  CHECK(solve_lp_bland(A, b, c).x(0) == doctest::Approx(1.0));
  c << -1;
  CHECK(solve_lp_bland(A, b, c).x(0) == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded programs") {
  Matrix A(2, 1);
  A << 1, -1;
  Vector b(2);
  b << -1, -1;
  Vector c(1);
  c << 1;
  try {
    solve_lp_bland(A, b, c);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }

  Matrix A2(1, 1);
  A2 << -1;
  Vector b2(1);
  b2 << 0;
  c << -1;
  try {
    solve_lp_bland(A2, b2, c);
    FAIL("expected Unbounded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unbounded);
  }
}

TEST_CASE("degenerate apex with many tight rows terminates") {
  // square pyramid: base [-1,1]^2 at z = 0, apex (0,0,1) where four facets meet
  Matrix A(5, 3);
  A << 1, 0, 1, -1, 0, 1, 0, 1, 1, 0, -1, 1, 0, 0, -1;
  Vector b(5);
  b << 1, 1, 1, 1, 0;
  Vector c(3);
  c << 0, 0, -1;
  const LpSolution sol = solve_lp_bland(A, b, c);
  CHECK(sol.objective == doctest::Approx(-1.0));
  CHECK(sol.x.norm() == doctest::Approx(1.0));
}
