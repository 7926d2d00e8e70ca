#include <array>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "sfw/diagnostics.hpp"
#include "sfw/error.hpp"
#include "sfw/frank_wolfe.hpp"
#include "support/random_polytope.hpp"

using namespace sfw;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

SamplePlan exact_plan() { return SamplePlan{}; }

SamplePlan fixed_plan(std::int64_t n) {
  SamplePlan p;
  p.mode = SampleMode::fixed;
  p.fixed_n = n;
  return p;
}

// Away-step Frank-Wolfe written out on plain arrays for the corner simplex in
// R^3, whose vertices in enumeration order are 0, e3, e2, e1.
struct ScratchAway {
  using V3 = std::array<double, 3>;
  std::array<V3, 4> verts{{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}}};
  std::array<std::array<double, 3>, 3> Q{};
  V3 z{};
  double L = 0.0;
  std::array<double, 4> alpha{1, 0, 0, 0};
  V3 x{0, 0, 0};

  static double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

  double f() const {
    V3 y{x[0] - z[0], x[1] - z[1], x[2] - z[2]};
    double s = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += 0.5 * y[i] * Q[i][j] * y[j];
    return s;
  }

  V3 grad() const {
    V3 g{0, 0, 0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i] += Q[i][j] * (x[j] - z[j]);
    return g;
  }

  void step() {
    const V3 g = grad();
    int s = 0, v = -1, count = 0;
    for (int i = 1; i < 4; ++i)
      if (dot(g, verts[i]) < dot(g, verts[s])) s = i;
    for (int i = 0; i < 4; ++i) {
      if (alpha[i] <= 0) continue;
      ++count;
      if (v < 0 || dot(g, verts[i]) > dot(g, verts[v])) v = i;
    }
    V3 dfw, daw;
    for (int j = 0; j < 3; ++j) {
      dfw[j] = verts[s][j] - x[j];
      daw[j] = x[j] - verts[v][j];
    }
    const bool fw = count == 1 || -dot(g, dfw) >= -dot(g, daw);
    const V3& d = fw ? dfw : daw;
    const double gmax = fw ? 1.0 : alpha[v] / (1 - alpha[v]);
    const double gamma = std::min(gmax, std::max(0.0, -dot(g, d) / (L * dot(d, d))));
    for (int j = 0; j < 3; ++j) x[j] += gamma * d[j];
    if (fw) {
      for (auto& a : alpha) a *= 1 - gamma;
      alpha[s] += gamma;
      if (gamma == 1.0) alpha = {0, 0, 0, 0}, alpha[s] = 1;
    } else {
      for (auto& a : alpha) a *= 1 + gamma;
      alpha[v] -= gamma;
      if (gamma == gmax) alpha[v] = 0;
    }
    double total = 0;
    int alive = 0, last = 0;
    for (int i = 0; i < 4; ++i) {
      if (alpha[i] <= 1e-12) alpha[i] = 0;
      total += alpha[i];
      if (alpha[i] > 0) ++alive, last = i;
    }
    for (auto& a : alpha) a /= total;
    if (alive == 1) x = verts[last];
  }
};

}  // namespace

TEST_CASE("standard step size examples") {
  const Polytope B = Polytope::box(2);
  const Vector x = vec({0.5, 0.5});
  const Vector g = vec({1, 1});
  const StandardStep full = standard_fw_step(x, g, B, 2.0 * 3.0 * 4.0, 3.0, 2.0);
  CHECK(full.gamma == 1.0);
  CHECK(full.x_next == vec({0, 0}));
  CHECK(full.type == StepType::fw_max);
  CHECK(standard_fw_step(x, g, B, 1.0, 1.0, 1.0).gamma == 0.5);
}

TEST_CASE("standard step decreases f as evaluated directly") {
  const QuadraticObjective obj({1.0, 2.0}, vec({2.0, 0.8}));
  const Polytope B = Polytope::box(2);
  const Vector x = vec({0.3, 0.4});
  const double eps = 0.5, D = std::sqrt(2.0);
  const StandardStep st = standard_fw_step(x, obj.gradient(x), B, eps, obj.L(), D);
  const double gamma = eps / (2 * obj.L() * D * D);
  const Vector expected = x + gamma * (vec({1, 1}) - x);
  CHECK((st.x_next - expected).norm() < 1e-15);
  CHECK(obj.value(st.x_next) - obj.value(x) == doctest::Approx(obj.value(expected) - obj.value(x)));
  CHECK(obj.value(st.x_next) < obj.value(x));
}

TEST_CASE("single active vertex always takes the FW branch") {
  const Polytope S = Polytope::unit_simplex(2);
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const ActiveSet a = ActiveSet::single(S, t % 3);
    const Vector g = testing::random_direction(rng, 2);
    if (lmo(S, g).vertex_id == static_cast<std::size_t>(t % 3)) continue;
    const AwayStep st = away_fw_step(a, g, S, 1.0);
    CHECK((st.type == StepType::fw || st.type == StepType::fw_max));
  }
}

TEST_CASE("away step below gamma_max updates weights per the update rule") {
  const Polytope S = Polytope::unit_simplex(2);  // ids: (0,0), (0,1), (1,0)
  ActiveSet a = ActiveSet::single(S, 0);
  a.apply_fw(S, 2, 0.75);
  REQUIRE(a.weight(0) == doctest::Approx(0.25));
  REQUIRE(a.weight(2) == doctest::Approx(0.75));

  const AwayStep st = away_fw_step(a, vec({-1.0, -0.5}), S, 20.0 / 3.0);
  CHECK(st.type == StepType::away);
  CHECK(st.v_id == 0);
  CHECK(st.gamma == doctest::Approx(0.2));
  CHECK(st.gamma_max == doctest::Approx(1.0 / 3.0));
  CHECK(st.next.weight(0) == doctest::Approx(1.2 * 0.25 - 0.2));
  CHECK(st.next.weight(2) == doctest::Approx(1.2 * 0.75));
  CHECK((st.next.point() - vec({0.9, 0.0})).norm() < 1e-14);
}

TEST_CASE("away step at gamma_max drops the vertex") {
  const Polytope S = Polytope::unit_simplex(2);
  ActiveSet a = ActiveSet::single(S, 2);
  a.apply_fw(S, 1, 0.5);
  a.apply_fw(S, 0, 0.2);
  REQUIRE(a.weight(0) == doctest::Approx(0.2));

  const AwayStep st = away_fw_step(a, vec({-1.0, -1.0}), S, 1.0);
  CHECK(st.type == StepType::away_drop);
  CHECK(st.gamma == doctest::Approx(0.25));
  CHECK(st.next.size() == 2);
  CHECK(st.next.weight(0) == 0.0);
  CHECK(st.next.weight(1) == doctest::Approx(0.4 * 1.25));
  CHECK(st.next.weight(2) == doctest::Approx(0.4 * 1.25));
  CHECK(st.next.weight_sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((st.next.point() - vec({0.5, 0.5})).norm() < 1e-14);
}

TEST_CASE("FW weight update cases") {
  const Polytope S = Polytope::unit_simplex(2);
  ActiveSet a = ActiveSet::single(S, 0);
  a.apply_fw(S, 2, 0.75);
  ActiveSet partial = a;
  partial.apply_fw(S, 1, 0.5);
  CHECK(partial.weight(0) == doctest::Approx(0.125));
  CHECK(partial.weight(2) == doctest::Approx(0.375));
  CHECK(partial.weight(1) == doctest::Approx(0.5));
  ActiveSet existing = a;
  existing.apply_fw(S, 2, 0.5);
  CHECK(existing.weight(2) == doctest::Approx(0.5 * 0.75 + 0.5));
  ActiveSet full = a;
  full.apply_fw(S, 1, 1.0);
  CHECK(full.size() == 1);
  CHECK(full.point() == S.vertex(1));
}

TEST_CASE("exact standard run respects the stopping-time bound") {
  const Problem problem = Problem::make(Polytope::box(2), QuadraticObjective({1.0, 3.0}, vec({1.4, 0.3}), 3));
  Rng rng(0);
  const double eps = 0.1;
  const RunTrace tr = run(Algorithm::standard, problem, NoiseModel::gaussian(0.0), exact_plan(), eps, 1000000, rng);
  REQUIRE(tr.T_eps.has_value());
  const AnalysisConstants c = compute_constants(problem, eps);
  const double gap0 = tr.records.front().f_gap;
  CHECK(*tr.T_eps <= expected_stopping_bound(Algorithm::standard, gap0, 1, c));
  CHECK(tr.records.size() == static_cast<std::size_t>(*tr.T_eps + 1));
  CHECK(tr.records.back().step_type == StepType::none);
}

TEST_CASE("runs starting within epsilon stop at zero") {
  const Problem problem = Problem::make(Polytope::box(2), QuadraticObjective({1.0, 1.0}, vec({0.5, 0.5})));
  Rng rng(0);
  for (Algorithm alg : {Algorithm::standard, Algorithm::away}) {
    const RunTrace tr = run(alg, problem, NoiseModel::gaussian(0.0), exact_plan(), 10.0, 100, rng);
    CHECK(tr.T_eps == 0);
    CHECK(tr.total_samples == 0);
  }
}

TEST_CASE("exact away run matches an independent reimplementation") {
  const QuadraticObjective obj({1.0, 2.5, 4.0}, vec({0.7, 0.6, -0.2}), 31);
  const Problem problem = Problem::make(Polytope::unit_simplex(3), obj);
  Rng rng(0);
  const RunTrace tr = run(Algorithm::away, problem, NoiseModel::gaussian(0.0), exact_plan(), 1e-14, 20, rng);
  REQUIRE(tr.records.size() == 21);

  ScratchAway ref;
  for (int i = 0; i < 3; ++i) {
    ref.z[i] = obj.z()(i);
    for (int j = 0; j < 3; ++j) ref.Q[i][j] = obj.Q()(i, j);
  }
  ref.L = obj.L();
  int away_steps = 0;
  for (int k = 0; k <= 20; ++k) {
    CHECK(std::abs((ref.f() - problem.reference.f_star) - tr.records[k].f_gap) <= 1e-12);
    if (k < 20) {
      away_steps += tr.records[k].step_type == StepType::away || tr.records[k].step_type == StepType::away_drop;
      ref.step();
    }
  }
  CHECK(away_steps > 0);
}

TEST_CASE("run invariants hold across noisy runs on random polytopes") {
  Rng poly_rng(55);
  for (int trial = 0; trial < 8; ++trial) {
    const Polytope P = testing::random_small_polytope(poly_rng);
    std::vector<double> lambda(P.dim());
    for (int i = 0; i < P.dim(); ++i) lambda[i] = 1.0 + i;
    const Vector z = testing::random_direction(poly_rng, P.dim()) * 1.5;
    const Problem problem = Problem::make(P, QuadraticObjective(lambda, z, trial));
    for (Algorithm alg : {Algorithm::standard, Algorithm::away}) {
      Rng rng(trial);
      const RunTrace tr = run(alg, problem, NoiseModel::gaussian(0.5), fixed_plan(4), 0.01, 300, rng,
                              RunOptions{std::nullopt, true});
      for (const auto& rec : tr.records) {
        CHECK(rec.weight_sum_error <= 1e-10);
        CHECK(rec.min_weight > 0.0);
        CHECK(rec.reconstruction_error <= 1e-8);
        CHECK(rec.gamma >= 0.0);
        CHECK(rec.gamma <= rec.gamma_max + 1e-15);
      }
      for (const auto& snap : tr.snapshots) CHECK(P.contains(snap.point, 1e-8));
      CHECK(tr.total_samples == 4 * tr.steps());
    }
  }
}

TEST_CASE("runs are reproducible from the seed") {
  const Problem problem = Problem::make(Polytope::unit_simplex(3), QuadraticObjective({1.0, 2.0, 3.0}, vec({0.5, 0.5, 0.5}), 2));
  Rng a(42), b(42);
  const RunTrace ta = run(Algorithm::away, problem, NoiseModel::rademacher(1.0), fixed_plan(50), 0.01, 500, a);
  const RunTrace tb = run(Algorithm::away, problem, NoiseModel::rademacher(1.0), fixed_plan(50), 0.01, 500, b);
  REQUIRE(ta.records.size() == tb.records.size());
  for (std::size_t i = 0; i < ta.records.size(); ++i) CHECK(ta.records[i].f_gap == tb.records[i].f_gap);
}

TEST_CASE("initial vertex minimizes the coordinate sum") {
  CHECK(initial_vertex(Polytope::unit_simplex(3)) == 0);
  const Polytope S = Polytope::unit_simplex(2);
  CHECK(S.vertex(initial_vertex(S)) == vec({0, 0}));
}
