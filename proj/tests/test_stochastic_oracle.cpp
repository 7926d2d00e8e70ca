#include <cmath>
#include <random>

#include <doctest.h>

#include "sfw/error.hpp"
#include "sfw/stochastic_oracle.hpp"
#include "support/random_polytope.hpp"

using namespace sfw;

namespace {

QuadraticObjective test_objective() {
  Vector z(3);
  z << 0.2, 0.7, -0.1;
  return QuadraticObjective({1.0, 2.0, 4.0}, z, 12);
}

std::vector<NoiseModel> families() {
  return {NoiseModel::gaussian(1.0), NoiseModel::student_t(5, 0.8), NoiseModel::rademacher(0.6)};
}

SamplePlan bv_standard(double eps, double pg) {
  SamplePlan p;
  p.mode = SampleMode::bounded_variance_standard;
  p.params = {{"V_g", 1.0}, {"D", 1.0}, {"epsilon", eps}, {"p_g", pg}};
  return p;
}

SamplePlan bv_away(double eps, double pg) {
  SamplePlan p;
  p.mode = SampleMode::bounded_variance_away;
  p.params = {{"V_g", 1.0},          {"D", 1.0}, {"epsilon", eps},
              {"p_g", pg},           {"N", 4.0}, {"omega", 1.0 / std::sqrt(2.0)},
              {"eps_g", 1.0 / 8.0}};
  return p;
}

SamplePlan sg_standard(double eps, double c) {
  SamplePlan p;
  p.mode = SampleMode::subgaussian_standard;
  p.params = {{"D", 1.0}, {"epsilon", eps}, {"c", c}, {"M", 2.0}, {"d", 3.0}, {"beta1", eps / 8.0}};
  return p;
}

SamplePlan sg_away(double eps, double c) {
  SamplePlan p;
  p.mode = SampleMode::subgaussian_away;
  p.params = {{"D", 1.0},  {"epsilon", eps}, {"c", c},        {"M", 2.0},
              {"d", 3.0},  {"beta2", 1e-3},  {"omega", 0.5}, {"N", 4.0},
              {"mu", 1.0}, {"eps_g", 0.125}};
  return p;
}

}  // namespace

TEST_CASE("declared variance and sub-Gaussian scale") {
  CHECK(NoiseModel::gaussian(2.0).V_g(3) == doctest::Approx(12.0));
  CHECK(NoiseModel::rademacher(0.5).V_g(4) == doctest::Approx(1.0));
  CHECK(NoiseModel::student_t(3, 1.0).V_g(2) == doctest::Approx(6.0));
  CHECK(NoiseModel::gaussian(2.0).rho(4).value() == doctest::Approx(4.0));
  CHECK_FALSE(NoiseModel::student_t(4, 1.0).rho(4).has_value());
  CHECK_THROWS_AS(NoiseModel::student_t(2, 1.0), Error);
}

TEST_CASE("zero noise returns the exact gradient") {
  const auto obj = test_objective();
  Rng rng(1);
  Vector x(3);
  x << 0.3, 0.3, 0.3;
  CHECK(draw_gradient(obj, x, NoiseModel::gaussian(0.0), rng) == obj.gradient(x));
  for (std::int64_t n : {1, 7, 1000000}) {
    CHECK(estimate_gradient(obj, x, NoiseModel::gaussian(0.0), n, rng) == obj.gradient(x));
  }
}

TEST_CASE("n = 1 estimate is one draw") {
  const auto obj = test_objective();
  Vector x = Vector::Constant(3, 0.1);
  for (const auto& noise : families()) {
    Rng a(5), b(5);
    CHECK(estimate_gradient(obj, x, noise, 1, a) == draw_gradient(obj, x, noise, b));
  }
}

TEST_CASE("mean of many gaussian draws lies in the CLT radius") {
  const auto obj = test_objective();
  Rng rng(2);
  const Vector x = Vector::Constant(3, 0.25);
  const int draws = 100000;
  Vector sum = Vector::Zero(3);
  for (int i = 0; i < draws; ++i) sum += draw_gradient(obj, x, NoiseModel::gaussian(1.0), rng);
  CHECK((sum / draws - obj.gradient(x)).norm() <= 4.0 * std::sqrt(3.0 / draws));
}

TEST_CASE("second moment of a single draw matches V_g within 5%") {
  const auto obj = test_objective();
  const Vector x = Vector::Constant(3, 0.25);
  for (const auto& noise : families()) {
    Rng rng(3);
    double acc = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) acc += (draw_gradient(obj, x, noise, rng) - obj.gradient(x)).squaredNorm();
    CHECK(acc / draws == doctest::Approx(noise.V_g(3)).epsilon(0.05));
  }
}

TEST_CASE("draws are unbiased at random points") {
  const auto obj = test_objective();
  Rng rng(4);
  for (const auto& noise : families()) {
    for (int p = 0; p < 10; ++p) {
      const Vector x = testing::random_direction(rng, 3);
      const int draws = 100000;
      Vector sum = Vector::Zero(3);
      for (int i = 0; i < draws; ++i) sum += draw_gradient(obj, x, noise, rng);
      const Vector err = sum / draws - obj.gradient(x);
      const double se = std::sqrt(noise.V_g(1) / draws);
      for (int j = 0; j < 3; ++j) CHECK(std::abs(err(j)) <= 5.0 * se);
    }
  }
}

TEST_CASE("estimator variance at n = 25 is V_g / 25") {
  const auto obj = test_objective();
  const Vector x = Vector::Constant(3, 0.1);
  for (const auto& noise : families()) {
    Rng rng(6);
    const int reps = 10000;
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) acc += (estimate_gradient(obj, x, noise, 25, rng) - obj.gradient(x)).squaredNorm();
    CHECK(acc / reps == doctest::Approx(noise.V_g(3) / 25.0).epsilon(0.10));
  }
}

TEST_CASE("closed-form means have the same law as summed draws") {
  // compare second moments and tail frequency of the two samplers at n = 40
  for (const auto& noise : {NoiseModel::gaussian(1.0), NoiseModel::rademacher(1.0)}) {
    Rng a(8), b(9);
    const int reps = 20000;
    double m_fast = 0.0, m_slow = 0.0;
    int tail_fast = 0, tail_slow = 0;
    for (int r = 0; r < reps; ++r) {
      const double f = sample_noise_mean(noise, 2, 40, a).norm();
      const double s = sample_noise_mean_by_draws(noise, 2, 40, b).norm();
      m_fast += f * f;
      m_slow += s * s;
      tail_fast += f > 0.3;
      tail_slow += s > 0.3;
    }
    CHECK(m_fast / reps == doctest::Approx(m_slow / reps).epsilon(0.05));
    const double pf = double(tail_fast) / reps, ps = double(tail_slow) / reps;
    CHECK(std::abs(pf - ps) <= 4.0 * std::sqrt(2 * 0.25 / reps));
  }
}

TEST_CASE("chebyshev tail bound") {
  CHECK(chebyshev_tail_bound(4.0, 100, 0.5) == doctest::Approx(0.16));
  CHECK(chebyshev_tail_bound(4.0, 100, INFINITY) == 0.0);
  CHECK(chebyshev_tail_bound(4.0, 1, 0.1) == 1.0);
  try {
    chebyshev_tail_bound(1.0, 1, 0.0);
    FAIL("expected NonpositiveS");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonpositiveS);
  }
}

TEST_CASE("planner: bounded variance, standard") {
  CHECK(plan_sample_size(bv_standard(0.1, 0.9)) == 16000);
  CHECK(plan_sample_size(bv_standard(0.05, 0.9)) == 4 * plan_sample_size(bv_standard(0.1, 0.9)));
}

TEST_CASE("planner: bounded variance, away") {
  // 2 V (2 eps_g D + 1)^2 / ((1 - p_g) eps) (N / omega)^2 = 2 * 1.5625 / 0.01 * 32
  CHECK(plan_sample_size(bv_away(0.1, 0.9)) == 10000);
}

TEST_CASE("planner: sub-Gaussian modes") {
  const double eps = 0.05, c = 0.5;
  const double lead = 16.0 / (c * eps * eps);
  const double expected_std = lead * (2 * 2.0 + 2 + std::log(6.0)) + lead * std::log(1.0 / (eps / 8.0 * eps));
  CHECK(plan_sample_size(sg_standard(eps, c)) == static_cast<std::int64_t>(std::ceil(expected_std)));

  const double c1 = 0.125 * 0.125 * 1.0 / (2.0 * 1.25 * 1.25);
  CHECK(away_threshold_c1(0.5, 4.0, 1.0, 0.125, 1.0) == doctest::Approx(c1));
  const double expected_away = (2 * 2.0 + 2 + std::log(6.0) - std::log(1e-3 * eps)) / (c * c1 * eps);
  CHECK(plan_sample_size(sg_away(eps, c)) == static_cast<std::int64_t>(std::ceil(expected_away)));
  CHECK(plan_warnings(sg_away(0.2, c)).size() == 1);
  CHECK(plan_warnings(sg_away(0.05, c)).empty());
}

TEST_CASE("planner: exact, fixed and error cases") {
  SamplePlan exact;
  CHECK(plan_sample_size(exact) == 0);
  SamplePlan fixed;
  fixed.mode = SampleMode::fixed;
  fixed.fixed_n = 17;
  CHECK(plan_sample_size(fixed) == 17);

  SamplePlan missing = bv_standard(0.1, 0.9);
  missing.params.erase("V_g");
  try {
    plan_sample_size(missing);
    FAIL("expected MissingParam");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingParam);
  }
  try {
    plan_sample_size(bv_standard(0.1, 1.0));
    FAIL("expected NonpositiveDenominator");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonpositiveDenominator);
  }
}

TEST_CASE("planner is nonincreasing in epsilon and in 1 - p_g") {
  std::int64_t prev_s = INT64_MAX, prev_a = INT64_MAX, prev_gs = INT64_MAX, prev_ga = INT64_MAX;
  for (double eps = 0.01; eps <= 1.0; eps *= 1.3) {
    const auto s = plan_sample_size(bv_standard(eps, 0.9));
    const auto a = plan_sample_size(bv_away(eps, 0.9));
    const auto gs = plan_sample_size(sg_standard(eps, 0.5));
    const auto ga = plan_sample_size(sg_away(eps, 0.5));
    CHECK(s <= prev_s);
    CHECK(a <= prev_a);
    CHECK(gs <= prev_gs);
    CHECK(ga <= prev_ga);
    prev_s = s, prev_a = a, prev_gs = gs, prev_ga = ga;
  }
  prev_s = INT64_MAX, prev_a = INT64_MAX;
  for (double q = 0.001; q < 1.0; q *= 1.5) {
    const auto s = plan_sample_size(bv_standard(0.1, 1.0 - q));
    const auto a = plan_sample_size(bv_away(0.1, 1.0 - q));
    CHECK(s <= prev_s);
    CHECK(a <= prev_a);
    prev_s = s, prev_a = a;
  }
}

TEST_CASE("sample mode names round-trip") {
  for (SampleMode m : {SampleMode::exact, SampleMode::fixed, SampleMode::bounded_variance_standard,
                       SampleMode::bounded_variance_away, SampleMode::subgaussian_standard,
                       SampleMode::subgaussian_away}) {
    CHECK(sample_mode_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(sample_mode_from_string("bogus"), Error);
}

TEST_CASE("calibrated c gives a tail bound above the calibration frequencies") {
  Rng rng(21);
  const NoiseModel noise = NoiseModel::gaussian(1.0);
  const std::vector<std::int64_t> n_grid{1, 2, 4, 8};
  const std::vector<double> s_grid{0.5, 1.0, 1.5};
  const double c = calibrate_subgaussian_c(noise, 2, n_grid, s_grid, 10000, rng);
  CHECK(c > 0.0);
  Rng check(22);
  for (auto n : n_grid)
    for (double s : s_grid) {
      int exceed = 0;
      for (int t = 0; t < 10000; ++t) exceed += sample_noise_mean_by_draws(noise, 2, n, check).norm() >= s;
      const double freq = exceed / 10000.0;
      const double se = std::sqrt(std::max(freq * (1 - freq), 1e-4) / 10000.0);
      CHECK(freq <= 4.0 * std::exp(-double(n) * c * s * s) + 3.0 * se);
    }
}
