#include <doctest.h>

#include "sfw/diagnostics.hpp"
#include "sfw/error.hpp"
#include "sfw/json_io.hpp"

using namespace sfw;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("polytope JSON: presets and explicit matrices") {
  const Polytope s = polytope_from_json(Json{{"preset", "simplex"}, {"dim", 3}, {"scale", 2.0}});
  CHECK(s.num_vertices() == 4);
  CHECK(s.b()(3) == 2.0);
  const Polytope b = polytope_from_json(Json{{"preset", "box"}, {"dim", 2}});
  const Polytope again = polytope_from_json(to_json(b));
  CHECK(again.A() == b.A());
  CHECK(again.b() == b.b());

  CHECK(code_of([] { polytope_from_json(Json{{"preset", "cube"}, {"dim", 2}}); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { polytope_from_json(Json{{"A", {{1, 0}, {0}}}, {"b", {1, 1}}}); }) == ErrorCode::ConfigError);
  try {
    polytope_from_json(Json{{"A", {{1, 0}, {0, "x"}}}, {"b", {1, 1}}}, "problem.polytope");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("problem.polytope.A[1]") != std::string::npos);
  }
}

TEST_CASE("objective, noise and plan JSON round-trip") {
  const QuadraticObjective obj = objective_from_json(Json{{"eigenvalues", {1.0, 3.0}}, {"z", {0.1, 0.2}}, {"rotation_seed", 5}});
  const QuadraticObjective back = objective_from_json(to_json(obj));
  CHECK(back.Q() == obj.Q());

  for (const Json& j : {Json{{"kind", "gaussian"}, {"sigma", 0.5}}, Json{{"kind", "rademacher"}, {"scale", 2.0}},
                        Json{{"kind", "student_t"}, {"scale", 1.0}, {"dof", 4}}}) {
    const NoiseModel n = noise_from_json(j);
    const NoiseModel m = noise_from_json(to_json(n));
    CHECK(m.kind == n.kind);
    CHECK(m.scale == n.scale);
    CHECK(m.dof == n.dof);
  }
  CHECK(code_of([] { noise_from_json(Json{{"kind", "student_t"}, {"scale", 1.0}, {"dof", 2}}); }) == ErrorCode::ConfigError);

  const SamplePlan fixed = plan_from_json(Json{{"mode", "fixed"}, {"n", 12}});
  CHECK(fixed.fixed_n == 12);
  CHECK(plan_from_json(Json{{"mode", "fixed"}, {"params", {{"n", 9}}}}).fixed_n == 9);
  CHECK(code_of([] { plan_from_json(Json{{"mode", "fixed"}}); }) == ErrorCode::ConfigError);
  const SamplePlan bv = plan_from_json(Json{{"mode", "bounded_variance_away"}, {"params", {{"p_g", 0.9}}}});
  CHECK(plan_from_json(to_json(bv)).get("p_g") == 0.9);
}

TEST_CASE("trace JSON round-trip keeps what verification needs") {
  const Problem problem = Problem::make(Polytope::unit_simplex(2), QuadraticObjective({1.0, 4.0}, Vector::Constant(2, 0.8)));
  Rng rng(3);
  SamplePlan plan;
  plan.mode = SampleMode::fixed;
  plan.fixed_n = 30;
  const RunTrace tr = run(Algorithm::away, problem, NoiseModel::gaussian(1.0), plan, 0.01, 200, rng);
  const AnalysisConstants c = compute_constants(problem, 0.01);
  AnalysisConstants c2;
  const RunTrace back = trace_from_json(Json::parse(trace_to_json(tr, c).dump()), &c2);
  REQUIRE(back.records.size() == tr.records.size());
  CHECK(back.T_eps == tr.T_eps);
  CHECK(c2.beta2 == c.beta2);
  CHECK(c2.nu == c.nu);
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    CHECK(back.records[i].f_gap == tr.records[i].f_gap);
    CHECK(back.records[i].step_type == tr.records[i].step_type);
    CHECK(back.records[i].good_event == tr.records[i].good_event);
  }
  const VerifyReport a = verify_trace(tr, c, Algorithm::away);
  const VerifyReport b = verify_trace(back, c2, Algorithm::away);
  CHECK(a.violations() == b.violations());
  CHECK(a.contraction.checked == b.contraction.checked);

  CHECK(code_of([] { trace_from_json(Json{{"algorithm", "away"}}); }) == ErrorCode::MalformedTrace);
}
