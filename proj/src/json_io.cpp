#include "sfw/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sfw/error.hpp"

namespace sfw {

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, path + ": " + msg);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) config_error(path + "." + key, "missing");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) config_error(path, "expected an integer");
  return j.get<std::int64_t>();
}

Vector vector_from(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) config_error(path, "expected a nonempty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// JSON has no infinities; they travel as null.
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

template <typename F>
auto rethrow_as_config(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(path, e.what());
  }
}

}  // namespace

Polytope polytope_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  if (j.contains("preset")) {
    const Json& preset = j["preset"];
    if (!preset.is_string()) config_error(path + ".preset", "expected a string");
    const int dim = static_cast<int>(integer(field(j, "dim", path), path + ".dim"));
    const double scale = j.contains("scale") ? number(j["scale"], path + ".scale") : 1.0;
    const std::string name = preset.get<std::string>();
    return rethrow_as_config(path, [&] {
      if (name == "simplex") return Polytope::unit_simplex(dim, scale);
      if (name == "box") return Polytope::box(dim, scale);
      config_error(path + ".preset", "unknown preset '" + name + "'");
    });
  }
  const Json& jA = field(j, "A", path);
  const Vector b = vector_from(field(j, "b", path), path + ".b");
  if (!jA.is_array() || jA.empty()) config_error(path + ".A", "expected a nonempty matrix");
  const std::size_t cols = jA[0].is_array() ? jA[0].size() : 0;
  if (cols == 0) config_error(path + ".A[0]", "expected a nonempty row");
  Matrix A(static_cast<Eigen::Index>(jA.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < jA.size(); ++r) {
    const std::string rp = path + ".A[" + std::to_string(r) + "]";
    const Vector row = vector_from(jA[r], rp);
    if (static_cast<std::size_t>(row.size()) != cols) config_error(rp, "ragged row");
    A.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return rethrow_as_config(path, [&] { return Polytope(std::move(A), b); });
}

Json to_json(const Polytope& P) {
  Json A = Json::array();
  for (int r = 0; r < P.num_rows(); ++r) A.push_back(vector_json(P.A().row(r).transpose()));
  return {{"A", A}, {"b", vector_json(P.b())}};
}

QuadraticObjective objective_from_json(const Json& j, const std::string& path) {
  const Json& jl = field(j, "eigenvalues", path);
  const Vector lambda = vector_from(jl, path + ".eigenvalues");
  const Vector z = vector_from(field(j, "z", path), path + ".z");
  std::optional<std::uint64_t> seed;
  if (j.contains("rotation_seed") && !j["rotation_seed"].is_null()) {
    seed = static_cast<std::uint64_t>(integer(j["rotation_seed"], path + ".rotation_seed"));
  }
  std::vector<double> eig(lambda.data(), lambda.data() + lambda.size());
  return rethrow_as_config(path, [&] { return QuadraticObjective(eig, z, seed); });
}

Json to_json(const QuadraticObjective& obj) {
  Json j = {{"eigenvalues", obj.eigenvalues()}, {"z", vector_json(obj.z())}};
  j["rotation_seed"] = obj.rotation_seed() ? Json(*obj.rotation_seed()) : Json(nullptr);
  return j;
}

NoiseModel noise_from_json(const Json& j, const std::string& path) {
  const Json& kind = field(j, "kind", path);
  if (!kind.is_string()) config_error(path + ".kind", "expected a string");
  const std::string name = kind.get<std::string>();
  auto scale_of = [&] {
    if (j.contains("sigma")) return number(j["sigma"], path + ".sigma");
    return number(field(j, "scale", path), path + ".scale");
  };
  return rethrow_as_config(path, [&] {
    if (name == "gaussian") return NoiseModel::gaussian(scale_of());
    if (name == "rademacher") return NoiseModel::rademacher(scale_of());
    if (name == "student_t") {
      const int dof = static_cast<int>(integer(field(j, "dof", path), path + ".dof"));
      return NoiseModel::student_t(dof, scale_of());
    }
    config_error(path + ".kind", "unknown noise kind '" + name + "'");
  });
}

Json to_json(const NoiseModel& noise) {
  Json j = {{"kind", to_string(noise.kind)}};
  if (noise.kind == NoiseModel::Kind::gaussian) {
    j["sigma"] = noise.scale;
  } else {
    j["scale"] = noise.scale;
  }
  if (noise.kind == NoiseModel::Kind::student_t) j["dof"] = noise.dof;
  return j;
}

SamplePlan plan_from_json(const Json& j, const std::string& path) {
  const Json& mode = field(j, "mode", path);
  if (!mode.is_string()) config_error(path + ".mode", "expected a string");
  SamplePlan plan;
  plan.mode = rethrow_as_config(path + ".mode",
                                [&] { return sample_mode_from_string(mode.get<std::string>()); });
  if (j.contains("params")) {
    const Json& p = j["params"];
    if (!p.is_object()) config_error(path + ".params", "expected an object");
    for (const auto& [key, value] : p.items()) {
      plan.params[key] = number(value, path + ".params." + key);
    }
  }
  if (plan.mode == SampleMode::fixed) {
    if (j.contains("n")) {
      plan.fixed_n = integer(j["n"], path + ".n");
    } else if (plan.has("n")) {
      plan.fixed_n = static_cast<std::int64_t>(plan.get("n"));
    } else {
      config_error(path + ".n", "missing for fixed mode");
    }
    if (plan.fixed_n < 1) config_error(path + ".n", "must be >= 1");
  }
  return plan;
}

Json to_json(const SamplePlan& plan) {
  Json j = {{"mode", to_string(plan.mode)}, {"params", plan.params}};
  if (plan.mode == SampleMode::fixed) j["n"] = plan.fixed_n;
  return j;
}

Json to_json(const AnalysisConstants& c) {
  return {{"epsilon", c.epsilon},
          {"eps_g", c.eps_g},
          {"D", c.D},
          {"L", c.L},
          {"mu", c.mu},
          {"M", c.M},
          {"N", c.N},
          {"omega", c.omega},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"nu", c.nu},
          {"one_minus_nu", c.one_minus_nu},
          {"delta_S", c.delta_S},
          {"delta_A", c.delta_A},
          {"pg_standard", c.pg_standard},
          {"pg_away", c.pg_away},
          {"one_minus_pg_standard", c.one_minus_pg_standard},
          {"one_minus_pg_away", c.one_minus_pg_away}};
}

AnalysisConstants constants_from_json(const Json& j, const std::string& path) {
  auto num = [&](const char* key) { return number(field(j, key, path), path + "." + key); };
  AnalysisConstants c;
  c.epsilon = num("epsilon");
  c.eps_g = num("eps_g");
  c.D = num("D");
  c.L = num("L");
  c.mu = num("mu");
  c.M = num("M");
  c.N = static_cast<std::size_t>(integer(field(j, "N", path), path + ".N"));
  c.omega = num("omega");
  c.beta1 = num("beta1");
  c.beta2 = num("beta2");
  c.nu = num("nu");
  c.one_minus_nu = j.contains("one_minus_nu") ? num("one_minus_nu") : 1.0 - c.nu;
  c.delta_S = num("delta_S");
  c.delta_A = num("delta_A");
  c.pg_standard = num("pg_standard");
  c.pg_away = num("pg_away");
  c.one_minus_pg_standard =
      j.contains("one_minus_pg_standard") ? num("one_minus_pg_standard") : 1.0 - c.pg_standard;
  c.one_minus_pg_away = j.contains("one_minus_pg_away") ? num("one_minus_pg_away") : 1.0 - c.pg_away;
  return c;
}

Json to_json(const IterationRecord& r) {
  return {{"k", r.k},
          {"step_type", to_string(r.step_type)},
          {"gamma", r.gamma},
          {"gamma_max", finite_or_null(r.gamma_max)},
          {"n_samples", r.n_samples},
          {"grad_error", r.grad_error},
          {"good_event", r.good_event},
          {"f_gap", r.f_gap},
          {"active_size", r.active_size},
          {"lyapunov", finite_or_null(r.lyapunov)}};
}

Json trace_to_json(const RunTrace& trace, const AnalysisConstants& c) {
  Json recs = Json::array();
  for (const auto& r : trace.records) recs.push_back(to_json(r));
  return {{"algorithm", to_string(trace.algorithm)},
          {"epsilon", trace.epsilon},
          {"T_eps", trace.T_eps ? Json(*trace.T_eps) : Json(nullptr)},
          {"total_samples", trace.total_samples},
          {"final_gap", trace.final_gap},
          {"n_per_iteration", trace.n_per_iteration},
          {"constants", to_json(c)},
          {"records", recs}};
}

RunTrace trace_from_json(const Json& j, AnalysisConstants* constants_out) {
  try {
    RunTrace t;
    t.algorithm = algorithm_from_string(field(j, "algorithm", "trace").get<std::string>());
    t.epsilon = number(field(j, "epsilon", "trace"), "trace.epsilon");
    const Json& T = field(j, "T_eps", "trace");
    if (!T.is_null()) t.T_eps = static_cast<long>(integer(T, "trace.T_eps"));
    if (j.contains("total_samples")) t.total_samples = integer(j["total_samples"], "trace.total_samples");
    if (j.contains("final_gap")) t.final_gap = number(j["final_gap"], "trace.final_gap");
    if (j.contains("n_per_iteration")) t.n_per_iteration = integer(j["n_per_iteration"], "trace.n_per_iteration");
    const Json& recs = field(j, "records", "trace");
    if (!recs.is_array()) config_error("trace.records", "expected an array");
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const std::string p = "trace.records[" + std::to_string(i) + "]";
      const Json& r = recs[i];
      IterationRecord rec;
      rec.k = static_cast<long>(integer(field(r, "k", p), p + ".k"));
      rec.step_type = step_type_from_string(field(r, "step_type", p).get<std::string>());
      rec.f_gap = number(field(r, "f_gap", p), p + ".f_gap");
      rec.good_event = field(r, "good_event", p).get<bool>();
      rec.active_size = static_cast<std::size_t>(integer(field(r, "active_size", p), p + ".active_size"));
      if (r.contains("gamma")) rec.gamma = number(r["gamma"], p + ".gamma");
      if (r.contains("gamma_max") && !r["gamma_max"].is_null()) rec.gamma_max = number(r["gamma_max"], p + ".gamma_max");
      if (r.contains("n_samples")) rec.n_samples = integer(r["n_samples"], p + ".n_samples");
      if (r.contains("grad_error")) rec.grad_error = number(r["grad_error"], p + ".grad_error");
      if (r.contains("lyapunov") && !r["lyapunov"].is_null()) rec.lyapunov = number(r["lyapunov"], p + ".lyapunov");
      t.records.push_back(rec);
    }
    if (constants_out) *constants_out = constants_from_json(field(j, "constants", "trace"), "trace.constants");
    return t;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedTrace, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedTrace) throw;
    throw Error(ErrorCode::MalformedTrace, e.what());
  }
}

Json to_json(const CheckTally& t) {
  return {{"checked", t.checked}, {"violations", t.violations}, {"worst_margin", finite_or_null(t.worst_margin)}};
}

Json to_json(const VerifyReport& r) {
  return {{"kind", to_string(r.kind)},
          {"violations", r.violations()},
          {"decrease", to_json(r.decrease)},
          {"contraction", to_json(r.contraction)},
          {"drop", to_json(r.drop)},
          {"flagged", r.flagged},
          {"lyapunov", {{"count", r.lyapunov_count},
                        {"mean_ratio", r.lyapunov_mean_ratio},
                        {"bound", r.lyapunov_bound},
                        {"mean_within_bound", r.lyapunov_count == 0 ||
                                                  r.lyapunov_mean_ratio <= r.lyapunov_bound * (1.0 + 1e-9)}}}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path.string() + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, path.string() + ": cannot write");
  out << j.dump(2) << '\n';
}

}  // namespace sfw
