#include "sfw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "sfw/diagnostics.hpp"
#include "sfw/error.hpp"

namespace sfw {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, path + ": " + msg);
}

const Json& require(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) config_error(key, "missing");
  return *it;
}

// Inline object, or a string path to a JSON file relative to base_dir.
Json resolve_ref(const Json& j, const fs::path& base_dir, const std::string& path) {
  if (j.is_object()) return j;
  if (j.is_string()) {
    fs::path p = j.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return read_json_file(p);
  }
  config_error(path, "expected an object or a file path");
}

// Shortest representation that parses back to the same double.
std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

constexpr int kCalibrationTrials = 10000;

double calibrate_for(const ExperimentConfig& cfg, int d) {
  const double sd = std::sqrt(cfg.noise.V_g(d));
  Rng rng(replication_seed(cfg.master_seed, 0xCA11B, 0));
  return calibrate_subgaussian_c(cfg.noise, d, {1, 2, 4, 8}, {0.5 * sd, 1.0 * sd, 1.5 * sd},
                                 kCalibrationTrials, rng);
}

bool is_subgaussian(SampleMode m) {
  return m == SampleMode::subgaussian_standard || m == SampleMode::subgaussian_away;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

Problem load_problem(const Json& problem, const fs::path& base_dir) {
  if (!problem.is_object()) config_error("problem", "expected an object");
  const Json obj_json = resolve_ref(require(problem, "objective"), base_dir, "problem.objective");
  const Json poly_json = resolve_ref(require(problem, "polytope"), base_dir, "problem.polytope");
  QuadraticObjective obj = objective_from_json(obj_json, "problem.objective");
  Polytope P = polytope_from_json(poly_json, "problem.polytope");
  if (obj.dim() != P.dim()) {
    config_error("problem", "objective dimension " + std::to_string(obj.dim()) +
                                " differs from polytope dimension " + std::to_string(P.dim()));
  }
  return Problem::make(std::move(P), std::move(obj));
}

ExperimentConfig parse_experiment_config(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) config_error("<root>", "expected an object");
  ExperimentConfig cfg;

  const Json& problem = require(j, "problem");
  if (!problem.is_object()) config_error("problem", "expected an object");
  cfg.problem = {{"objective", resolve_ref(require(problem, "objective"), base_dir, "problem.objective")},
                 {"polytope", resolve_ref(require(problem, "polytope"), base_dir, "problem.polytope")}};
  {
    const QuadraticObjective obj = objective_from_json(cfg.problem["objective"], "problem.objective");
    const Polytope P = polytope_from_json(cfg.problem["polytope"], "problem.polytope");
    if (obj.dim() != P.dim()) {
      config_error("problem", "objective dimension " + std::to_string(obj.dim()) +
                                  " differs from polytope dimension " + std::to_string(P.dim()));
    }
  }

  const Json& alg = require(j, "algorithm");
  if (!alg.is_string() || (alg != "standard" && alg != "away")) {
    config_error("algorithm", "expected \"standard\" or \"away\"");
  }
  cfg.algorithm = algorithm_from_string(alg.get<std::string>());
  cfg.noise = noise_from_json(require(j, "noise"), "noise");
  cfg.sampling = plan_from_json(require(j, "sampling"), "sampling");

  const Json& grid = require(j, "epsilon_grid");
  if (!grid.is_array() || grid.empty()) config_error("epsilon_grid", "expected a nonempty array");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::string p = "epsilon_grid[" + std::to_string(i) + "]";
    if (!grid[i].is_number() || !(grid[i].get<double>() > 0.0)) config_error(p, "must be a positive number");
    cfg.epsilon_grid.push_back(grid[i].get<double>());
    if (i > 0 && !(cfg.epsilon_grid[i] < cfg.epsilon_grid[i - 1])) config_error(p, "grid must be strictly decreasing");
  }

  const Json& reps = require(j, "replications");
  if (!reps.is_number_integer() || reps.get<long>() < 1) config_error("replications", "must be an integer >= 1");
  cfg.replications = reps.get<int>();

  const Json& seed = require(j, "master_seed");
  if (!seed.is_number_integer()) config_error("master_seed", "must be an integer");
  cfg.master_seed = seed.get<std::uint64_t>();

  const Json& max_iter = require(j, "max_iter");
  if (!max_iter.is_number_integer() || max_iter.get<long>() < 0) config_error("max_iter", "must be an integer >= 0");
  cfg.max_iter = max_iter.get<long>();

  const Json& out = require(j, "output_dir");
  if (!out.is_string() || out.get<std::string>().empty()) config_error("output_dir", "must be a nonempty string");
  cfg.output_dir = out.get<std::string>();
  if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;

  if (j.contains("eps_g")) {
    if (!j["eps_g"].is_number()) config_error("eps_g", "must be a number");
    cfg.eps_g = j["eps_g"].get<double>();
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 1) config_error("workers", "must be an integer >= 1");
    cfg.workers = j["workers"].get<int>();
  }
  if (j.contains("write_traces")) {
    if (!j["write_traces"].is_boolean()) config_error("write_traces", "must be a boolean");
    cfg.write_traces = j["write_traces"].get<bool>();
  }
  if (j.contains("record_wall_time")) {
    if (!j["record_wall_time"].is_boolean()) config_error("record_wall_time", "must be a boolean");
    cfg.record_wall_time = j["record_wall_time"].get<bool>();
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Runs

double ReplicationResult::good_event_rate() const {
  if (steps == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(good_events) / static_cast<double>(steps);
}

RunTrace run_replication(const ExperimentConfig& cfg, const Problem& problem, std::size_t eps_index,
                         int replication, double subgaussian_c, bool record_snapshots) {
  Rng rng(replication_seed(cfg.master_seed, eps_index, static_cast<std::uint64_t>(replication)));
  SamplePlan plan = cfg.sampling;
  if (is_subgaussian(plan.mode) && !plan.has("c")) plan.params["c"] = subgaussian_c;
  RunOptions opts;
  opts.eps_g = cfg.eps_g;
  opts.record_snapshots = record_snapshots;
  return run(cfg.algorithm, problem, cfg.noise, plan, cfg.epsilon_grid.at(eps_index), cfg.max_iter,
             rng, opts);
}

std::string format_csv(const std::vector<ReplicationResult>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
    os << fmt_double(r.epsilon) << ',' << r.replication << ',' << (r.T_eps ? *r.T_eps : -1) << ','
       << r.total_samples << ',' << fmt_double(r.good_event_rate()) << ','
       << fmt_double(r.final_gap) << ',' << wall << '\n';
  }
  return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files) {
  const Problem problem = load_problem(cfg.problem, fs::current_path());
  const int d = problem.polytope.dim();

  ExperimentResult result;
  ExperimentSummary& summary = result.summary;

  double c = 0.0;
  if (is_subgaussian(cfg.sampling.mode)) {
    c = cfg.sampling.has("c") ? cfg.sampling.get("c") : calibrate_for(cfg, d);
    summary.subgaussian_c = c;
  }

  const std::size_t n_eps = cfg.epsilon_grid.size();
  const std::size_t n_cells = n_eps * static_cast<std::size_t>(cfg.replications);
  std::vector<AnalysisConstants> consts;
  for (double eps : cfg.epsilon_grid) consts.push_back(compute_constants(problem, eps, cfg.eps_g));

  result.rows.resize(n_cells);
  std::vector<Json> traces(cfg.write_traces ? n_cells : 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t cell = next++; cell < n_cells; cell = next++) {
      try {
        const std::size_t ei = cell / cfg.replications;
        const int r = static_cast<int>(cell % cfg.replications);
        const auto t0 = std::chrono::steady_clock::now();
        const RunTrace trace = run_replication(cfg, problem, ei, r, c);
        const auto t1 = std::chrono::steady_clock::now();
        ReplicationResult& row = result.rows[cell];
        row.eps_index = ei;
        row.replication = r;
        row.epsilon = cfg.epsilon_grid[ei];
        row.T_eps = trace.T_eps;
        row.total_samples = trace.total_samples;
        row.n_per_iteration = trace.n_per_iteration;
        row.steps = trace.steps();
        row.good_events = trace.good_events();
        row.final_gap = trace.final_gap;
        for (const auto& rec : trace.records) {
          row.max_weight_sum_error = std::max(row.max_weight_sum_error, rec.weight_sum_error);
          row.min_weight = std::min(row.min_weight, rec.min_weight);
          row.max_reconstruction_error = std::max(row.max_reconstruction_error, rec.reconstruction_error);
        }
        row.wall_ms = cfg.record_wall_time
                          ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                          : 0.0;
        if (cfg.write_traces) traces[cell] = trace_to_json(trace, consts[ei]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_cells;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(n_cells)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  // Aggregate per epsilon.
  const std::size_t x0_id = initial_vertex(problem.polytope);
  const double gap0 = problem.gap(problem.polytope.vertex(x0_id));
  std::vector<std::pair<double, double>> t_points;
  std::vector<std::pair<double, double>> n_points;
  for (std::size_t ei = 0; ei < n_eps; ++ei) {
    EpsilonSummary es;
    es.epsilon = cfg.epsilon_grid[ei];
    const AnalysisConstants& ac = consts[ei];
    std::vector<double> Ts;
    double samples = 0.0;
    long steps = 0, good = 0;
    for (int r = 0; r < cfg.replications; ++r) {
      const ReplicationResult& row = result.rows[ei * cfg.replications + r];
      es.n_per_iteration = row.n_per_iteration;
      steps += row.steps;
      good += row.good_events;
      if (!row.T_eps) {
        ++es.censored;
        continue;
      }
      Ts.push_back(static_cast<double>(*row.T_eps));
      samples += static_cast<double>(row.total_samples);
    }
    std::sort(Ts.begin(), Ts.end());
    es.completed = static_cast<long>(Ts.size());
    if (!Ts.empty()) {
      const double n = static_cast<double>(Ts.size());
      es.mean_T = std::accumulate(Ts.begin(), Ts.end(), 0.0) / n;
      double ss = 0.0;
      for (double t : Ts) ss += (t - es.mean_T) * (t - es.mean_T);
      es.std_T = Ts.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      es.q50 = quantile(Ts, 0.50);
      es.q90 = quantile(Ts, 0.90);
      es.q99 = quantile(Ts, 0.99);
      es.mean_total_samples = samples / n;
      const double half_delta = ac.delta(cfg.algorithm) / 2.0;
      double mgf = 0.0;
      for (double t : Ts) mgf += std::exp(half_delta * t);
      es.emp_mgf = mgf / n;
    }
    es.good_event_trials = steps;
    es.good_event_rate = steps > 0 ? static_cast<double>(good) / static_cast<double>(steps) : 1.0;
    es.bound_mean_T = expected_stopping_bound(cfg.algorithm, gap0, 1, ac);
    es.mgf_bound = lyapunov(cfg.algorithm, gap0, 1, ac);
    const SamplePlan resolved = complete_plan(cfg.sampling, ac, cfg.noise, d);
    if (resolved.has("p_g")) es.p_g = resolved.get("p_g");
    for (auto& w : plan_warnings(resolved)) {
      if (std::find(summary.warnings.begin(), summary.warnings.end(), w) == summary.warnings.end()) {
        summary.warnings.push_back(w);
      }
    }
    if (es.completed > 0 && es.mean_T > es.bound_mean_T) ++summary.bound_violations;
    if (es.completed > 0 && es.mean_T > 0.0) t_points.emplace_back(1.0 / es.epsilon, es.mean_T);
    if (es.n_per_iteration > 0) n_points.emplace_back(1.0 / es.epsilon, static_cast<double>(es.n_per_iteration));
    summary.per_epsilon.push_back(es);
  }
  if (t_points.size() >= 3) {
    try {
      const LinearFit fit = fit_loglog_slope(t_points);
      summary.slope = fit.slope;
      summary.r2 = fit.r2;
    } catch (const Error&) {
    }
  }
  if (n_points.size() >= 3) {
    try {
      summary.sample_slope = fit_loglog_slope(n_points).slope;
    } catch (const Error&) {
    }
  }
  for (const auto& es : summary.per_epsilon) {
    if (es.censored > 0) {
      summary.warnings.push_back("epsilon " + fmt_double(es.epsilon) + ": " +
                                 std::to_string(es.censored) + " replications hit max_iter");
    }
  }

  result.csv = format_csv(result.rows);
  if (!write_files) return result;

  std::vector<fs::path> written;
  try {
    fs::create_directories(cfg.output_dir);
    const fs::path csv_path = cfg.output_dir / "results.csv";
    {
      std::ofstream out(csv_path, std::ios::binary);
      if (!out) throw Error(ErrorCode::ConfigError, "output_dir: cannot write " + csv_path.string());
      written.push_back(csv_path);
      out << result.csv;
    }
    const fs::path summary_path = cfg.output_dir / "summary.json";
    written.push_back(summary_path);
    write_json_file(summary_path, to_json(summary));
    if (cfg.write_traces) {
      const fs::path dir = cfg.output_dir / "traces";
      fs::create_directories(dir);
      for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const auto& row = result.rows[cell];
        const fs::path p =
            dir / ("eps" + std::to_string(row.eps_index) + "_rep" + std::to_string(row.replication) + ".json");
        written.push_back(p);
        write_json_file(p, traces[cell]);
      }
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
  return result;
}

Json to_json(const ExperimentSummary& s) {
  Json per = Json::array();
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  for (const auto& e : s.per_epsilon) {
    per.push_back({{"epsilon", e.epsilon},
                   {"n_per_iteration", e.n_per_iteration},
                   {"completed", e.completed},
                   {"censored", e.censored},
                   {"mean_T", e.mean_T},
                   {"std_T", e.std_T},
                   {"quantiles", {{"50", num(e.q50)}, {"90", num(e.q90)}, {"99", num(e.q99)}}},
                   {"mean_total_samples", e.mean_total_samples},
                   {"good_event_rate", e.good_event_rate},
                   {"good_event_trials", e.good_event_trials},
                   {"p_g", e.p_g},
                   {"bound_mean_T", num(e.bound_mean_T)},
                   {"emp_mgf", num(e.emp_mgf)},
                   {"mgf_bound", num(e.mgf_bound)}});
  }
  return {{"per_epsilon", per},
          {"slope", opt(s.slope)},
          {"r2", opt(s.r2)},
          {"sample_slope", opt(s.sample_slope)},
          {"bound_violations", s.bound_violations},
          {"subgaussian_c", opt(s.subgaussian_c)},
          {"warnings", s.warnings}};
}

// ---------------------------------------------------------------------------
// Fits

LinearFit fit_linear(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw Error(ErrorCode::DegenerateFit, "need at least two points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateFit, "all x values are equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A constant response is fitted exactly.
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

LinearFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw Error(ErrorCode::DegenerateFit, "need at least three points");
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw Error(ErrorCode::InvalidArgument, "log-log fit needs x, y > 0");
    logs.emplace_back(std::log(x), std::log(y));
  }
  return fit_linear(logs);
}

// ---------------------------------------------------------------------------
// Concentration

ConcentrationTable concentration_experiment(const QuadraticObjective& obj, const Polytope& P,
                                            const NoiseModel& noise,
                                            const std::vector<std::int64_t>& n_grid,
                                            const std::vector<double>& s_grid, int trials, Rng& rng,
                                            std::optional<double> c) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  const int d = obj.dim();
  Vector x = Vector::Zero(d);
  for (const Vector& v : P.vertices()) x += v;
  x /= static_cast<double>(P.num_vertices());
  const Vector grad = obj.gradient(x);
  const double V_g = noise.V_g(d);

  ConcentrationTable table;
  for (double s : s_grid) {
    for (std::int64_t n : n_grid) {
      ConcentrationCell cell;
      cell.n = n;
      cell.s = s;
      cell.trials = trials;
      for (int t = 0; t < trials; ++t) {
        const Vector g = grad + sample_noise_mean_by_draws(noise, d, n, rng);
        if ((g - grad).norm() > s) ++cell.exceed;
      }
      cell.freq = static_cast<double>(cell.exceed) / trials;
      cell.std_err = std::sqrt(cell.freq * (1.0 - cell.freq) / trials);
      cell.chebyshev_bound = chebyshev_tail_bound(V_g, n, s);
      cell.chebyshev_violation = cell.freq > cell.chebyshev_bound + 3.0 * cell.std_err;
      if (c) cell.subgaussian_bound = std::min(1.0, 2.0 * d * std::exp(-static_cast<double>(n) * *c * s * s));
      if (cell.chebyshev_violation) ++table.violations;
      table.cells.push_back(cell);
    }
  }

  for (double s : s_grid) {
    ConcentrationFit fit;
    fit.s = s;
    std::vector<std::pair<double, double>> pts;
    for (const auto& cell : table.cells) {
      if (cell.s == s && cell.exceed > 0) pts.emplace_back(static_cast<double>(cell.n), std::log(cell.freq));
    }
    fit.points = static_cast<int>(pts.size());
    if (pts.size() >= 3) {
      try {
        const LinearFit lf = fit_linear(pts);
        fit.slope = lf.slope;
        fit.r2 = lf.r2;
        fit.c_hat = -lf.slope / (s * s);
      } catch (const Error&) {
      }
    }
    table.fits.push_back(fit);
  }
  return table;
}

std::string format_concentration_csv(const ConcentrationTable& table) {
  std::ostringstream os;
  os << "n,s,trials,exceed,freq,std_err,chebyshev_bound,chebyshev_violation,subgaussian_bound\n";
  for (const auto& c : table.cells) {
    os << c.n << ',' << fmt_double(c.s) << ',' << c.trials << ',' << c.exceed << ','
       << fmt_double(c.freq) << ',' << fmt_double(c.std_err) << ',' << fmt_double(c.chebyshev_bound)
       << ',' << (c.chebyshev_violation ? 1 : 0) << ','
       << (c.subgaussian_bound ? fmt_double(*c.subgaussian_bound) : "") << '\n';
  }
  return os.str();
}

Json to_json(const ConcentrationTable& table) {
  Json fits = Json::array();
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  for (const auto& f : table.fits) {
    fits.push_back({{"s", f.s}, {"points", f.points}, {"slope", opt(f.slope)}, {"r2", opt(f.r2)}, {"c_hat", opt(f.c_hat)}});
  }
  return {{"violations", table.violations}, {"cells", table.cells.size()}, {"fits", fits}};
}

}  // namespace sfw
