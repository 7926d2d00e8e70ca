#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "sfw/diagnostics.hpp"
#include "sfw/error.hpp"
#include "sfw/geometry.hpp"
#include "sfw/harness.hpp"
#include "sfw/json_io.hpp"

namespace fs = std::filesystem;
using namespace sfw;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;

fs::path base_of(const fs::path& file) {
  const fs::path parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

int cmd_run(const std::string& config_path, std::optional<int> workers) {
  const fs::path path(config_path);
  ExperimentConfig cfg = parse_experiment_config(read_json_file(path), base_of(path));
  if (workers) cfg.workers = *workers;
  const ExperimentResult result = run_experiment(cfg);
  for (const auto& w : result.summary.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << to_json(result.summary).dump(2) << "\n";
  std::cerr << "wrote " << (cfg.output_dir / "results.csv").string() << "\n";
  return 0;
}

int cmd_verify(const std::string& trace_path) {
  AnalysisConstants consts;
  const RunTrace trace = trace_from_json(read_json_file(trace_path), &consts);
  const VerifyReport report = verify_trace(trace, consts, trace.algorithm);
  std::cout << to_json(report).dump(2) << "\n";
  return report.ok() ? 0 : kExitCheck;
}

int cmd_lmo_check(const std::string& polytope_path, int trials, std::uint64_t seed, double tol) {
  const Polytope P = polytope_from_json(read_json_file(polytope_path));
  Rng rng(seed);
  std::normal_distribution<double> normal;
  long mismatches = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vector g(P.dim());
    for (int j = 0; j < P.dim(); ++j) g(j) = normal(rng);
    const double by_vertices = g.dot(lmo(P, g).vertex);
    const double by_simplex = g.dot(lmo_simplex_method(P, g));
    const double diff = std::abs(by_vertices - by_simplex);
    worst = std::max(worst, diff);
    if (diff > tol) ++mismatches;
  }
  Json out = {{"vertices", P.num_vertices()},
              {"trials", trials},
              {"mismatches", mismatches},
              {"max_abs_difference", worst}};
  std::cout << out.dump(2) << "\n";
  return mismatches == 0 ? 0 : kExitCheck;
}

// {"problem": {...}, "noise": {...}, "n_grid": [...], "s_grid": [...],
//  "trials": int, "seed": int, "c": real (optional), "output_dir": path (optional)}
int cmd_concentration(const std::string& config_path) {
  const fs::path path(config_path);
  const fs::path base = base_of(path);
  const Json j = read_json_file(path);
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "<root>: expected an object");
  auto need = [&](const char* key) -> const Json& {
    if (!j.contains(key)) throw Error(ErrorCode::ConfigError, std::string(key) + ": missing");
    return j.at(key);
  };
  const Problem problem = load_problem(need("problem"), base);
  const NoiseModel noise = noise_from_json(need("noise"));

  std::vector<std::int64_t> n_grid;
  std::vector<double> s_grid;
  try {
    n_grid = need("n_grid").get<std::vector<std::int64_t>>();
    s_grid = need("s_grid").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("n_grid/s_grid: ") + e.what());
  }
  for (auto n : n_grid)
    if (n < 1) throw Error(ErrorCode::ConfigError, "n_grid: entries must be >= 1");
  for (double s : s_grid)
    if (!(s > 0.0)) throw Error(ErrorCode::ConfigError, "s_grid: entries must be positive");
  const Json& trials_json = need("trials");
  if (!trials_json.is_number_integer() || trials_json.get<long>() < 1000) {
    throw Error(ErrorCode::ConfigError, "trials: must be an integer >= 1000");
  }
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  std::optional<double> c;
  if (j.contains("c") && !j["c"].is_null()) c = j["c"].get<double>();

  Rng rng(seed);
  const ConcentrationTable table = concentration_experiment(
      problem.objective, problem.polytope, noise, n_grid, s_grid, trials_json.get<int>(), rng, c);
  if (j.contains("output_dir")) {
    fs::path out = j["output_dir"].get<std::string>();
    if (out.is_relative()) out = base / out;
    fs::create_directories(out);
    std::ofstream(out / "concentration.csv") << format_concentration_csv(table);
    write_json_file(out / "concentration.json", to_json(table));
  }
  std::cout << to_json(table).dump(2) << "\n";
  return 0;
}

std::string cell(const Json& v, const char* fmt) {
  if (v.is_null()) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v.get<double>());
  return buf;
}

int cmd_report(const std::string& dir) {
  const fs::path root(dir);
  const Json summary = read_json_file(root / "summary.json");
  std::printf("%-10s %12s %12s %12s %14s %10s %10s\n", "epsilon", "mean_T", "bound_T", "q90",
              "n/iter", "good_rate", "censored");
  for (const Json& e : summary.at("per_epsilon")) {
    std::printf("%-10s %12s %12s %12s %14s %10s %10s\n", cell(e["epsilon"], "%.4g").c_str(),
                cell(e["mean_T"], "%.1f").c_str(), cell(e["bound_mean_T"], "%.4g").c_str(),
                cell(e["quantiles"]["90"], "%.0f").c_str(), cell(e["n_per_iteration"], "%.0f").c_str(),
                cell(e["good_event_rate"], "%.4f").c_str(), cell(e["censored"], "%.0f").c_str());
  }
  std::printf("slope %s  r2 %s  bound_violations %d\n", cell(summary["slope"], "%.3f").c_str(),
              cell(summary["r2"], "%.3f").c_str(), summary.value("bound_violations", 0));

  long flagged = 0;
  const fs::path traces = root / "traces";
  if (fs::is_directory(traces)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(traces)) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      AnalysisConstants consts;
      const RunTrace trace = trace_from_json(read_json_file(f), &consts);
      const VerifyReport r = verify_trace(trace, consts, trace.algorithm);
      if (!r.ok()) {
        ++flagged;
        std::printf("%s: %ld violations\n", f.filename().string().c_str(), r.violations());
      }
    }
    std::printf("traces checked %zu, with violations %ld\n", files.size(), flagged);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Frank-Wolfe experiment harness"};
  app.require_subcommand(1);

  std::string config, trace, polytope, dir;
  std::optional<int> workers;
  int trials = 100;
  std::uint64_t seed = 1;
  double tol = 1e-8;

  auto* run = app.add_subcommand("run", "run a replicated experiment");
  run->add_option("config", config, "experiment config JSON")->required();
  run->add_option("--workers", workers, "override worker count");

  auto* verify = app.add_subcommand("verify", "check a trace against the per-iteration bounds");
  verify->add_option("trace", trace, "trace JSON")->required();

  auto* lmo_check = app.add_subcommand("lmo-check", "compare simplex-method and vertex-scan LMOs");
  lmo_check->add_option("polytope", polytope, "polytope JSON")->required();
  lmo_check->add_option("--trials", trials, "random directions")->check(CLI::PositiveNumber);
  lmo_check->add_option("--seed", seed, "RNG seed");
  lmo_check->add_option("--tol", tol, "objective tolerance");

  auto* conc = app.add_subcommand("concentration", "empirical exceedance over an (n, s) grid");
  conc->add_option("config", config, "concentration config JSON")->required();

  auto* report = app.add_subcommand("report", "summarize an experiment output directory");
  report->add_option("dir", dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, workers);
    if (*verify) return cmd_verify(trace);
    if (*lmo_check) return cmd_lmo_check(polytope, trials, seed, tol);
    if (*conc) return cmd_concentration(config);
    if (*report) return cmd_report(dir);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ConfigError:
      case ErrorCode::MissingParam:
      case ErrorCode::MalformedTrace:
      case ErrorCode::DimensionMismatch:
      case ErrorCode::EpsGOutOfRange:
        return kExitConfig;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
