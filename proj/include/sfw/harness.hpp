#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfw/frank_wolfe.hpp"
#include "sfw/json_io.hpp"
#include "sfw/stochastic_oracle.hpp"

namespace sfw {

struct ExperimentConfig {
  Json problem;  // {"objective": {...} | "path", "polytope": {...} | "path"}
  Algorithm algorithm = Algorithm::standard;
  NoiseModel noise;
  SamplePlan sampling;
  std::vector<double> epsilon_grid;
  int replications = 1;
  std::uint64_t master_seed = 0;
  long max_iter = 100000;
  std::filesystem::path output_dir;
  std::optional<double> eps_g;
  int workers = 1;
  bool write_traces = false;
  bool record_wall_time = false;  // off keeps results.csv byte-reproducible
};

/// Validates and parses a config object. Relative paths (problem files,
/// output_dir) resolve against base_dir. Throws ConfigError with a field path.
ExperimentConfig parse_experiment_config(const Json& j, const std::filesystem::path& base_dir);

/// Builds objective + polytope from the config's "problem" block.
Problem load_problem(const Json& problem, const std::filesystem::path& base_dir);

struct ReplicationResult {
  std::size_t eps_index = 0;
  int replication = 0;
  double epsilon = 0.0;
  std::optional<long> T_eps;
  std::int64_t total_samples = 0;
  std::int64_t n_per_iteration = 0;
  long steps = 0;
  long good_events = 0;
  double final_gap = 0.0;
  double wall_ms = 0.0;
  // worst active-set integrity over the run's records
  double max_weight_sum_error = 0.0;
  double min_weight = 1.0;
  double max_reconstruction_error = 0.0;
  double good_event_rate() const;
};

struct EpsilonSummary {
  double epsilon = 0.0;
  std::int64_t n_per_iteration = 0;
  long completed = 0;  // replications that reached epsilon
  long censored = 0;   // max_iter exhausted; excluded from T statistics
  double mean_T = 0.0;
  double std_T = 0.0;
  double q50 = 0.0, q90 = 0.0, q99 = 0.0;
  double mean_total_samples = 0.0;
  double good_event_rate = 0.0;
  long good_event_trials = 0;
  double bound_mean_T = 0.0;
  double emp_mgf = 0.0;  // mean exp((delta/2) T)
  double mgf_bound = 0.0;  // Phi_0, bounds E[exp(delta T)]
  double p_g = 0.0;        // planner target when a probabilistic plan is used
};

struct ExperimentSummary {
  std::vector<EpsilonSummary> per_epsilon;
  std::optional<double> slope;         // d log mean_T / d log(1/eps)
  std::optional<double> r2;
  std::optional<double> sample_slope;  // d log n / d log(1/eps)
  long bound_violations = 0;
  std::optional<double> subgaussian_c;
  std::vector<std::string> warnings;
};

struct ExperimentResult {
  std::vector<ReplicationResult> rows;  // sorted by (eps_index, replication)
  ExperimentSummary summary;
  std::string csv;
};

inline constexpr const char* kCsvHeader =
    "epsilon,replication,T_eps,total_samples,good_event_rate,final_gap,wall_ms";

/// Runs every (epsilon, replication) cell and aggregates. Writes results.csv
/// and summary.json (and traces/ when enabled) under output_dir unless
/// write_files is false. Partial outputs are removed on failure.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true);

/// The run behind one CSV row, reproduced standalone.
RunTrace run_replication(const ExperimentConfig& config, const Problem& problem,
                         std::size_t eps_index, int replication, double subgaussian_c = 0.0,
                         bool record_snapshots = false);

std::string format_csv(const std::vector<ReplicationResult>& rows);
Json to_json(const ExperimentSummary& s);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = a + b x. Throws DegenerateFit when all x match.
LinearFit fit_linear(const std::vector<std::pair<double, double>>& points);

/// Least-squares slope of log y on log x; needs >= 3 points with x, y > 0.
LinearFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

struct ConcentrationCell {
  std::int64_t n = 0;
  double s = 0.0;
  int trials = 0;
  int exceed = 0;
  double freq = 0.0;
  double std_err = 0.0;
  double chebyshev_bound = 0.0;
  bool chebyshev_violation = false;
  std::optional<double> subgaussian_bound;  // 2d exp(-n c s^2) when c is known
};

struct ConcentrationFit {
  double s = 0.0;
  int points = 0;
  std::optional<double> slope;  // d log freq / d n
  std::optional<double> r2;
  std::optional<double> c_hat;  // -slope / s^2
};

struct ConcentrationTable {
  std::vector<ConcentrationCell> cells;
  std::vector<ConcentrationFit> fits;
  long violations = 0;
};

/// Empirical P(||g(x) - grad f(x)|| > s) over an (n, s) grid, with g summed
/// draw by draw. Chebyshev violations are flagged beyond 3 std errors.
ConcentrationTable concentration_experiment(const QuadraticObjective& obj, const Polytope& P,
                                            const NoiseModel& noise,
                                            const std::vector<std::int64_t>& n_grid,
                                            const std::vector<double>& s_grid, int trials, Rng& rng,
                                            std::optional<double> c = std::nullopt);

std::string format_concentration_csv(const ConcentrationTable& table);
Json to_json(const ConcentrationTable& table);

}  // namespace sfw
