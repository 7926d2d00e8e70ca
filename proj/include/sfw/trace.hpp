#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfw/geometry.hpp"

namespace sfw {

enum class Algorithm { standard, away };

// `none` marks the terminal record (the state at T_eps or at max_iter),
// where no step is taken.
enum class StepType { fw, away, fw_max, away_drop, none };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);
std::string to_string(StepType t);
StepType step_type_from_string(const std::string& name);

/// State at x_k and the step taken from it.
struct IterationRecord {
  long k = 0;
  StepType step_type = StepType::none;
  double gamma = 0.0;
  double gamma_max = 0.0;
  std::int64_t n_samples = 0;
  double grad_error = 0.0;  // ||g_k - grad f(x_k)||
  bool good_event = false;
  double f_gap = 0.0;       // f(x_k) - f*
  std::size_t active_size = 0;
  double lyapunov = 0.0;
  // Active-set integrity at x_k.
  double weight_sum_error = 0.0;
  double min_weight = 0.0;
  double reconstruction_error = 0.0;
};

struct ActiveSetSnapshot {
  long k = 0;
  Vector point;
  std::map<std::size_t, double> weights;
};

struct RunTrace {
  Algorithm algorithm = Algorithm::standard;
  double epsilon = 0.0;
  std::vector<IterationRecord> records;
  std::optional<long> T_eps;
  std::int64_t total_samples = 0;
  double final_gap = 0.0;
  std::int64_t n_per_iteration = 0;
  // Filled only when requested; one entry per record.
  std::vector<ActiveSetSnapshot> snapshots;

  long good_events() const;
  long steps() const;  // records with a step (excludes the terminal one)
};

}  // namespace sfw
