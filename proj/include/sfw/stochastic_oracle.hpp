#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfw/geometry.hpp"
#include "sfw/objectives.hpp"
#include "sfw/rng.hpp"

namespace sfw {

/// Additive, state-independent gradient noise with i.i.d. coordinates.
struct NoiseModel {
  enum class Kind { gaussian, student_t, rademacher };

  Kind kind = Kind::gaussian;
  double scale = 0.0;  // sigma for gaussian
  int dof = 0;         // student_t only

  static NoiseModel gaussian(double sigma);
  static NoiseModel student_t(int dof, double scale);
  static NoiseModel rademacher(double scale);

  /// E||G - grad f||^2 in dimension d.
  double V_g(int d) const;
  /// Sub-Gaussian parameter rho (each coordinate has parameter rho / sqrt(d));
  /// empty for the heavy-tailed student_t family.
  std::optional<double> rho(int d) const;
  bool is_zero() const { return scale == 0.0; }
};

std::string to_string(NoiseModel::Kind kind);

/// grad f(x) + eta, one draw.
Vector draw_gradient(const QuadraticObjective& obj, const Vector& x, const NoiseModel& noise,
                     Rng& rng);

/// Mean of n noise vectors. Gaussian and Rademacher means are sampled from
/// their exact distributions (N(0, sigma^2/n), scaled centered binomial), so
/// the cost does not grow with n; student_t is summed draw by draw.
Vector sample_noise_mean(const NoiseModel& noise, int d, std::int64_t n, Rng& rng);

/// Same distribution as sample_noise_mean, always summing n single draws.
Vector sample_noise_mean_by_draws(const NoiseModel& noise, int d, std::int64_t n, Rng& rng);

/// g(x) = n^{-1} sum_i G_i(x). n = 1 reproduces draw_gradient exactly.
Vector estimate_gradient(const QuadraticObjective& obj, const Vector& x, const NoiseModel& noise,
                         std::int64_t n, Rng& rng);

/// min(1, V_g / (n s^2)). Throws NonpositiveS for s <= 0.
double chebyshev_tail_bound(double V_g, std::int64_t n, double s);

enum class SampleMode {
  exact,
  fixed,
  bounded_variance_standard,
  bounded_variance_away,
  subgaussian_standard,
  subgaussian_away,
};

std::string to_string(SampleMode mode);
SampleMode sample_mode_from_string(const std::string& name);

/// Per-iteration sample-size rule. Named params used by the formulas:
///   bounded_variance_standard: V_g, D, epsilon, p_g
///   bounded_variance_away:     V_g, D, epsilon, p_g, eps_g, N, omega
///   subgaussian_standard:      D, epsilon, c, M, d, beta1
///   subgaussian_away:          epsilon, c, M, d, beta2, and c1 (or
///                              omega, N, mu, eps_g, D to derive it)
struct SamplePlan {
  SampleMode mode = SampleMode::exact;
  std::int64_t fixed_n = 0;
  std::map<std::string, double> params;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  double get(const std::string& key) const;
};

/// Resolved sample size: 0 for exact mode, fixed_n for fixed mode, otherwise
/// the ceiling of the planner formula (at least 1).
std::int64_t plan_sample_size(const SamplePlan& plan);

/// c1 = (omega/N)^2 * mu / (2 (2 eps_g D + 1)^2), so that s^2 = c1 * epsilon.
double away_threshold_c1(double omega, double N, double mu, double eps_g, double D);

/// Non-fatal caveats about a plan (e.g. the sub-Gaussian away bound leans on
/// a small-epsilon expansion).
std::vector<std::string> plan_warnings(const SamplePlan& plan);

/// Largest c such that 2d exp(-n c s^2) dominates every observed tail
/// frequency on the (n, s) grid. Cells with zero exceedances impose nothing.
double calibrate_subgaussian_c(const NoiseModel& noise, int d, const std::vector<std::int64_t>& n_grid,
                               const std::vector<double>& s_grid, int trials, Rng& rng);

}  // namespace sfw
