#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "sfw/frank_wolfe.hpp"
#include "sfw/geometry.hpp"
#include "sfw/objectives.hpp"
#include "sfw/stochastic_oracle.hpp"
#include "sfw/trace.hpp"

namespace sfw {

/// Constants of the convergence analysis for one (problem, epsilon, eps_g).
///
///   beta1   = min{eps / (8 L D^2), 1/4}
///   beta2   = min{(1/2 - 2 eps_g D) / (1 + 2 eps_g D),
///                 (omega/N)^2 mu (1/2 - 2 eps_g D) / (8 L D^2 (2 eps_g D + 1)^2)}
///   nu      = 1 / (1 + beta2 eps / 2)
///   delta_S = beta1 eps / 2,  delta_A = (beta2 eps / 2) / (2 + beta2 eps)
///
/// pg_standard / pg_away are the smallest good-event probabilities for which
/// the Lyapunov ratio bound e^{-delta} holds; the one_minus_* fields carry
/// 1 - p_g computed without cancellation.
struct AnalysisConstants {
  double epsilon = 0.0;
  double eps_g = 0.0;
  double D = 0.0;
  double L = 0.0;
  double mu = 0.0;
  double M = 1.0;
  std::size_t N = 0;
  double omega = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double nu = 0.0;
  double one_minus_nu = 0.0;
  double delta_S = 0.0;
  double delta_A = 0.0;
  double pg_standard = 0.0;
  double pg_away = 0.0;
  double one_minus_pg_standard = 0.0;
  double one_minus_pg_away = 0.0;

  double delta(Algorithm a) const { return a == Algorithm::standard ? delta_S : delta_A; }
};

inline double default_eps_g(double D) { return 1.0 / (8.0 * D); }

/// Throws EpsGOutOfRange unless 0 < eps_g < 1/(4D).
AnalysisConstants compute_constants(const QuadraticObjective& obj, const GeometryConstants& geo,
                                    double M, double epsilon, double eps_g);
AnalysisConstants compute_constants(const Problem& problem, double epsilon,
                                    std::optional<double> eps_g = std::nullopt);

double log_lyapunov(Algorithm kind, double f_gap, std::size_t active_size,
                    const AnalysisConstants& c);
double lyapunov(Algorithm kind, double f_gap, std::size_t active_size, const AnalysisConstants& c);

/// Upper bound on E[T_eps] from the supermartingale argument:
/// standard 2 (f(x0) - f*) max{8 L D^2 / eps^2, 4 / eps},
/// away     log Phi_0 (2 + 4 / (beta2 eps)).
double expected_stopping_bound(Algorithm kind, double initial_gap, std::size_t initial_active_size,
                               const AnalysisConstants& c);

/// Fills every planner param the plan's mode needs and the user left out.
/// p_g defaults to the analysis value for the mode's algorithm.
SamplePlan complete_plan(const SamplePlan& plan, const AnalysisConstants& c,
                         const NoiseModel& noise, int d);

struct CheckTally {
  long checked = 0;
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // bound - observed

  void add(double margin, double tol);
};

struct VerifyReport {
  Algorithm kind = Algorithm::standard;
  CheckTally decrease;     // standard: f_{k+1} - f_k <= -beta1 eps
  CheckTally contraction;  // away, non-drop: gap_{k+1} <= (1 - beta2) gap_k
  CheckTally drop;         // away, drop: gap_{k+1} <= gap_k
  std::vector<long> flagged;
  long lyapunov_count = 0;
  double lyapunov_mean_ratio = 0.0;
  double lyapunov_bound = 0.0;  // e^{-delta}

  long violations() const { return decrease.violations + contraction.violations + drop.violations; }
  bool ok() const { return violations() == 0; }
};

/// Checks every good-event iteration before T_eps against the per-iteration
/// decrease inequalities. Tolerance is 1e-9 max(1, |f_gap_k|).
VerifyReport verify_trace(const RunTrace& trace, const AnalysisConstants& c, Algorithm kind);

}  // namespace sfw
