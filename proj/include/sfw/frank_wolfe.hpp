#pragma once

#include <cstddef>
#include <map>
#include <optional>

#include "sfw/geometry.hpp"
#include "sfw/objectives.hpp"
#include "sfw/rng.hpp"
#include "sfw/stochastic_oracle.hpp"
#include "sfw/trace.hpp"

namespace sfw {

inline constexpr double kDropTol = 1e-12;
inline constexpr double kDegenerateDirection = 1e-14;

/// Convex-combination representation x = sum_v alpha_v v of the iterate.
///
/// Weights below kDropTol are purged and the rest renormalized after each
/// update. The point itself is advanced by x + gamma d, independently of the
/// weights, so reconstruction_error() measures real drift.
class ActiveSet {
 public:
  static ActiveSet single(const Polytope& P, std::size_t vertex_id);

  const std::map<std::size_t, double>& weights() const { return weights_; }
  const Vector& point() const { return point_; }
  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t id) const;

  double weight_sum() const;
  double min_weight() const;
  double reconstruction_error(const Polytope& P) const;

  /// x <- x + gamma (s - x); gamma == 1 collapses the set to {s}.
  void apply_fw(const Polytope& P, std::size_t s, double gamma);
  /// x <- x + gamma (x - v); drop removes v (the gamma == gamma_max case).
  void apply_away(const Polytope& P, std::size_t v, double gamma, bool drop);

 private:
  void purge();

  std::map<std::size_t, double> weights_;
  Vector point_;
};

struct StandardStep {
  Vector x_next;
  double gamma = 0.0;
  std::size_t s_id = 0;
  StepType type = StepType::fw;
};

/// One Frank-Wolfe step with the fixed rule gamma = min{1, eps / (2 L D^2)}.
StandardStep standard_fw_step(const Vector& x, const Vector& g, const Polytope& P, double epsilon,
                              double L, double D);

struct AwayStep {
  ActiveSet next;
  StepType type = StepType::fw;
  double gamma = 0.0;
  double gamma_max = 0.0;
  std::size_t s_id = 0;
  std::size_t v_id = 0;
  double pair_gap = 0.0;  // -g^T (s - v) >= 0
};

/// One away-step Frank-Wolfe iteration with
/// gamma = min{gamma_max, -g^T d / (L ||d||^2)}.
/// Throws DegenerateDirection when the chosen direction has norm <= 1e-14.
AwayStep away_fw_step(const ActiveSet& active, const Vector& g, const Polytope& P, double L);

/// Immutable bundle shared by every run on one synthetic problem.
struct Problem {
  Polytope polytope;
  QuadraticObjective objective;
  GeometryConstants geometry;
  ReferenceSolution reference;
  double M = 1.0;

  static Problem make(Polytope P, QuadraticObjective obj);
  double gap(const Vector& x) const { return objective.value(x) - reference.f_star; }
};

/// Vertex minimizing 1^T x, the common starting point of both algorithms.
std::size_t initial_vertex(const Polytope& P);

struct RunOptions {
  std::optional<double> eps_g;  // default 1 / (8 D)
  bool record_snapshots = false;
};

/// Runs Algorithm `algorithm` until f(x_k) - f* <= epsilon or max_iter steps.
/// Missing planner params are filled in from the problem, the analysis
/// constants and the noise model (see complete_plan).
RunTrace run(Algorithm algorithm, const Problem& problem, const NoiseModel& noise,
             const SamplePlan& plan, double epsilon, long max_iter, Rng& rng,
             const RunOptions& options = {});

}  // namespace sfw
