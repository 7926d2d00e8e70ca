#include "sfw/frank_wolfe.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfw/diagnostics.hpp"
#include "sfw/error.hpp"

namespace sfw {

// ---------------------------------------------------------------------------
// Trace helpers

long RunTrace::good_events() const {
  return static_cast<long>(std::count_if(records.begin(), records.end(), [](const IterationRecord& r) {
    return r.step_type != StepType::none && r.good_event;
  }));
}

long RunTrace::steps() const {
  return static_cast<long>(std::count_if(records.begin(), records.end(), [](const IterationRecord& r) {
    return r.step_type != StepType::none;
  }));
}

std::string to_string(Algorithm a) { return a == Algorithm::standard ? "standard" : "away"; }

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "standard") return Algorithm::standard;
  if (name == "away") return Algorithm::away;
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + name + "'");
}

std::string to_string(StepType t) {
  switch (t) {
    case StepType::fw: return "fw";
    case StepType::away: return "away";
    case StepType::fw_max: return "fw_max";
    case StepType::away_drop: return "away_drop";
    case StepType::none: return "none";
  }
  return "?";
}

StepType step_type_from_string(const std::string& name) {
  for (StepType t : {StepType::fw, StepType::away, StepType::fw_max, StepType::away_drop, StepType::none}) {
    if (to_string(t) == name) return t;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown step type '" + name + "'");
}

// ---------------------------------------------------------------------------
// ActiveSet

ActiveSet ActiveSet::single(const Polytope& P, std::size_t vertex_id) {
  ActiveSet a;
  a.weights_[vertex_id] = 1.0;
  a.point_ = P.vertex(vertex_id);
  return a;
}

double ActiveSet::weight(std::size_t id) const {
  const auto it = weights_.find(id);
  return it == weights_.end() ? 0.0 : it->second;
}

double ActiveSet::weight_sum() const {
  double s = 0.0;
  for (const auto& [id, w] : weights_) s += w;
  return s;
}

double ActiveSet::min_weight() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [id, w] : weights_) m = std::min(m, w);
  return m;
}

double ActiveSet::reconstruction_error(const Polytope& P) const {
  Vector sum = Vector::Zero(point_.size());
  for (const auto& [id, w] : weights_) sum += w * P.vertex(id);
  return (sum - point_).norm();
}

void ActiveSet::apply_fw(const Polytope& P, std::size_t s, double gamma) {
  const Vector& vs = P.vertex(s);
  if (gamma >= 1.0) {
    weights_.clear();
    weights_[s] = 1.0;
    point_ = vs;
    return;
  }
  for (auto& [id, w] : weights_) w *= (1.0 - gamma);
  weights_[s] += gamma;
  point_ += gamma * (vs - point_);
  purge();
  if (weights_.size() == 1) point_ = P.vertex(weights_.begin()->first);
}

void ActiveSet::apply_away(const Polytope& P, std::size_t v, double gamma, bool drop) {
  const Vector& vv = P.vertex(v);
  for (auto& [id, w] : weights_) w *= (1.0 + gamma);
  weights_[v] -= gamma;
  if (drop) weights_.erase(v);
  point_ += gamma * (point_ - vv);
  purge();
  if (weights_.size() == 1) point_ = P.vertex(weights_.begin()->first);
}

void ActiveSet::purge() {
  std::erase_if(weights_, [](const auto& kv) { return kv.second <= kDropTol; });
  const double total = weight_sum();
  for (auto& [id, w] : weights_) w /= total;
}

// ---------------------------------------------------------------------------
// Steps

StandardStep standard_fw_step(const Vector& x, const Vector& g, const Polytope& P, double epsilon,
                              double L, double D) {
  const LmoResult s = lmo(P, g);
  StandardStep out;
  out.s_id = s.vertex_id;
  out.gamma = std::min(1.0, epsilon / (2.0 * L * D * D));
  out.type = out.gamma >= 1.0 ? StepType::fw_max : StepType::fw;
  out.x_next = x + out.gamma * (s.vertex - x);
  return out;
}

namespace {

// argmax_{u in U} g^T u, smallest id on ties.
std::size_t away_vertex(const ActiveSet& active, const Vector& g, const Polytope& P) {
  std::size_t best = active.weights().begin()->first;
  double best_val = -std::numeric_limits<double>::infinity();
  for (const auto& [id, w] : active.weights()) {
    const double val = g.dot(P.vertex(id));
    if (val > best_val) {
      best_val = val;
      best = id;
    }
  }
  return best;
}

}  // namespace

AwayStep away_fw_step(const ActiveSet& active, const Vector& g, const Polytope& P, double L) {
  if (active.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty active set");
  const Vector& x = active.point();
  const LmoResult s = lmo(P, g);
  const std::size_t v = away_vertex(active, g, P);

  const Vector d_fw = s.vertex - x;
  const Vector d_away = x - P.vertex(v);

  AwayStep out{active, StepType::fw, 0.0, 1.0, s.vertex_id, v, -g.dot(s.vertex - P.vertex(v))};
  // With a single active vertex x == v exactly, so d_away = 0 and the FW
  // branch wins the comparison; alpha_v = 1 never reaches the away branch.
  const bool take_fw = active.size() == 1 || -g.dot(d_fw) >= -g.dot(d_away);
  const Vector& d = take_fw ? d_fw : d_away;
  if (!take_fw) {
    const double alpha_v = active.weight(v);
    if (!(alpha_v < 1.0)) throw std::logic_error("away step chosen with alpha_v = 1");
    out.gamma_max = alpha_v / (1.0 - alpha_v);
  }

  const double dd = d.squaredNorm();
  if (std::sqrt(dd) <= kDegenerateDirection) {
    throw Error(ErrorCode::DegenerateDirection, "search direction has zero length");
  }
  const double step = std::max(0.0, -g.dot(d) / (L * dd));
  const bool at_max = step >= out.gamma_max;
  out.gamma = at_max ? out.gamma_max : step;

  if (take_fw) {
    out.type = at_max ? StepType::fw_max : StepType::fw;
    out.next.apply_fw(P, s.vertex_id, out.gamma);
  } else {
    out.type = at_max ? StepType::away_drop : StepType::away;
    out.next.apply_away(P, v, out.gamma, at_max);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Problem and run loop

Problem Problem::make(Polytope P, QuadraticObjective obj) {
  if (obj.dim() != P.dim()) throw Error(ErrorCode::DimensionMismatch, "objective vs polytope");
  GeometryConstants geo = geometry_constants(P);
  ReferenceSolution ref = reference_solution(obj, P);
  const double M = objective_bound_M(obj, P);
  return Problem{std::move(P), std::move(obj), geo, std::move(ref), M};
}

std::size_t initial_vertex(const Polytope& P) {
  return lmo(P, Vector::Ones(P.dim())).vertex_id;
}

RunTrace run(Algorithm algorithm, const Problem& problem, const NoiseModel& noise,
             const SamplePlan& plan, double epsilon, long max_iter, Rng& rng,
             const RunOptions& options) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const Polytope& P = problem.polytope;
  const QuadraticObjective& obj = problem.objective;
  const int d = P.dim();
  const double D = problem.geometry.diameter;
  const double L = obj.L();

  const AnalysisConstants consts = compute_constants(problem, epsilon, options.eps_g);
  const std::int64_t n = plan_sample_size(complete_plan(plan, consts, noise, d));

  RunTrace trace;
  trace.algorithm = algorithm;
  trace.epsilon = epsilon;
  trace.n_per_iteration = n;

  ActiveSet active = ActiveSet::single(P, initial_vertex(P));
  for (long k = 0;; ++k) {
    const Vector x = active.point();
    IterationRecord rec;
    rec.k = k;
    rec.f_gap = problem.gap(x);
    rec.active_size = active.size();
    rec.lyapunov = lyapunov(algorithm, std::max(rec.f_gap, 0.0), rec.active_size, consts);
    rec.weight_sum_error = std::abs(active.weight_sum() - 1.0);
    rec.min_weight = active.min_weight();
    rec.reconstruction_error = active.reconstruction_error(P);
    if (options.record_snapshots) trace.snapshots.push_back({k, x, active.weights()});

    if (rec.f_gap <= epsilon || k == max_iter) {
      if (rec.f_gap <= epsilon) trace.T_eps = k;
      trace.final_gap = rec.f_gap;
      trace.records.push_back(rec);
      break;
    }

    Vector g = obj.gradient(x);
    if (n > 0) {
      const Vector noise_mean = sample_noise_mean(noise, d, n, rng);
      g += noise_mean;
      rec.grad_error = noise_mean.norm();
    }
    rec.n_samples = n;
    trace.total_samples += n;

    if (algorithm == Algorithm::standard) {
      const StandardStep step = standard_fw_step(x, g, P, epsilon, L, D);
      active.apply_fw(P, step.s_id, step.gamma);
      rec.step_type = step.type;
      rec.gamma = step.gamma;
      rec.gamma_max = 1.0;
      rec.good_event = rec.grad_error <= epsilon / (4.0 * D);
    } else {
      try {
        AwayStep step = away_fw_step(active, g, P, L);
        rec.step_type = step.type;
        rec.gamma = step.gamma;
        rec.gamma_max = step.gamma_max;
        rec.good_event = rec.grad_error <= consts.eps_g * step.pair_gap;
        active = std::move(step.next);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateDirection) throw;
        // g sees x as stationary: record a null step and resample next round.
        const std::size_t s = lmo(P, g).vertex_id;
        const std::size_t v = away_vertex(active, g, P);
        rec.step_type = StepType::fw;
        rec.gamma = 0.0;
        rec.gamma_max = 1.0;
        rec.good_event =
            rec.grad_error <= consts.eps_g * -g.dot(P.vertex(s) - P.vertex(v));
      }
    }
    trace.records.push_back(rec);
  }
  return trace;
}

}  // namespace sfw
