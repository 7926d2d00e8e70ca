#include "sfw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfw/error.hpp"

namespace sfw {

AnalysisConstants compute_constants(const QuadraticObjective& obj, const GeometryConstants& geo,
                                    double M, double epsilon, double eps_g) {
  const double D = geo.diameter;
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!(eps_g > 0.0) || !(eps_g < 1.0 / (4.0 * D))) {
    throw Error(ErrorCode::EpsGOutOfRange,
                "eps_g = " + std::to_string(eps_g) + " outside (0, 1/(4D))");
  }

  AnalysisConstants c;
  c.epsilon = epsilon;
  c.eps_g = eps_g;
  c.D = D;
  c.L = obj.L();
  c.mu = obj.mu();
  c.M = M;
  c.N = geo.num_vertices;
  c.omega = geo.omega;

  const double LD2 = c.L * D * D;
  c.beta1 = std::min(epsilon / (8.0 * LD2), 0.25);

  const double t = 2.0 * eps_g * D;  // in (0, 1/2)
  const double ratio = c.omega / static_cast<double>(c.N);
  c.beta2 = std::min((0.5 - t) / (1.0 + t),
                     ratio * ratio * c.mu * (0.5 - t) / (8.0 * LD2 * (t + 1.0) * (t + 1.0)));

  const double half = c.beta2 * epsilon / 2.0;
  c.nu = 1.0 / (1.0 + half);
  c.one_minus_nu = half / (1.0 + half);
  c.delta_S = c.beta1 * epsilon / 2.0;
  c.delta_A = half / (2.0 + c.beta2 * epsilon);

  const double upper_A = std::min(c.nu * c.beta2 * epsilon - c.one_minus_nu, c.one_minus_nu);
  if (!(c.delta_A > 0.0 && c.delta_A < upper_A * (1.0 + 1e-12))) {
    throw Error(ErrorCode::InvalidArgument, "delta_A outside (0, min{nu beta2 eps - 1 + nu, 1 - nu})");
  }

  // Standard: p_g >= (e^{2M} - e^{-delta_S}) / (e^{2M} - e^{-beta1 eps}).
  {
    const double b1e = c.beta1 * epsilon;
    const double denom = std::exp(2.0 * M) - std::exp(-b1e);
    c.one_minus_pg_standard = std::exp(-b1e) * std::expm1(b1e - c.delta_S) / denom;
    c.pg_standard = 1.0 - c.one_minus_pg_standard;
  }
  // Away: p_g >= (A - e^{-delta_A}) / (A - B) with A = e^{2 M nu + 1 - nu},
  // B = max{e^{-nu beta2 eps + 1 - nu}, e^{-(1 - nu)}}.
  {
    const double log_A = 2.0 * M * c.nu + c.one_minus_nu;
    const double log_B = std::max(-c.nu * c.beta2 * epsilon + c.one_minus_nu, -c.one_minus_nu);
    const double denom = std::exp(log_A) - std::exp(log_B);
    c.one_minus_pg_away = std::exp(log_B) * std::expm1(-c.delta_A - log_B) / denom;
    c.pg_away = 1.0 - c.one_minus_pg_away;
  }
  return c;
}

AnalysisConstants compute_constants(const Problem& problem, double epsilon,
                                    std::optional<double> eps_g) {
  return compute_constants(problem.objective, problem.geometry, problem.M, epsilon,
                           eps_g.value_or(default_eps_g(problem.geometry.diameter)));
}

double log_lyapunov(Algorithm kind, double f_gap, std::size_t active_size,
                    const AnalysisConstants& c) {
  if (kind == Algorithm::standard) return f_gap;
  return c.nu * f_gap + c.one_minus_nu * static_cast<double>(active_size);
}

double lyapunov(Algorithm kind, double f_gap, std::size_t active_size, const AnalysisConstants& c) {
  return std::exp(log_lyapunov(kind, f_gap, active_size, c));
}

double expected_stopping_bound(Algorithm kind, double initial_gap, std::size_t initial_active_size,
                               const AnalysisConstants& c) {
  if (kind == Algorithm::standard) {
    const double e = c.epsilon;
    return 2.0 * initial_gap * std::max(8.0 * c.L * c.D * c.D / (e * e), 4.0 / e);
  }
  return log_lyapunov(kind, initial_gap, initial_active_size, c) *
         (2.0 + 4.0 / (c.beta2 * c.epsilon));
}

SamplePlan complete_plan(const SamplePlan& plan, const AnalysisConstants& c,
                         const NoiseModel& noise, int d) {
  SamplePlan out = plan;
  auto fill = [&](const char* key, double value) { out.params.try_emplace(key, value); };
  if (plan.mode == SampleMode::exact || plan.mode == SampleMode::fixed) return out;

  fill("epsilon", c.epsilon);
  fill("D", c.D);
  fill("d", static_cast<double>(d));
  fill("M", c.M);
  fill("N", static_cast<double>(c.N));
  fill("omega", c.omega);
  fill("eps_g", c.eps_g);
  fill("mu", c.mu);
  fill("beta1", c.beta1);
  fill("beta2", c.beta2);
  fill("V_g", noise.V_g(d));
  if (plan.mode == SampleMode::bounded_variance_standard ||
      plan.mode == SampleMode::subgaussian_standard) {
    fill("p_g", c.pg_standard);
  } else {
    fill("p_g", c.pg_away);
  }
  return out;
}

void CheckTally::add(double margin, double tol) {
  ++checked;
  if (margin < -tol) ++violations;
  worst_margin = std::min(worst_margin, margin);
}

VerifyReport verify_trace(const RunTrace& trace, const AnalysisConstants& c, Algorithm kind) {
  const auto& recs = trace.records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].k != static_cast<long>(i)) {
      throw Error(ErrorCode::MalformedTrace, "record " + std::to_string(i) + " has k = " +
                                                 std::to_string(recs[i].k));
    }
    if (recs[i].step_type == StepType::none && i + 1 != recs.size()) {
      throw Error(ErrorCode::MalformedTrace, "terminal record before the end of the trace");
    }
  }
  if (trace.T_eps) {
    const long T = *trace.T_eps;
    if (T < 0 || static_cast<std::size_t>(T) >= recs.size()) {
      throw Error(ErrorCode::MalformedTrace, "T_eps outside the record range");
    }
  }

  VerifyReport rep;
  rep.kind = kind;
  rep.lyapunov_bound = std::exp(-c.delta(kind));
  double ratio_sum = 0.0;
  const long stop = trace.T_eps ? *trace.T_eps : static_cast<long>(recs.size()) - 1;

  for (long k = 0; k + 1 < static_cast<long>(recs.size()) && k < stop; ++k) {
    const IterationRecord& cur = recs[k];
    const IterationRecord& nxt = recs[k + 1];
    if (cur.step_type == StepType::none) {
      throw Error(ErrorCode::MalformedTrace, "missing step at k = " + std::to_string(k));
    }
    if (!cur.good_event) continue;
    const double tol = 1e-9 * std::max(1.0, std::abs(cur.f_gap));
    long before = rep.violations();
    if (kind == Algorithm::standard) {
      const double change = nxt.f_gap - cur.f_gap;
      rep.decrease.add(-c.beta1 * c.epsilon - change, tol);
    } else if (cur.step_type == StepType::away_drop) {
      rep.drop.add(cur.f_gap - nxt.f_gap, tol);
    } else {
      rep.contraction.add((1.0 - c.beta2) * cur.f_gap - nxt.f_gap, tol);
    }
    if (rep.violations() > before) rep.flagged.push_back(k);

    ratio_sum += std::exp(log_lyapunov(kind, nxt.f_gap, nxt.active_size, c) -
                          log_lyapunov(kind, cur.f_gap, cur.active_size, c));
    ++rep.lyapunov_count;
  }
  if (rep.lyapunov_count > 0) rep.lyapunov_mean_ratio = ratio_sum / rep.lyapunov_count;
  return rep;
}

}  // namespace sfw
