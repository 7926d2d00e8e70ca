#include "sfw/stochastic_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfw/error.hpp"

namespace sfw {

namespace {

// Planner outputs are ceilings of real-valued formulas; the guard keeps
// values like 16000 * (1 + 1e-16) from rounding up to 16001.
constexpr double kCeilGuard = 1e-12;
constexpr double kMaxSampleSize = 4e18;

std::int64_t ceil_sample_size(double value, SampleMode mode) {
  if (!std::isfinite(value) || value > kMaxSampleSize) {
    throw Error(ErrorCode::InvalidArgument,
                "sample size for " + to_string(mode) + " overflows: " + std::to_string(value));
  }
  const double n = std::ceil(value * (1.0 - kCeilGuard));
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(n));
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0)) {
    throw Error(ErrorCode::NonpositiveDenominator, std::string(what) + " must be positive");
  }
}

}  // namespace

NoiseModel NoiseModel::gaussian(double sigma) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  return {Kind::gaussian, sigma, 0};
}

NoiseModel NoiseModel::student_t(int dof, double scale) {
  if (dof < 3) throw Error(ErrorCode::InvalidArgument, "student_t needs dof >= 3");
  if (!(scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be >= 0");
  return {Kind::student_t, scale, dof};
}

NoiseModel NoiseModel::rademacher(double scale) {
  if (!(scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be >= 0");
  return {Kind::rademacher, scale, 0};
}

double NoiseModel::V_g(int d) const {
  const double s2 = scale * scale;
  switch (kind) {
    case Kind::gaussian:
    case Kind::rademacher:
      return d * s2;
    case Kind::student_t:
      return d * s2 * dof / (dof - 2.0);
  }
  return 0.0;
}

std::optional<double> NoiseModel::rho(int d) const {
  if (kind == Kind::student_t) return std::nullopt;
  return scale * std::sqrt(static_cast<double>(d));
}

std::string to_string(NoiseModel::Kind kind) {
  switch (kind) {
    case NoiseModel::Kind::gaussian: return "gaussian";
    case NoiseModel::Kind::student_t: return "student_t";
    case NoiseModel::Kind::rademacher: return "rademacher";
  }
  return "?";
}

Vector sample_noise_mean_by_draws(const NoiseModel& noise, int d, std::int64_t n, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  Vector sum = Vector::Zero(d);
  if (noise.is_zero()) return sum;
  switch (noise.kind) {
    case NoiseModel::Kind::gaussian: {
      std::normal_distribution<double> dist(0.0, noise.scale);
      for (std::int64_t i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) sum(j) += dist(rng);
      break;
    }
    case NoiseModel::Kind::student_t: {
      std::student_t_distribution<double> dist(noise.dof);
      for (std::int64_t i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) sum(j) += noise.scale * dist(rng);
      break;
    }
    case NoiseModel::Kind::rademacher: {
      std::bernoulli_distribution coin(0.5);
      for (std::int64_t i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) sum(j) += coin(rng) ? noise.scale : -noise.scale;
      break;
    }
  }
  return sum / static_cast<double>(n);
}

Vector sample_noise_mean(const NoiseModel& noise, int d, std::int64_t n, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  if (n == 1 || noise.kind == NoiseModel::Kind::student_t) {
    return sample_noise_mean_by_draws(noise, d, n, rng);
  }
  Vector mean = Vector::Zero(d);
  if (noise.is_zero()) return mean;
  const double nd = static_cast<double>(n);
  if (noise.kind == NoiseModel::Kind::gaussian) {
    std::normal_distribution<double> dist(0.0, noise.scale / std::sqrt(nd));
    for (int j = 0; j < d; ++j) mean(j) = dist(rng);
  } else {
    std::binomial_distribution<std::int64_t> heads(n, 0.5);
    for (int j = 0; j < d; ++j) {
      mean(j) = noise.scale * (2.0 * static_cast<double>(heads(rng)) - nd) / nd;
    }
  }
  return mean;
}

Vector draw_gradient(const QuadraticObjective& obj, const Vector& x, const NoiseModel& noise,
                     Rng& rng) {
  return obj.gradient(x) + sample_noise_mean_by_draws(noise, obj.dim(), 1, rng);
}

Vector estimate_gradient(const QuadraticObjective& obj, const Vector& x, const NoiseModel& noise,
                         std::int64_t n, Rng& rng) {
  return obj.gradient(x) + sample_noise_mean(noise, obj.dim(), n, rng);
}

double chebyshev_tail_bound(double V_g, std::int64_t n, double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::NonpositiveS, "s must be positive");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  if (std::isinf(s)) return 0.0;
  return std::min(1.0, V_g / (static_cast<double>(n) * s * s));
}

std::string to_string(SampleMode mode) {
  switch (mode) {
    case SampleMode::exact: return "exact";
    case SampleMode::fixed: return "fixed";
    case SampleMode::bounded_variance_standard: return "bounded_variance_standard";
    case SampleMode::bounded_variance_away: return "bounded_variance_away";
    case SampleMode::subgaussian_standard: return "subgaussian_standard";
    case SampleMode::subgaussian_away: return "subgaussian_away";
  }
  return "?";
}

SampleMode sample_mode_from_string(const std::string& name) {
  for (SampleMode m : {SampleMode::exact, SampleMode::fixed, SampleMode::bounded_variance_standard,
                       SampleMode::bounded_variance_away, SampleMode::subgaussian_standard,
                       SampleMode::subgaussian_away}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown sampling mode '" + name + "'");
}

double SamplePlan::get(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw Error(ErrorCode::MissingParam, "'" + key + "' required by " + to_string(mode));
  }
  return it->second;
}

double away_threshold_c1(double omega, double N, double mu, double eps_g, double D) {
  const double r = omega / N;
  const double k = 2.0 * eps_g * D + 1.0;
  return r * r * mu / (2.0 * k * k);
}

std::int64_t plan_sample_size(const SamplePlan& plan) {
  switch (plan.mode) {
    case SampleMode::exact:
      return 0;
    case SampleMode::fixed:
      if (plan.fixed_n < 1) throw Error(ErrorCode::InvalidArgument, "fixed n must be >= 1");
      return plan.fixed_n;
    case SampleMode::bounded_variance_standard: {
      const double V = plan.get("V_g"), D = plan.get("D"), eps = plan.get("epsilon");
      const double one_minus_pg = 1.0 - plan.get("p_g");
      require_positive(eps, "epsilon");
      require_positive(one_minus_pg, "1 - p_g");
      return ceil_sample_size(16.0 * V * D * D / (eps * eps * one_minus_pg), plan.mode);
    }
    case SampleMode::bounded_variance_away: {
      const double V = plan.get("V_g"), D = plan.get("D"), eps = plan.get("epsilon");
      const double eps_g = plan.get("eps_g"), N = plan.get("N"), omega = plan.get("omega");
      const double one_minus_pg = 1.0 - plan.get("p_g");
      require_positive(eps, "epsilon");
      require_positive(one_minus_pg, "1 - p_g");
      require_positive(omega, "omega");
      const double k = 2.0 * eps_g * D + 1.0;
      const double ratio = N / omega;
      return ceil_sample_size(2.0 * V * k * k / (one_minus_pg * eps) * ratio * ratio, plan.mode);
    }
    case SampleMode::subgaussian_standard: {
      const double D = plan.get("D"), eps = plan.get("epsilon"), c = plan.get("c");
      const double M = plan.get("M"), d = plan.get("d"), beta1 = plan.get("beta1");
      require_positive(c, "c");
      require_positive(eps, "epsilon");
      require_positive(beta1 * eps, "beta1 * epsilon");
      const double lead = 16.0 * D * D / (c * eps * eps);
      return ceil_sample_size(
          lead * (2.0 * M + 2.0 + std::log(2.0 * d)) + lead * std::log(1.0 / (beta1 * eps)),
          plan.mode);
    }
    case SampleMode::subgaussian_away: {
      const double eps = plan.get("epsilon"), c = plan.get("c"), M = plan.get("M");
      const double d = plan.get("d"), beta2 = plan.get("beta2");
      const double c1 = plan.has("c1")
                            ? plan.get("c1")
                            : away_threshold_c1(plan.get("omega"), plan.get("N"), plan.get("mu"),
                                                plan.get("eps_g"), plan.get("D"));
      require_positive(c, "c");
      require_positive(c1, "c1");
      require_positive(eps, "epsilon");
      require_positive(beta2 * eps, "beta2 * epsilon");
      const double numer = 2.0 * M + 2.0 + std::log(2.0 * d) - std::log(beta2 * eps);
      return ceil_sample_size(numer / (c * c1 * eps), plan.mode);
    }
  }
  return 0;
}

std::vector<std::string> plan_warnings(const SamplePlan& plan) {
  std::vector<std::string> out;
  if ((plan.mode == SampleMode::subgaussian_away) && plan.has("epsilon") &&
      plan.get("epsilon") > 0.1) {
    out.push_back(
        "subgaussian_away uses the small-epsilon lower bound on 1 - p_g; epsilon > 0.1 may "
        "undersize n");
  }
  return out;
}

double calibrate_subgaussian_c(const NoiseModel& noise, int d, const std::vector<std::int64_t>& n_grid,
                               const std::vector<double>& s_grid, int trials, Rng& rng) {
  double c = std::numeric_limits<double>::infinity();
  for (std::int64_t n : n_grid) {
    for (double s : s_grid) {
      int exceed = 0;
      for (int t = 0; t < trials; ++t) {
        if (sample_noise_mean_by_draws(noise, d, n, rng).norm() >= s) ++exceed;
      }
      if (exceed == 0) continue;
      const double freq = static_cast<double>(exceed) / trials;
      c = std::min(c, std::log(2.0 * d / freq) / (static_cast<double>(n) * s * s));
    }
  }
  if (!std::isfinite(c)) {
    throw Error(ErrorCode::InvalidArgument, "calibration grid produced no exceedances");
  }
  return c;
}

}  // namespace sfw
