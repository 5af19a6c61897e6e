#include "gasrank/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "gasrank/error.hpp"
#include "gasrank/optimizer.hpp"
#include "gasrank/plackett_luce.hpp"

namespace gasrank {
namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();

Objective negative_loglik(const PanelDataset& data, const ModelSpec& spec) {
  return [&data, &spec](std::span<const double> free) {
    const ParameterVector p = unpack(free, spec);
    const auto ll = filtered_loglik(p, spec, data);
    return ll ? -*ll : kInfeasible;
  };
}

BfgsOptions bfgs_options(const OptimizerConfig& config) {
  BfgsOptions o;
  o.max_iterations = config.max_iterations;
  o.gradient_tolerance = config.gradient_tolerance;
  o.relative_tolerance = config.relative_loglik_tolerance;
  return o;
}

BfgsResult run_bfgs(const PanelDataset& data, const ModelSpec& spec,
                    const OptimizerConfig& config, std::vector<double> start) {
  const Objective objective = negative_loglik(data, spec);
  const double step = config.finite_difference_step;
  const Gradient gradient = [&objective, step](std::span<const double> x,
                                               std::span<double> g) {
    return central_difference_gradient(objective, x, step, g);
  };
  return minimize_bfgs(objective, gradient, std::move(start), bfgs_options(config));
}

// Starting point before jitter: omega and beta from a static fit, alpha_1 = 0.1,
// phi_1 = 0.5. omega is rescaled by (1 - sum phi) so that the unconditional
// worth of the start matches the static worths.
std::vector<double> base_start(const PanelDataset& data, const ModelSpec& spec,
                               const OptimizerConfig& config) {
  const std::size_t n = spec.universe_size;
  ParameterVector start;
  start.omega.assign(n, 0.0);
  start.beta.assign(spec.covariate_count, 0.0);
  start.alpha.assign(spec.score_order, 0.0);
  start.phi.assign(spec.ar_order, 0.0);
  if (spec.score_order > 0) start.alpha[0] = 0.1;
  if (spec.ar_order > 0) start.phi[0] = spec.variant == Variant::kRandomWalk ? 1.0 : 0.5;
  if (spec.variant == Variant::kStatic) return pack(start, spec);

  ModelSpec static_spec =
      ModelSpec::make(Variant::kStatic, n, spec.covariate_count, spec.absent_mode);
  const ParameterVector zero = unpack(std::vector<double>(static_spec.free_parameter_count(), 0.0),
                                      static_spec);
  const BfgsResult pre = run_bfgs(data, static_spec, config, pack(zero, static_spec));
  if (std::isfinite(pre.value)) {
    const ParameterVector fitted = unpack(pre.x, static_spec);
    double phi_sum = 0.0;
    for (double p : start.phi) phi_sum += p;
    for (std::size_t i = 0; i < n; ++i) start.omega[i] = (1.0 - phi_sum) * fitted.omega[i];
    start.beta = fitted.beta;
  }
  return pack(start, spec);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iterations == 0) throw InvalidArgument("max_iterations must be positive");
  if (!(gradient_tolerance > 0.0) || !(relative_loglik_tolerance > 0.0) ||
      !(finite_difference_step > 0.0) || !(hessian_step > 0.0)) {
    throw InvalidArgument("optimizer tolerances and steps must be positive");
  }
  if (restart_count == 0) throw InvalidArgument("restart_count must be at least 1");
  if (restart_jitter < 0.0) throw InvalidArgument("restart_jitter must be non-negative");
}

ConnectivityDiagnostic connectivity_check(const PanelDataset& data, AbsentMode mode) {
  const std::size_t n = data.universe_size;
  std::vector<char> edge(n * n, 0);
  for (const Ranking& y : data.rankings) {
    const auto ord = y.ordering();
    for (std::size_t a = 0; a < ord.size(); ++a) {
      for (std::size_t b = a + 1; b < ord.size(); ++b) edge[ord[a] * n + ord[b]] = 1;
      if (mode == AbsentMode::kPartialLikelihood) {
        for (std::size_t l : y.unranked()) edge[ord[a] * n + l] = 1;
      }
    }
  }

  // Kosaraju: finishing order on the graph, then components on the transpose.
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> finish;
  finish.reserve(n);
  std::function<void(std::size_t)> forward = [&](std::size_t u) {
    seen[u] = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (edge[u * n + v] && !seen[v]) forward(v);
    }
    finish.push_back(u);
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (!seen[u]) forward(u);
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> component(n, kNone);
  std::size_t count = 0;
  std::function<void(std::size_t)> backward = [&](std::size_t u) {
    component[u] = count;
    for (std::size_t v = 0; v < n; ++v) {
      if (edge[v * n + u] && component[v] == kNone) backward(v);
    }
  };
  for (auto it = finish.rbegin(); it != finish.rend(); ++it) {
    if (component[*it] == kNone) {
      backward(*it);
      ++count;
    }
  }

  ConnectivityDiagnostic diag;
  diag.connected = count <= 1;
  if (diag.connected) return diag;

  std::vector<char> has_incoming(count, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (edge[u * n + v] && component[u] != component[v]) has_incoming[component[v]] = 1;
    }
  }
  // Source component containing the lowest-indexed item.
  for (std::size_t u = 0; u < n; ++u) {
    if (!has_incoming[component[u]]) {
      for (std::size_t v = 0; v < n; ++v) {
        if (component[v] == component[u]) diag.witness.push_back(v);
      }
      break;
    }
  }
  return diag;
}

FitResult evaluate_at(const PanelDataset& data, const ModelSpec& spec,
                      const ParameterVector& params) {
  FitResult r;
  r.spec = spec;
  r.params = params;
  r.filter = filter_path(params, spec, data);
  r.free_params = pack(params, spec);
  r.loglik = r.filter.total_loglik;
  r.aic = aic(r.loglik, spec.free_parameter_count());
  r.connectivity = connectivity_check(data, spec.absent_mode);
  return r;
}

FitResult fit(const PanelDataset& data, const ModelSpec& spec, const OptimizerConfig& config) {
  spec.validate();
  config.validate();
  data.validate();
  data.check_compatible(spec);

  const ConnectivityDiagnostic connectivity = connectivity_check(data, spec.absent_mode);
  const std::vector<double> base = base_start(data, spec, config);

  Rng rng(config.random_seed);
  std::uniform_real_distribution<double> jitter(-config.restart_jitter, config.restart_jitter);
  std::optional<BfgsResult> best;
  for (std::size_t r = 0; r < config.restart_count; ++r) {
    std::vector<double> start = base;
    if (r > 0) {
      for (double& x : start) x += jitter(rng);
    }
    BfgsResult run = run_bfgs(data, spec, config, std::move(start));
    if (run.status == BfgsStatus::kInfeasibleStart || !std::isfinite(run.value)) continue;
    if (!best || run.value < best->value) best = std::move(run);
  }
  if (!best) {
    throw NumericalError("every optimizer start diverged; the filter is not finite at "
                         "any starting point");
  }
  if (!connectivity.connected && max_abs(best->x) > kUnboundedParameterNorm) {
    throw NumericalError(
        "likelihood appears unbounded: the data fail the connectivity condition and the "
        "parameter estimates exceed " +
        std::to_string(kUnboundedParameterNorm) + " in magnitude");
  }

  FitResult result = evaluate_at(data, spec, unpack(best->x, spec));
  result.converged = best->converged();
  result.iterations = best->iterations;
  result.gradient_norm = best->gradient_norm;
  if (!connectivity.connected) {
    result.warnings.push_back(
        "data fail the connectivity condition; the maximum likelihood estimate may not "
        "exist");
  }
  if (!result.converged) {
    result.warnings.push_back(std::string("optimizer did not converge: ") +
                              std::string(to_string(best->status)));
  }
  return result;
}

FitResult standard_errors(FitResult fit, const PanelDataset& data,
                          const OptimizerConfig& config) {
  config.validate();
  const ModelSpec& spec = fit.spec;
  const std::size_t k = fit.free_params.size();
  const Objective neg = negative_loglik(data, spec);
  auto loglik = [&neg](std::span<const double> x) {
    const double v = neg(x);
    if (!std::isfinite(v)) {
      throw NumericalError("Hessian evaluation reached a divergent parameter region");
    }
    return -v;
  };

  std::vector<double> theta = fit.free_params;
  std::vector<double> h(k);
  for (std::size_t i = 0; i < k; ++i) {
    h[i] = config.hessian_step * std::max(1.0, std::abs(theta[i]));
  }
  const double center = loglik(theta);

  Eigen::MatrixXd hess(k, k);
  std::vector<double> plus(k), minus(k);
  for (std::size_t i = 0; i < k; ++i) {
    theta[i] += h[i];
    plus[i] = loglik(theta);
    theta[i] -= 2.0 * h[i];
    minus[i] = loglik(theta);
    theta[i] += h[i];
    hess(i, i) = (plus[i] - 2.0 * center + minus[i]) / (h[i] * h[i]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double ti = theta[i], tj = theta[j];
      theta[i] = ti + h[i];
      theta[j] = tj + h[j];
      const double pp = loglik(theta);
      theta[j] = tj - h[j];
      const double pm = loglik(theta);
      theta[i] = ti - h[i];
      const double mm = loglik(theta);
      theta[j] = tj + h[j];
      const double mp = loglik(theta);
      theta[i] = ti;
      theta[j] = tj;
      hess(i, j) = hess(j, i) = (pp - pm - mp + mm) / (4.0 * h[i] * h[j]);
    }
  }

  const Eigen::MatrixXd info = -hess;
  Eigen::MatrixXd cov;
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() == Eigen::Success) {
    cov = llt.solve(Eigen::MatrixXd::Identity(k, k));
    fit.hessian_negative_definite = true;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
    const Eigen::VectorXd& values = eig.eigenvalues();
    const double cutoff = 1e-10 * std::max(1.0, values.cwiseAbs().maxCoeff());
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (values(i) > cutoff) inv(i) = 1.0 / values(i);
    }
    cov = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    fit.hessian_negative_definite = false;
    fit.warnings.push_back(
        "Hessian is not negative definite; standard errors use a pseudo-inverse");
  }
  cov = 0.5 * (cov + cov.transpose());

  fit.cov_matrix = Matrix(k, k);
  fit.std_errors.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      fit.cov_matrix(i, j) = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    fit.std_errors[i] = std::sqrt(std::max(0.0, fit.cov_matrix(i, i)));
  }
  // omega_N = -sum_{i<N} omega_i, so Var(omega_N) is the sum of that block.
  double var_last = 0.0;
  const std::size_t free_omega = spec.universe_size - 1;
  for (std::size_t i = 0; i < free_omega; ++i) {
    for (std::size_t j = 0; j < free_omega; ++j) var_last += fit.cov_matrix(i, j);
  }
  fit.omega_last_std_error = std::sqrt(std::max(0.0, var_last));
  if (!fit.converged) {
    fit.warnings.push_back("standard errors computed at a non-converged estimate");
  }
  return fit;
}

Interval confidence_interval(double estimate, double std_error, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidArgument("confidence level must lie strictly between 0 and 1");
  }
  const boost::math::normal_distribution<double> standard;
  const double z = boost::math::quantile(standard, 0.5 * (1.0 + level));
  return {estimate - z * std_error, estimate + z * std_error};
}

std::vector<Interval> confidence_interval(const FitResult& fit, double level) {
  if (!fit.has_std_errors()) {
    throw InvalidArgument("fit has no standard errors; call standard_errors first");
  }
  std::vector<Interval> out;
  out.reserve(fit.free_params.size() + 1);
  for (std::size_t i = 0; i < fit.free_params.size(); ++i) {
    out.push_back(confidence_interval(fit.free_params[i], fit.std_errors[i], level));
  }
  out.push_back(confidence_interval(fit.params.omega.back(), fit.omega_last_std_error, level));
  return out;
}

double normal_p_value(double estimate, double std_error) {
  if (!(std_error > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::erfc(std::abs(estimate / std_error) / std::sqrt(2.0));
}

double aic(double loglik, std::size_t free_parameters) {
  return 2.0 * static_cast<double>(free_parameters) - 2.0 * loglik;
}

double aic(const FitResult& fit) { return aic(fit.loglik, fit.spec.free_parameter_count()); }

}  // namespace gasrank
