#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gasrank/gas_filter.hpp"
#include "gasrank/matrix.hpp"
#include "gasrank/model.hpp"

namespace gasrank {

struct OptimizerConfig {
  std::size_t max_iterations = 1000;
  double gradient_tolerance = 1e-5;
  double relative_loglik_tolerance = 1e-9;
  // Total number of starts; the first is unjittered.
  std::size_t restart_count = 3;
  // Relative step for the central-difference gradient.
  double finite_difference_step = 1e-6;
  // Relative step for the central second-difference Hessian.
  double hessian_step = 1e-4;
  // Half-width of the uniform jitter applied to restarts.
  double restart_jitter = 0.2;
  std::uint64_t random_seed = 0x5eed;

  void validate() const;
};

// Fitted parameters with a max-abs value above this, on data that fails the
// connectivity check, are reported as an unbounded likelihood.
inline constexpr double kUnboundedParameterNorm = 50.0;

struct ConnectivityDiagnostic {
  bool connected = true;
  // When not connected: a set of items never ranked below any item outside it
  // (a source strongly connected component). Sorted ascending.
  std::vector<std::size_t> witness;
};

// Hunter's condition: every bipartition must have some item of the second set
// ranked above some item of the first. Under partial likelihood unranked items
// count as ranked below every ranked item of that period.
ConnectivityDiagnostic connectivity_check(
    const PanelDataset& data, AbsentMode mode = AbsentMode::kPartialLikelihood);

struct FitResult {
  ModelSpec spec;
  ParameterVector params;
  std::vector<double> free_params;
  double loglik = 0.0;
  double aic = 0.0;
  // Filled by standard_errors(); one per free parameter.
  std::vector<double> std_errors;
  // Delta-method standard error of the derived omega_N.
  double omega_last_std_error = 0.0;
  Matrix cov_matrix;
  // False when the negative Hessian was not positive definite and the
  // covariance comes from a pseudo-inverse.
  bool hessian_negative_definite = false;
  FilterOutput filter;
  bool converged = false;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  ConnectivityDiagnostic connectivity;
  std::vector<std::string> warnings;

  bool has_std_errors() const { return !std_errors.empty(); }
};

// Maximum-likelihood fit by BFGS on central-difference gradients. Throws
// NumericalError when every start diverges or when the likelihood is judged
// unbounded.
FitResult fit(const PanelDataset& data, const ModelSpec& spec,
              const OptimizerConfig& config = {});

// Builds a FitResult at fixed parameters without optimizing (loglik, AIC,
// filter). Useful for oracle runs and as the basis for standard_errors.
FitResult evaluate_at(const PanelDataset& data, const ModelSpec& spec,
                      const ParameterVector& params);

// Empirical-Hessian covariance and standard errors at the fitted parameters.
FitResult standard_errors(FitResult fit, const PanelDataset& data,
                          const OptimizerConfig& config = {});

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x) const { return lower <= x && x <= upper; }
};

// estimate +- z_{(1+level)/2} * se.
Interval confidence_interval(double estimate, double std_error, double level);

// One interval per free parameter followed by one for omega_N.
std::vector<Interval> confidence_interval(const FitResult& fit, double level);

// Two-sided p-value of estimate / std_error under the standard normal.
double normal_p_value(double estimate, double std_error);

double aic(double loglik, std::size_t free_parameters);
double aic(const FitResult& fit);

}  // namespace gasrank
