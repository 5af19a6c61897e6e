#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gasrank/matrix.hpp"
#include "gasrank/model.hpp"

namespace gasrank {

// Any |f_{i,t}| above this aborts the filter with DivergenceError.
inline constexpr double kDivergenceBound = 1e6;

struct FilterOutput {
  Matrix worth_path;  // T x N, f_t used for period t's likelihood
  Matrix score_path;  // T x N, score of y_t at f_t (zero for absent items
                      // under AbsentMode::kZeroScore)
  std::vector<double> per_period_loglik;
  double total_loglik = 0.0;
  // f_0 = f_{-1} = ... used to start the recursion.
  std::vector<double> presample_worth;
};

// omega / (1 - sum(phi)); omega itself for the static variant.
// Throws InvalidArgument for the random-walk variant or a near unit root.
WorthVector unconditional_worth(const ParameterVector& params, const ModelSpec& spec);

// Pre-sample worth used by the filter: unconditional worth, omega (random walk),
// zero (random walk, alternative) or ModelSpec::initial_worth when set.
WorthVector presample_worth(const ParameterVector& params, const ModelSpec& spec);

// Runs the score-driven recursion over the whole panel. Throws
// DivergenceError when a worth leaves [-kDivergenceBound, kDivergenceBound] or
// becomes non-finite, DimensionMismatch on shape errors.
FilterOutput filter_path(const ParameterVector& params, const ModelSpec& spec,
                         const PanelDataset& data);

// Total log-likelihood only, skipping path storage and input validation.
// Returns nullopt where filter_path would throw DivergenceError. Intended for
// the optimizer's inner loop; callers validate shapes once beforehand.
std::optional<double> filtered_loglik(const ParameterVector& params,
                                      const ModelSpec& spec,
                                      const PanelDataset& data);

namespace detail {

// The recursion state: the last P scores and last Q worths. Shared by the
// filter, the simulator and one-step prediction so that all three apply
// exactly the same arithmetic.
class WorthRecursion {
 public:
  WorthRecursion(const ParameterVector& params, const ModelSpec& spec);

  // Writes f_t given the period's covariates (N x M, item-major).
  void next(std::span<const double> covariates, std::span<double> worth_out) const;

  // Records period t's worth and score as the most recent lag.
  void push(std::span<const double> worth, std::span<const double> score);

  std::span<const double> presample() const { return presample_; }

 private:
  const ParameterVector& params_;
  std::size_t n_;
  std::size_t m_;
  std::vector<double> presample_;
  std::vector<double> scores_;  // P x N ring
  std::vector<double> worths_;  // Q x N ring
  std::size_t score_head_ = 0;
  std::size_t worth_head_ = 0;
};

}  // namespace detail
}  // namespace gasrank
