#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace gasrank {

// Objective to minimize. May return +inf (or NaN) for infeasible points; the
// line search then backs off.
using Objective = std::function<double(std::span<const double>)>;
// Writes the gradient at x into g. Returns false if it could not be evaluated.
using Gradient = std::function<bool(std::span<const double> x, std::span<double> g)>;

struct BfgsOptions {
  std::size_t max_iterations = 1000;
  double gradient_tolerance = 1e-5;
  double relative_tolerance = 1e-9;
  // Armijo sufficient-decrease constant.
  double armijo = 1e-4;
  std::size_t max_backtracks = 60;
};

enum class BfgsStatus {
  kGradientTolerance,
  kRelativeTolerance,
  kMaxIterations,
  kLineSearchFailed,
  kInfeasibleStart,
};

std::string_view to_string(BfgsStatus s);

struct BfgsResult {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> gradient;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  BfgsStatus status = BfgsStatus::kMaxIterations;

  bool converged() const {
    return status == BfgsStatus::kGradientTolerance ||
           status == BfgsStatus::kRelativeTolerance;
  }
};

// Quasi-Newton minimization with an inverse-Hessian BFGS update and a
// backtracking Armijo line search. The update is skipped whenever the
// curvature condition s'y > 0 fails.
//
// Stops when ||g||_2 <= gradient_tolerance, or when the relative decrease of
// the objective stays below relative_tolerance on two successive iterations.
BfgsResult minimize_bfgs(const Objective& objective, const Gradient& gradient,
                         std::vector<double> start, const BfgsOptions& options);

// Central finite-difference gradient with per-coordinate step
// step * max(1, |x_k|). Falls back to a one-sided difference when one side is
// infeasible; returns false if both sides are.
bool central_difference_gradient(const Objective& objective,
                                 std::span<const double> x, double step,
                                 std::span<double> g);

}  // namespace gasrank
