#include "gasrank/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace gasrank {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void set_identity(std::vector<double>& h, std::size_t n, double scale = 1.0) {
  std::fill(h.begin(), h.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
}

}  // namespace

std::string_view to_string(BfgsStatus s) {
  switch (s) {
    case BfgsStatus::kGradientTolerance: return "gradient tolerance reached";
    case BfgsStatus::kRelativeTolerance: return "relative improvement below tolerance";
    case BfgsStatus::kMaxIterations: return "iteration limit reached";
    case BfgsStatus::kLineSearchFailed: return "line search failed";
    case BfgsStatus::kInfeasibleStart: return "objective not finite at start";
  }
  return "?";
}

bool central_difference_gradient(const Objective& objective, std::span<const double> x,
                                 double step, std::span<double> g) {
  std::vector<double> probe(x.begin(), x.end());
  std::optional<double> center;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double h = step * std::max(1.0, std::abs(x[k]));
    probe[k] = x[k] + h;
    const double fp = objective(probe);
    probe[k] = x[k] - h;
    const double fm = objective(probe);
    probe[k] = x[k];
    const bool ok_p = std::isfinite(fp);
    const bool ok_m = std::isfinite(fm);
    if (ok_p && ok_m) {
      g[k] = (fp - fm) / (2.0 * h);
      continue;
    }
    if (!ok_p && !ok_m) return false;
    if (!center) center = objective(x);
    if (!std::isfinite(*center)) return false;
    g[k] = ok_p ? (fp - *center) / h : (*center - fm) / h;
  }
  return true;
}

BfgsResult minimize_bfgs(const Objective& objective, const Gradient& gradient,
                         std::vector<double> start, const BfgsOptions& options) {
  const std::size_t n = start.size();
  BfgsResult result;
  result.x = std::move(start);
  result.gradient.assign(n, 0.0);

  double fx = objective(result.x);
  result.evaluations = 1;
  result.value = fx;
  if (!std::isfinite(fx) || !gradient(result.x, result.gradient)) {
    result.status = BfgsStatus::kInfeasibleStart;
    return result;
  }

  std::vector<double>& x = result.x;
  std::vector<double>& g = result.gradient;
  std::vector<double> h(n * n);
  set_identity(h, n);
  bool h_is_identity = true;
  bool scaled = false;

  std::vector<double> d(n), x_new(n), g_new(n), s(n), y(n), hy(n);
  std::size_t small_steps = 0;
  bool done = false;

  while (!done) {
    if (norm2(g) <= options.gradient_tolerance) {
      result.status = BfgsStatus::kGradientTolerance;
      break;
    }
    if (result.iterations >= options.max_iterations) {
      result.status = BfgsStatus::kMaxIterations;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc -= h[i * n + j] * g[j];
      d[i] = acc;
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      set_identity(h, n);
      h_is_identity = true;
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = -dot(g, g);
    }

    // Without curvature information the raw gradient can be badly scaled.
    double step = h_is_identity && !scaled ? std::min(1.0, 1.0 / norm_inf(d)) : 1.0;
    bool accepted = false;
    double f_new = fx;
    for (std::size_t b = 0; b <= options.max_backtracks; ++b) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
      f_new = objective(x_new);
      ++result.evaluations;
      if (std::isfinite(f_new) && f_new <= fx + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      double shrink = 0.25;
      if (std::isfinite(f_new)) {
        // Minimizer of the quadratic through f(0), f'(0) and f(step).
        const double denom = 2.0 * (f_new - fx - slope * step);
        if (denom > 0.0) shrink = std::clamp(-slope * step / denom, 0.1, 0.5);
      }
      step *= shrink;
    }

    if (!accepted) {
      if (!h_is_identity) {
        set_identity(h, n);
        h_is_identity = true;
        scaled = false;
        continue;
      }
      result.status = BfgsStatus::kLineSearchFailed;
      break;
    }
    if (!gradient(x_new, g_new)) {
      result.status = BfgsStatus::kLineSearchFailed;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      if (!scaled) {
        set_identity(h, n, sy / dot(y, y));
        scaled = true;
      }
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += h[i * n + j] * y[j];
        hy[i] = acc;
      }
      const double yhy = dot(y, hy);
      const double coeff = rho * rho * yhy + rho;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += coeff * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
      h_is_identity = false;
    }

    const double rel = (fx - f_new) / std::max(1.0, std::abs(fx));
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    ++result.iterations;

    if (rel < options.relative_tolerance) {
      if (++small_steps >= 2) {
        result.status = BfgsStatus::kRelativeTolerance;
        done = true;
      }
    } else {
      small_steps = 0;
    }
  }

  result.value = fx;
  result.gradient_norm = norm2(g);
  if (result.status != BfgsStatus::kGradientTolerance &&
      result.gradient_norm <= options.gradient_tolerance) {
    result.status = BfgsStatus::kGradientTolerance;
  }
  return result;
}

}  // namespace gasrank
