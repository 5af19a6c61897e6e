#include "gasrank/gas_filter.hpp"

#include <cmath>
#include <string>

#include "gasrank/error.hpp"
#include "gasrank/plackett_luce.hpp"

namespace gasrank {

WorthVector unconditional_worth(const ParameterVector& params, const ModelSpec& spec) {
  if (spec.variant == Variant::kRandomWalk) {
    throw InvalidArgument(
        "unconditional worth is undefined for the random-walk variant (unit root)");
  }
  if (params.omega.size() != spec.universe_size || params.phi.size() != spec.ar_order) {
    throw DimensionMismatch("parameter vector does not match the model");
  }
  double phi_sum = 0.0;
  for (double p : params.phi) phi_sum += p;
  const double denom = 1.0 - phi_sum;
  if (std::abs(denom) <= 1e-8) {
    throw InvalidArgument("autoregressive parameters sum to one; unconditional worth "
                          "is undefined");
  }
  WorthVector out(params.omega);
  for (double& w : out) w /= denom;
  return out;
}

WorthVector presample_worth(const ParameterVector& params, const ModelSpec& spec) {
  if (spec.initial_worth) return *spec.initial_worth;
  switch (spec.variant) {
    case Variant::kStatic:
      return params.omega;
    case Variant::kMeanReverting:
      return unconditional_worth(params, spec);
    case Variant::kRandomWalk:
      if (spec.random_walk_init == RandomWalkInit::kZero) {
        return WorthVector(spec.universe_size, 0.0);
      }
      return params.omega;
  }
  return params.omega;
}

namespace detail {

WorthRecursion::WorthRecursion(const ParameterVector& params, const ModelSpec& spec)
    : params_(params),
      n_(spec.universe_size),
      m_(spec.covariate_count),
      presample_(presample_worth(params, spec)),
      scores_(spec.score_order * spec.universe_size, 0.0),
      worths_(spec.ar_order * spec.universe_size) {
  for (std::size_t l = 0; l < spec.ar_order; ++l) {
    std::copy(presample_.begin(), presample_.end(),
              worths_.begin() + static_cast<std::ptrdiff_t>(l * n_));
  }
}

void WorthRecursion::next(std::span<const double> covariates,
                          std::span<double> worth_out) const {
  const std::size_t p = params_.alpha.size();
  const std::size_t q = params_.phi.size();
  for (std::size_t i = 0; i < n_; ++i) {
    double f = params_.omega[i];
    for (std::size_t j = 0; j < m_; ++j) f += params_.beta[j] * covariates[i * m_ + j];
    for (std::size_t k = 1; k <= p; ++k) {
      f += params_.alpha[k - 1] * scores_[((score_head_ + p - k) % p) * n_ + i];
    }
    for (std::size_t l = 1; l <= q; ++l) {
      f += params_.phi[l - 1] * worths_[((worth_head_ + q - l) % q) * n_ + i];
    }
    worth_out[i] = f;
  }
}

void WorthRecursion::push(std::span<const double> worth, std::span<const double> score) {
  const std::size_t p = params_.alpha.size();
  const std::size_t q = params_.phi.size();
  if (p > 0) {
    std::copy(score.begin(), score.end(),
              scores_.begin() + static_cast<std::ptrdiff_t>(score_head_ * n_));
    score_head_ = (score_head_ + 1) % p;
  }
  if (q > 0) {
    std::copy(worth.begin(), worth.end(),
              worths_.begin() + static_cast<std::ptrdiff_t>(worth_head_ * n_));
    worth_head_ = (worth_head_ + 1) % q;
  }
}

}  // namespace detail

namespace {

struct Divergence {
  std::size_t period = 0;
  std::size_t item = 0;
  double value = 0.0;
};

// Runs the filter. With `out` null only the log-likelihood is accumulated.
// Returns false and fills `div` on divergence.
bool run_filter(const ParameterVector& params, const ModelSpec& spec,
                const PanelDataset& data, FilterOutput* out, double& total,
                Divergence& div) {
  const std::size_t n = spec.universe_size;
  const std::size_t periods = data.period_count();
  detail::WorthRecursion recursion(params, spec);

  std::vector<double> worth_row(n);
  std::vector<double> score_row(n);
  std::vector<double> scratch;
  const bool zero_score = spec.absent_mode == AbsentMode::kZeroScore;

  total = 0.0;
  for (std::size_t t = 0; t < periods; ++t) {
    std::span<double> f = out ? out->worth_path.row(t) : std::span<double>(worth_row);
    std::span<double> s = out ? out->score_path.row(t) : std::span<double>(score_row);
    recursion.next({data.covariates.data() + t * n * spec.covariate_count,
                    n * spec.covariate_count},
                   f);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(std::abs(f[i]) <= kDivergenceBound)) {
        div = {t, i, f[i]};
        return false;
      }
    }
    const Ranking& y = data.rankings[t];
    double ll;
    if (zero_score) {
      std::fill(s.begin(), s.end(), 0.0);
      ll = detail::evaluate(f, y.ordering(), {}, s, scratch);
    } else {
      ll = detail::evaluate(f, y.ordering(), y.unranked(), s, scratch);
    }
    if (out) out->per_period_loglik[t] = ll;
    total += ll;
    recursion.push(f, s);
  }
  if (out) {
    out->total_loglik = total;
    out->presample_worth.assign(recursion.presample().begin(), recursion.presample().end());
  }
  return true;
}

}  // namespace

FilterOutput filter_path(const ParameterVector& params, const ModelSpec& spec,
                         const PanelDataset& data) {
  spec.validate();
  params.validate(spec);
  data.check_compatible(spec);
  data.validate();

  FilterOutput out;
  out.worth_path = Matrix(data.period_count(), spec.universe_size);
  out.score_path = Matrix(data.period_count(), spec.universe_size);
  out.per_period_loglik.assign(data.period_count(), 0.0);
  double total = 0.0;
  Divergence div;
  if (!run_filter(params, spec, data, &out, total, div)) {
    throw DivergenceError("filter diverged at period " + std::to_string(div.period + 1) +
                              ", item " + std::to_string(div.item + 1) + " (worth " +
                              std::to_string(div.value) + ")",
                          div.period, div.item);
  }
  return out;
}

std::optional<double> filtered_loglik(const ParameterVector& params, const ModelSpec& spec,
                                      const PanelDataset& data) {
  if (spec.variant == Variant::kMeanReverting && !spec.initial_worth) {
    double phi_sum = 0.0;
    for (double p : params.phi) phi_sum += p;
    if (std::abs(1.0 - phi_sum) <= 1e-8) return std::nullopt;
  }
  double total = 0.0;
  Divergence div;
  if (!run_filter(params, spec, data, nullptr, total, div)) return std::nullopt;
  if (!std::isfinite(total)) return std::nullopt;
  return total;
}

}  // namespace gasrank
