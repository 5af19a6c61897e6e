#include "gasrank/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gasrank/error.hpp"

namespace gasrank {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kStatic: return "static";
    case Variant::kMeanReverting: return "mean-reverting";
    case Variant::kRandomWalk: return "random-walk";
  }
  return "?";
}

std::string_view to_string(AbsentMode m) {
  return m == AbsentMode::kPartialLikelihood ? "partial-likelihood" : "zero-score";
}

std::string_view to_string(RandomWalkInit r) {
  return r == RandomWalkInit::kOmega ? "omega" : "zero";
}

Variant parse_variant(std::string_view s) {
  if (s == "static") return Variant::kStatic;
  if (s == "mean-reverting") return Variant::kMeanReverting;
  if (s == "random-walk") return Variant::kRandomWalk;
  throw InvalidArgument("unknown variant '" + std::string(s) +
                        "' (expected static, mean-reverting or random-walk)");
}

AbsentMode parse_absent_mode(std::string_view s) {
  if (s == "partial-likelihood") return AbsentMode::kPartialLikelihood;
  if (s == "zero-score") return AbsentMode::kZeroScore;
  throw InvalidArgument("unknown absent mode '" + std::string(s) +
                        "' (expected partial-likelihood or zero-score)");
}

RandomWalkInit parse_random_walk_init(std::string_view s) {
  if (s == "omega") return RandomWalkInit::kOmega;
  if (s == "zero") return RandomWalkInit::kZero;
  throw InvalidArgument("unknown random-walk initialization '" + std::string(s) +
                        "' (expected omega or zero)");
}

ModelSpec ModelSpec::make(Variant variant, std::size_t universe_size,
                          std::size_t covariate_count, AbsentMode absent_mode) {
  ModelSpec spec;
  spec.universe_size = universe_size;
  spec.covariate_count = covariate_count;
  spec.variant = variant;
  spec.absent_mode = absent_mode;
  if (variant != Variant::kStatic) {
    spec.score_order = 1;
    spec.ar_order = 1;
  }
  return spec;
}

void ModelSpec::validate() const {
  if (universe_size == 0) throw InvalidArgument("model has no items");
  switch (variant) {
    case Variant::kStatic:
      if (score_order != 0 || ar_order != 0) {
        throw InvalidArgument("static variant requires P = Q = 0");
      }
      break;
    case Variant::kMeanReverting:
      if (score_order < 1 || ar_order < 1) {
        throw InvalidArgument("mean-reverting variant requires P >= 1 and Q >= 1");
      }
      break;
    case Variant::kRandomWalk:
      if (score_order < 1 || ar_order != 1) {
        throw InvalidArgument("random-walk variant requires P >= 1 and Q = 1");
      }
      break;
  }
  if (initial_worth) {
    if (initial_worth->size() != universe_size) {
      throw DimensionMismatch("initial worth override must have one entry per item");
    }
    for (double f : *initial_worth) {
      if (!std::isfinite(f)) throw InvalidArgument("initial worth is not finite");
    }
  }
}

std::size_t ModelSpec::free_parameter_count() const {
  const std::size_t k = universe_size + covariate_count + score_order + ar_order - 1;
  return variant == Variant::kRandomWalk ? k - ar_order : k;
}

void ParameterVector::validate(const ModelSpec& spec) const {
  if (omega.size() != spec.universe_size || beta.size() != spec.covariate_count ||
      alpha.size() != spec.score_order || phi.size() != spec.ar_order) {
    throw DimensionMismatch(
        "parameter vector dimensions (omega " + std::to_string(omega.size()) +
        ", beta " + std::to_string(beta.size()) + ", alpha " +
        std::to_string(alpha.size()) + ", phi " + std::to_string(phi.size()) +
        ") do not match the model (N " + std::to_string(spec.universe_size) + ", M " +
        std::to_string(spec.covariate_count) + ", P " + std::to_string(spec.score_order) +
        ", Q " + std::to_string(spec.ar_order) + ")");
  }
  auto finite = [](const std::vector<double>& v) {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  };
  if (!finite(omega) || !finite(beta) || !finite(alpha) || !finite(phi)) {
    throw InvalidArgument("parameter vector contains non-finite values");
  }
  const double sum = std::accumulate(omega.begin(), omega.end(), 0.0);
  double scale = 1.0;
  for (double w : omega) scale = std::max(scale, std::abs(w));
  if (std::abs(sum) > 1e-9 * scale * static_cast<double>(omega.size())) {
    throw InvalidArgument("omega must sum to zero (sum = " + std::to_string(sum) + ")");
  }
  if (spec.variant == Variant::kRandomWalk && phi.size() == 1 && phi[0] != 1.0) {
    throw InvalidArgument("random-walk variant fixes phi_1 = 1");
  }
}

std::vector<double> pack(const ParameterVector& params, const ModelSpec& spec) {
  std::vector<double> free;
  free.reserve(spec.free_parameter_count());
  free.insert(free.end(), params.omega.begin(), params.omega.end() - 1);
  free.insert(free.end(), params.beta.begin(), params.beta.end());
  free.insert(free.end(), params.alpha.begin(), params.alpha.end());
  if (spec.estimates_phi()) free.insert(free.end(), params.phi.begin(), params.phi.end());
  return free;
}

ParameterVector unpack(std::span<const double> free, const ModelSpec& spec) {
  if (free.size() != spec.free_parameter_count()) {
    throw DimensionMismatch("expected " + std::to_string(spec.free_parameter_count()) +
                            " free parameters, got " + std::to_string(free.size()));
  }
  const std::size_t n = spec.universe_size;
  ParameterVector p;
  auto it = free.begin();
  p.omega.assign(it, it + static_cast<std::ptrdiff_t>(n - 1));
  it += static_cast<std::ptrdiff_t>(n - 1);
  double last = 0.0;
  for (double w : p.omega) last -= w;
  p.omega.push_back(last);
  p.beta.assign(it, it + static_cast<std::ptrdiff_t>(spec.covariate_count));
  it += static_cast<std::ptrdiff_t>(spec.covariate_count);
  p.alpha.assign(it, it + static_cast<std::ptrdiff_t>(spec.score_order));
  it += static_cast<std::ptrdiff_t>(spec.score_order);
  if (spec.estimates_phi()) {
    p.phi.assign(it, it + static_cast<std::ptrdiff_t>(spec.ar_order));
  } else if (spec.variant == Variant::kRandomWalk) {
    p.phi.assign(spec.ar_order, 1.0);
  }
  return p;
}

std::vector<std::string> free_parameter_names(const ModelSpec& spec,
                                              std::span<const std::string> item_labels,
                                              std::span<const std::string> covariate_names) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i + 1 < spec.universe_size; ++i) {
    names.push_back("omega[" +
                    (i < item_labels.size() ? item_labels[i] : std::to_string(i + 1)) + "]");
  }
  for (std::size_t j = 0; j < spec.covariate_count; ++j) {
    names.push_back("beta[" +
                    (j < covariate_names.size() ? covariate_names[j] : std::to_string(j + 1)) +
                    "]");
  }
  for (std::size_t k = 0; k < spec.score_order; ++k) {
    names.push_back("alpha_" + std::to_string(k + 1));
  }
  if (spec.estimates_phi()) {
    for (std::size_t l = 0; l < spec.ar_order; ++l) {
      names.push_back("phi_" + std::to_string(l + 1));
    }
  }
  return names;
}

void PanelDataset::validate() const {
  if (universe_size == 0) throw DataError("dataset has no items");
  if (rankings.empty()) throw DataError("dataset has no periods");
  for (std::size_t t = 0; t < rankings.size(); ++t) {
    if (rankings[t].universe_size() != universe_size) {
      throw DataError("ranking of period " + std::to_string(t + 1) +
                      " has universe size " + std::to_string(rankings[t].universe_size()) +
                      ", expected " + std::to_string(universe_size));
    }
  }
  if (covariates.size() != rankings.size() * universe_size * covariate_count) {
    throw DataError("covariate array has " + std::to_string(covariates.size()) +
                    " values, expected T * N * M = " +
                    std::to_string(rankings.size() * universe_size * covariate_count));
  }
  for (double x : covariates) {
    if (!std::isfinite(x)) throw DataError("covariate value is not finite");
  }
  if (!item_labels.empty() && item_labels.size() != universe_size) {
    throw DataError("item label count does not match universe size");
  }
  if (!period_labels.empty() && period_labels.size() != rankings.size()) {
    throw DataError("period label count does not match period count");
  }
  if (!covariate_names.empty() && covariate_names.size() != covariate_count) {
    throw DataError("covariate name count does not match covariate count");
  }
}

void PanelDataset::check_compatible(const ModelSpec& spec) const {
  if (spec.universe_size != universe_size) {
    throw DimensionMismatch("model has " + std::to_string(spec.universe_size) +
                            " items but the dataset has " + std::to_string(universe_size));
  }
  if (spec.covariate_count != covariate_count) {
    throw DimensionMismatch("model has " + std::to_string(spec.covariate_count) +
                            " covariates but the dataset has " +
                            std::to_string(covariate_count));
  }
}

}  // namespace gasrank
