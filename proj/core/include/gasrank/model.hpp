#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gasrank/ranking.hpp"

namespace gasrank {

enum class Variant {
  kStatic,         // P = Q = 0
  kMeanReverting,  // P, Q >= 1, phi estimated
  kRandomWalk,     // P >= 1, Q = 1, phi_1 fixed at 1
};

// How items that do not appear in a period's ranking are treated.
enum class AbsentMode {
  // Unranked items sit below the ranked ones and enter every denominator.
  kPartialLikelihood,
  // Unranked items are excluded from the period's likelihood and their score
  // is zero, so their worth only follows the deterministic recursion.
  kZeroScore,
};

// Pre-sample worth for the random-walk variant, where the unconditional worth
// is undefined.
enum class RandomWalkInit { kOmega, kZero };

std::string_view to_string(Variant v);
std::string_view to_string(AbsentMode m);
std::string_view to_string(RandomWalkInit r);
Variant parse_variant(std::string_view s);
AbsentMode parse_absent_mode(std::string_view s);
RandomWalkInit parse_random_walk_init(std::string_view s);

struct ModelSpec {
  std::size_t universe_size = 0;
  std::size_t covariate_count = 0;
  std::size_t score_order = 0;  // P
  std::size_t ar_order = 0;     // Q
  Variant variant = Variant::kMeanReverting;
  AbsentMode absent_mode = AbsentMode::kPartialLikelihood;
  RandomWalkInit random_walk_init = RandomWalkInit::kOmega;
  // Replaces the default pre-sample worth when set (length N).
  std::optional<std::vector<double>> initial_worth;

  // Canonical orders for a variant: static (0,0), otherwise (1,1).
  static ModelSpec make(Variant variant, std::size_t universe_size,
                        std::size_t covariate_count = 0,
                        AbsentMode absent_mode = AbsentMode::kPartialLikelihood);

  // Throws InvalidArgument when orders contradict the variant.
  void validate() const;

  // N + M + P + Q - 1, minus one for the random-walk variant's fixed phi.
  std::size_t free_parameter_count() const;
  bool estimates_phi() const { return variant == Variant::kMeanReverting; }
};

// omega (summing to zero), beta, alpha, phi.
struct ParameterVector {
  std::vector<double> omega;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> phi;

  void validate(const ModelSpec& spec) const;
  bool operator==(const ParameterVector&) const = default;
};

// Free parameters in the order (omega_1..omega_{N-1}, beta, alpha, phi); phi is
// omitted for the random-walk variant.
std::vector<double> pack(const ParameterVector& params, const ModelSpec& spec);
ParameterVector unpack(std::span<const double> free, const ModelSpec& spec);

// Display names of the free parameters, matching pack().
std::vector<std::string> free_parameter_names(const ModelSpec& spec,
                                              std::span<const std::string> item_labels,
                                              std::span<const std::string> covariate_names);

struct PanelDataset {
  std::size_t universe_size = 0;
  std::size_t covariate_count = 0;
  std::vector<Ranking> rankings;   // one per period
  std::vector<double> covariates;  // period-major, then item, then covariate
  std::vector<std::string> item_labels;
  std::vector<std::string> period_labels;
  std::vector<std::string> covariate_names;

  std::size_t period_count() const { return rankings.size(); }

  double covariate(std::size_t t, std::size_t i, std::size_t j) const {
    return covariates[(t * universe_size + i) * covariate_count + j];
  }
  std::span<const double> covariate_row(std::size_t t, std::size_t i) const {
    return {covariates.data() + (t * universe_size + i) * covariate_count,
            covariate_count};
  }

  // Checks ranking universes, covariate array size and finiteness, and label
  // counts. Throws DataError.
  void validate() const;

  // Matches a ModelSpec's N and M.
  void check_compatible(const ModelSpec& spec) const;

  bool operator==(const PanelDataset&) const = default;
};

}  // namespace gasrank
