#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gasrank/estimation.hpp"
#include "gasrank/matrix.hpp"
#include "gasrank/plackett_luce.hpp"

namespace gasrank {

// f_{T+1} from the fitted filter state and the next period's covariates
// (N x M). Throws DimensionMismatch on wrong covariate shape.
WorthVector predict_worth(const FitResult& fit, const Matrix& next_covariates);

// Participants sorted by worth descending, ties by index ascending.
std::vector<std::size_t> predicted_ranking(std::span<const double> worth,
                                           std::span<const std::size_t> participants);

struct RankingEvent {
  enum class Kind {
    kExactOrdering,  // `ordering` occupies the first positions in this order
    kTopK,           // `item` finishes within the first `position` places
    kAtRank,         // `item` finishes exactly at `position`
  };

  std::vector<std::size_t> participants;
  Kind kind = Kind::kTopK;
  std::vector<std::size_t> ordering;
  std::size_t item = 0;
  std::size_t position = 1;

  static RankingEvent exact_ordering(std::vector<std::size_t> participants,
                                     std::vector<std::size_t> ordering);
  static RankingEvent top_k(std::vector<std::size_t> participants, std::size_t item,
                            std::size_t k);
  static RankingEvent at_rank(std::vector<std::size_t> participants, std::size_t item,
                              std::size_t rank);

  // Throws InvalidArgument if the event references non-participants, has
  // duplicate participants, or an out-of-range position.
  void validate(std::size_t universe_size) const;
};

struct EventProbability {
  double value = 0.0;
  // Set for Monte Carlo estimates.
  std::optional<double> standard_error;
  bool exact() const { return !standard_error.has_value(); }
};

// Ordered tuples enumerated before falling back to Monte Carlo.
inline constexpr std::uint64_t kMaxEnumeratedTuples = 1'000'000;
inline constexpr std::size_t kDefaultMonteCarloDraws = 1'000'000;

// Exact when the enumeration fits under kMaxEnumeratedTuples, otherwise a
// Monte Carlo estimate drawn from `rng`.
EventProbability event_probability(std::span<const double> worth,
                                   const RankingEvent& event, Rng& rng,
                                   std::size_t draws = kDefaultMonteCarloDraws);

// Enumeration only; throws EnumerationLimit above kMaxEnumeratedTuples.
double event_probability_exact(std::span<const double> worth, const RankingEvent& event);

EventProbability event_probability_monte_carlo(std::span<const double> worth,
                                               const RankingEvent& event, Rng& rng,
                                               std::size_t draws);

// P[item wins] for every participant, in participant order.
std::vector<double> winner_probabilities(std::span<const double> worth,
                                         std::span<const std::size_t> participants);

// n! / (n - k)!, saturating at UINT64_MAX.
std::uint64_t ordered_tuple_count(std::size_t n, std::size_t k);

}  // namespace gasrank
