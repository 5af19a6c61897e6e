#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "gasrank/matrix.hpp"
#include "gasrank/ranking.hpp"

namespace gasrank {

using Rng = std::mt19937_64;

// Largest universe for which fisher_information will enumerate all N!
// permutations.
inline constexpr std::size_t kMaxEnumerationUniverse = 8;

// Plackett-Luce log-probability of a complete or top-k ranking. Unranked items
// stay in every stage's denominator.
double log_pmf(const Ranking& ranking, std::span<const double> worth);

// Gradient of log_pmf with respect to the worths. Entries sum to zero.
WorthVector score(const Ranking& ranking, std::span<const double> worth);

// Sequential selection: at each stage an unchosen item is picked with
// probability proportional to exp(worth). Stops after `top` stages.
Ranking sample(std::span<const double> worth, std::size_t top, Rng& rng);

// E[score score'] by enumeration of all complete permutations. Only usable as a
// reference; cost is N! * N^2.
Matrix fisher_information(std::span<const double> worth);

namespace detail {

// Shared kernel for log_pmf/score and the filter's inner loop.
//
// `ordering` are the ranked items best first, `pool` the unranked items that
// remain in every denominator (may be empty). Writes the score of each item in
// ordering and pool into `score_out` (indexed by item; other entries are left
// untouched) unless `score_out` is empty. `scratch` is resized as needed.
// No validation is performed.
double evaluate(std::span<const double> worth,
                std::span<const std::size_t> ordering,
                std::span<const std::size_t> pool,
                std::span<double> score_out,
                std::vector<double>& scratch);

// Same as evaluate but always uses the log-space recursion, never the
// shifted-exponential fast path. Exposed for testing.
double evaluate_log_space(std::span<const double> worth,
                          std::span<const std::size_t> ordering,
                          std::span<const std::size_t> pool,
                          std::span<double> score_out,
                          std::vector<double>& scratch);

// Validates shapes and finiteness, throwing DimensionMismatch/InvalidArgument.
void check_worth(const Ranking& ranking, std::span<const double> worth);

}  // namespace detail
}  // namespace gasrank
