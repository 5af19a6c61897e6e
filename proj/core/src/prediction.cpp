#include "gasrank/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gasrank/error.hpp"

namespace gasrank {
namespace {

// Participant worths shifted by their maximum, exponentiated.
std::vector<double> participant_weights(std::span<const double> worth,
                                        std::span<const std::size_t> participants) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i : participants) hi = std::max(hi, worth[i]);
  std::vector<double> w;
  w.reserve(participants.size());
  for (std::size_t i : participants) w.push_back(std::exp(worth[i] - hi));
  return w;
}

std::size_t local_index(std::span<const std::size_t> participants, std::size_t item) {
  return static_cast<std::size_t>(
      std::find(participants.begin(), participants.end(), item) - participants.begin());
}

double exact_ordering_probability(std::span<const double> worth, const RankingEvent& event) {
  const auto& part = event.participants;
  std::vector<double> sub(part.size());
  for (std::size_t k = 0; k < part.size(); ++k) sub[k] = worth[part[k]];
  std::vector<std::size_t> ordering;
  std::vector<char> used(part.size(), 0);
  for (std::size_t item : event.ordering) {
    const std::size_t k = local_index(part, item);
    ordering.push_back(k);
    used[k] = 1;
  }
  std::vector<std::size_t> pool;
  for (std::size_t k = 0; k < part.size(); ++k) {
    if (!used[k]) pool.push_back(k);
  }
  std::vector<double> scratch;
  return std::exp(detail::evaluate(sub, ordering, pool, {}, scratch));
}

// Depth-first walk over ordered prefixes of the other participants. Each call
// returns the probability of the event conditional on the current prefix,
// dividing by the remaining weight once per level. Accumulating in long double
// keeps simple cases such as 3/4 for equal worths exact after rounding.
struct PrefixEnumerator {
  const std::vector<double>& w;
  std::size_t target;
  std::size_t depth_limit;  // the event is decided within this many places
  bool exact_rank;          // count the target only at place depth_limit
  std::vector<char> used;

  long double conditional(std::size_t depth) {
    long double remaining = 0.0L;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (!used[k]) remaining += w[k];
    }
    const bool last = depth + 1 == depth_limit;
    long double mass = !exact_rank || last ? w[target] : 0.0L;
    if (!last) {
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (used[k] || k == target) continue;
        used[k] = 1;
        mass += w[k] * conditional(depth + 1);
        used[k] = 0;
      }
    }
    return mass / remaining;
  }
};

}  // namespace

WorthVector predict_worth(const FitResult& fit, const Matrix& next_covariates) {
  const ModelSpec& spec = fit.spec;
  const ParameterVector& p = fit.params;
  const std::size_t n = spec.universe_size;
  const std::size_t m = spec.covariate_count;
  const bool no_covariates = m == 0 && (next_covariates.rows() == 0 || next_covariates.cols() == 0);
  if (!no_covariates && (next_covariates.rows() != n || next_covariates.cols() != m)) {
    throw DimensionMismatch("next-period covariates must be " + std::to_string(n) + " x " +
                            std::to_string(m) + ", got " +
                            std::to_string(next_covariates.rows()) + " x " +
                            std::to_string(next_covariates.cols()));
  }
  const std::size_t periods = fit.filter.worth_path.rows();
  if (fit.filter.worth_path.cols() != n || fit.filter.presample_worth.size() != n) {
    throw InvalidArgument("fit carries no filter state");
  }

  WorthVector f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = p.omega[i];
    for (std::size_t j = 0; j < m; ++j) v += p.beta[j] * next_covariates(i, j);
    // Lag k refers to period T + 1 - k; indices before the sample use the
    // pre-sample state (zero score, pre-sample worth).
    for (std::size_t k = 1; k <= p.alpha.size(); ++k) {
      if (k <= periods) v += p.alpha[k - 1] * fit.filter.score_path(periods - k, i);
    }
    for (std::size_t l = 1; l <= p.phi.size(); ++l) {
      const double lagged = l <= periods ? fit.filter.worth_path(periods - l, i)
                                         : fit.filter.presample_worth[i];
      v += p.phi[l - 1] * lagged;
    }
    f[i] = v;
  }
  return f;
}

std::vector<std::size_t> predicted_ranking(std::span<const double> worth,
                                           std::span<const std::size_t> participants) {
  std::vector<std::size_t> out(participants.begin(), participants.end());
  for (std::size_t i : out) {
    if (i >= worth.size()) throw InvalidArgument("participant outside the worth vector");
  }
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    if (worth[a] != worth[b]) return worth[a] > worth[b];
    return a < b;
  });
  return out;
}

RankingEvent RankingEvent::exact_ordering(std::vector<std::size_t> participants,
                                          std::vector<std::size_t> ordering) {
  RankingEvent e;
  e.participants = std::move(participants);
  e.kind = Kind::kExactOrdering;
  e.ordering = std::move(ordering);
  return e;
}

RankingEvent RankingEvent::top_k(std::vector<std::size_t> participants, std::size_t item,
                                 std::size_t k) {
  RankingEvent e;
  e.participants = std::move(participants);
  e.kind = Kind::kTopK;
  e.item = item;
  e.position = k;
  return e;
}

RankingEvent RankingEvent::at_rank(std::vector<std::size_t> participants, std::size_t item,
                                   std::size_t rank) {
  RankingEvent e;
  e.participants = std::move(participants);
  e.kind = Kind::kAtRank;
  e.item = item;
  e.position = rank;
  return e;
}

void RankingEvent::validate(std::size_t universe_size) const {
  if (participants.empty()) throw InvalidArgument("event has no participants");
  std::vector<char> seen(universe_size, 0);
  for (std::size_t i : participants) {
    if (i >= universe_size) throw InvalidArgument("participant outside the item universe");
    if (seen[i]) throw InvalidArgument("participant listed twice");
    seen[i] = 1;
  }
  if (kind == Kind::kExactOrdering) {
    if (ordering.empty() || ordering.size() > participants.size()) {
      throw InvalidArgument("ordering event must name between 1 and |participants| items");
    }
    std::vector<char> used(universe_size, 0);
    for (std::size_t i : ordering) {
      if (i >= universe_size || !seen[i]) {
        throw InvalidArgument("ordering event references a non-participant");
      }
      if (used[i]) throw InvalidArgument("ordering event lists an item twice");
      used[i] = 1;
    }
    return;
  }
  if (item >= universe_size || !seen[item]) {
    throw InvalidArgument("event references a non-participant");
  }
  if (position < 1 || position > participants.size()) {
    throw InvalidArgument("event position must lie in [1, |participants|]");
  }
}

std::uint64_t ordered_tuple_count(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t factor = n - i;
    if (count > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= factor;
  }
  return count;
}

double event_probability_exact(std::span<const double> worth, const RankingEvent& event) {
  event.validate(worth.size());
  if (event.kind == RankingEvent::Kind::kExactOrdering) {
    return exact_ordering_probability(worth, event);
  }
  const std::size_t n = event.participants.size();
  if (event.kind == RankingEvent::Kind::kTopK && event.position == n) return 1.0;
  if (ordered_tuple_count(n, event.position) > kMaxEnumeratedTuples) {
    throw EnumerationLimit("event needs more than " + std::to_string(kMaxEnumeratedTuples) +
                           " ordered tuples");
  }
  const std::vector<double> w = participant_weights(worth, event.participants);
  PrefixEnumerator walk{w, local_index(event.participants, event.item), event.position,
                        event.kind == RankingEvent::Kind::kAtRank,
                        std::vector<char>(n, 0)};
  return std::min(1.0, static_cast<double>(walk.conditional(0)));
}

EventProbability event_probability_monte_carlo(std::span<const double> worth,
                                               const RankingEvent& event, Rng& rng,
                                               std::size_t draws) {
  event.validate(worth.size());
  if (draws == 0) throw InvalidArgument("Monte Carlo needs at least one draw");
  const auto& part = event.participants;
  std::vector<double> sub(part.size());
  for (std::size_t k = 0; k < part.size(); ++k) sub[k] = worth[part[k]];

  std::size_t depth = event.position;
  std::vector<std::size_t> local_ordering;
  if (event.kind == RankingEvent::Kind::kExactOrdering) {
    depth = event.ordering.size();
    for (std::size_t item : event.ordering) local_ordering.push_back(local_index(part, item));
  }
  const std::size_t target =
      event.kind == RankingEvent::Kind::kExactOrdering ? 0 : local_index(part, event.item);

  std::size_t hits = 0;
  for (std::size_t d = 0; d < draws; ++d) {
    const Ranking y = sample(sub, depth, rng);
    bool hit = false;
    switch (event.kind) {
      case RankingEvent::Kind::kExactOrdering:
        hit = std::equal(local_ordering.begin(), local_ordering.end(), y.ordering().begin());
        break;
      case RankingEvent::Kind::kTopK:
        hit = y.contains(target);
        break;
      case RankingEvent::Kind::kAtRank:
        hit = y.ordering()[depth - 1] == target;
        break;
    }
    hits += hit ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(draws);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(draws))};
}

EventProbability event_probability(std::span<const double> worth, const RankingEvent& event,
                                   Rng& rng, std::size_t draws) {
  event.validate(worth.size());
  const bool enumerable =
      event.kind == RankingEvent::Kind::kExactOrdering ||
      (event.kind == RankingEvent::Kind::kTopK && event.position == event.participants.size()) ||
      ordered_tuple_count(event.participants.size(), event.position) <= kMaxEnumeratedTuples;
  if (enumerable) return {event_probability_exact(worth, event), std::nullopt};
  return event_probability_monte_carlo(worth, event, rng, draws);
}

std::vector<double> winner_probabilities(std::span<const double> worth,
                                         std::span<const std::size_t> participants) {
  if (participants.empty()) throw InvalidArgument("no participants");
  for (std::size_t i : participants) {
    if (i >= worth.size()) throw InvalidArgument("participant outside the worth vector");
  }
  std::vector<double> w = participant_weights(worth, participants);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

}  // namespace gasrank
