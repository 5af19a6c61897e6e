#include "gasrank/plackett_luce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gasrank/error.hpp"

namespace gasrank {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Above this spread of worths the shifted exponentials can underflow in late
// stages, so the log-space recursion takes over.
constexpr double kFastPathSpread = 600.0;

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

namespace detail {

void check_worth(const Ranking& ranking, std::span<const double> worth) {
  if (worth.size() != ranking.universe_size()) {
    throw DimensionMismatch("worth vector has " + std::to_string(worth.size()) +
                            " entries but the ranking universe has " +
                            std::to_string(ranking.universe_size()));
  }
  for (std::size_t i = 0; i < worth.size(); ++i) {
    if (!std::isfinite(worth[i])) {
      throw InvalidArgument("worth of item " + std::to_string(i) + " is not finite");
    }
  }
}

double evaluate_log_space(std::span<const double> worth,
                          std::span<const std::size_t> ordering,
                          std::span<const std::size_t> pool,
                          std::span<double> score_out, std::vector<double>& scratch) {
  const std::size_t n = ordering.size();
  scratch.resize(n);

  // log of the pool sum, then suffix log-sum-exp over the ordering.
  double tail = kNegInf;
  if (!pool.empty()) {
    double hi = kNegInf;
    for (std::size_t l : pool) hi = std::max(hi, worth[l]);
    double sum = 0.0;
    for (std::size_t l : pool) sum += std::exp(worth[l] - hi);
    tail = hi + std::log(sum);
  }
  double log_prob = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    tail = log_add_exp(tail, worth[ordering[j]]);
    scratch[j] = tail;
    log_prob += worth[ordering[j]] - tail;
  }

  if (!score_out.empty()) {
    // acc = log sum_{j' <= j} exp(-L_j')
    double acc = kNegInf;
    for (std::size_t j = 0; j < n; ++j) {
      acc = log_add_exp(acc, -scratch[j]);
      score_out[ordering[j]] = 1.0 - std::exp(worth[ordering[j]] + acc);
    }
    for (std::size_t l : pool) score_out[l] = -std::exp(worth[l] + acc);
  }
  return log_prob;
}

double evaluate(std::span<const double> worth, std::span<const std::size_t> ordering,
                std::span<const std::size_t> pool, std::span<double> score_out,
                std::vector<double>& scratch) {
  const std::size_t n = ordering.size();
  double hi = kNegInf;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i : ordering) {
    hi = std::max(hi, worth[i]);
    lo = std::min(lo, worth[i]);
  }
  for (std::size_t l : pool) {
    hi = std::max(hi, worth[l]);
    lo = std::min(lo, worth[l]);
  }
  if (hi - lo > kFastPathSpread) {
    return evaluate_log_space(worth, ordering, pool, score_out, scratch);
  }

  // scratch: [0, n) stage denominators, [n, 2n) ranked exps, [2n, ...) pool exps
  scratch.resize(2 * n + pool.size());
  double* denom = scratch.data();
  double* ranked = denom + n;
  double* pooled = ranked + n;

  double tail = 0.0;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    pooled[k] = std::exp(worth[pool[k]] - hi);
    tail += pooled[k];
  }
  double log_prob = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    ranked[j] = std::exp(worth[ordering[j]] - hi);
    tail += ranked[j];
    denom[j] = tail;
    log_prob += worth[ordering[j]] - hi - std::log(tail);
  }

  if (!score_out.empty()) {
    double cumulative = 0.0;  // sum_{j' <= j} 1 / denom_j'
    for (std::size_t j = 0; j < n; ++j) {
      cumulative += 1.0 / denom[j];
      score_out[ordering[j]] = 1.0 - ranked[j] * cumulative;
    }
    for (std::size_t k = 0; k < pool.size(); ++k) {
      score_out[pool[k]] = -pooled[k] * cumulative;
    }
  }
  return log_prob;
}

}  // namespace detail

double log_pmf(const Ranking& ranking, std::span<const double> worth) {
  detail::check_worth(ranking, worth);
  std::vector<double> scratch;
  return detail::evaluate(worth, ranking.ordering(), ranking.unranked(), {}, scratch);
}

WorthVector score(const Ranking& ranking, std::span<const double> worth) {
  detail::check_worth(ranking, worth);
  WorthVector out(worth.size(), 0.0);
  std::vector<double> scratch;
  detail::evaluate(worth, ranking.ordering(), ranking.unranked(), out, scratch);
  return out;
}

Ranking sample(std::span<const double> worth, std::size_t top, Rng& rng) {
  const std::size_t n = worth.size();
  if (n == 0) throw InvalidArgument("cannot sample from an empty universe");
  if (top == 0 || top > n) {
    throw InvalidArgument("sample depth " + std::to_string(top) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  for (double f : worth) {
    if (!std::isfinite(f)) throw InvalidArgument("worth is not finite");
  }

  const double hi = *std::max_element(worth.begin(), worth.end());
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) weight[i] = std::exp(worth[i] - hi);

  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<std::size_t> ordering;
  ordering.reserve(top);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t stage = 0; stage < top; ++stage) {
    double total = 0.0;
    for (std::size_t i : remaining) total += weight[i];
    if (total < 1e-250) {
      // Every remaining weight underflowed; rescale against the remaining max.
      double rem_hi = -std::numeric_limits<double>::infinity();
      for (std::size_t i : remaining) rem_hi = std::max(rem_hi, worth[i]);
      total = 0.0;
      for (std::size_t i : remaining) {
        weight[i] = std::exp(worth[i] - rem_hi);
        total += weight[i];
      }
    }
    const double u = unit(rng) * total;
    std::size_t pick = remaining.size() - 1;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      cumulative += weight[remaining[k]];
      if (u < cumulative) {
        pick = k;
        break;
      }
    }
    ordering.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return Ranking(n, std::move(ordering));
}

Matrix fisher_information(std::span<const double> worth) {
  const std::size_t n = worth.size();
  if (n == 0) throw InvalidArgument("empty worth vector");
  if (n > kMaxEnumerationUniverse) {
    throw EnumerationLimit("Fisher information enumerates N! rankings; N = " +
                           std::to_string(n) + " exceeds the limit of " +
                           std::to_string(kMaxEnumerationUniverse));
  }
  for (double f : worth) {
    if (!std::isfinite(f)) throw InvalidArgument("worth is not finite");
  }

  Matrix info(n, n);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<double> s(n);
  std::vector<double> scratch;
  do {
    const double p = std::exp(detail::evaluate(worth, perm, {}, s, scratch));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) info(i, j) += p * s[i] * s[j];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return info;
}

}  // namespace gasrank
