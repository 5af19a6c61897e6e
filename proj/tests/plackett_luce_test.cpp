#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "gasrank/error.hpp"
#include "gasrank/plackett_luce.hpp"
#include "support/oracles.hpp"

namespace gasrank {
namespace {

std::vector<double> random_worth(std::size_t n, Rng& rng, double scale = 1.5) {
  std::normal_distribution<double> z(0.0, scale);
  std::vector<double> f(n);
  for (double& v : f) v = z(rng);
  return f;
}

TEST(LogPmf, UniformWorthsGiveUniformPermutations) {
  EXPECT_NEAR(log_pmf(Ranking::complete({0, 1, 2}), std::vector<double>{0, 0, 0}),
              std::log(1.0 / 6.0), 1e-12);
}

TEST(LogPmf, TwoItemsReduceToBradleyTerry) {
  EXPECT_NEAR(log_pmf(Ranking::complete({0, 1}), std::vector<double>{std::log(3.0), 0.0}),
              std::log(0.75), 1e-14);
}

TEST(LogPmf, PartialFirstPlaceIsSymmetric) {
  EXPECT_NEAR(log_pmf(Ranking(3, {1}), std::vector<double>{0, 0, 0}), std::log(1.0 / 3.0),
              1e-14);
}

TEST(LogPmf, MatchesExtendedPrecisionProduct) {
  const std::vector<double> f{0.5, -0.2, 1.1, 0.0, -1.4};
  oracle::for_each_permutation(5, [&](const std::vector<std::size_t>& perm) {
    const double expected = std::log(static_cast<double>(oracle::pl_probability(perm, f)));
    EXPECT_NEAR(log_pmf(Ranking::complete(perm), f), expected, 1e-12);
  });
}

TEST(LogPmf, NormalizesOverAllPermutations) {
  Rng rng(11);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto f = random_worth(n, rng);
    double total = 0.0;
    oracle::for_each_permutation(n, [&](const std::vector<std::size_t>& perm) {
      total += std::exp(log_pmf(Ranking::complete(perm), f));
    });
    EXPECT_NEAR(total, 1.0, 1e-10) << "n=" << n;
  }
}

TEST(LogPmf, PartialRankingIsMarginalOfCompleteOnes) {
  Rng rng(12);
  const std::size_t n = 5;
  const auto f = random_worth(n, rng);
  const std::vector<std::size_t> prefix{3, 0};
  double marginal = 0.0;
  oracle::for_each_permutation(n, [&](const std::vector<std::size_t>& perm) {
    if (perm[0] == prefix[0] && perm[1] == prefix[1]) {
      marginal += std::exp(log_pmf(Ranking::complete(perm), f));
    }
  });
  EXPECT_NEAR(std::exp(log_pmf(Ranking(n, prefix), f)), marginal, 1e-12);
}

TEST(LogPmf, ShiftInvariant) {
  Rng rng(13);
  const auto f = random_worth(6, rng);
  const Ranking r(6, {4, 2, 5});
  for (double c : {-300.0, -1.0, 2.5, 400.0}) {
    auto g = f;
    for (double& v : g) v += c;
    EXPECT_NEAR(log_pmf(r, g), log_pmf(r, f), 1e-10);
  }
}

TEST(LogPmf, StableForExtremeWorths) {
  const std::vector<double> f{700.0, -700.0, 0.0};
  const double lp = log_pmf(Ranking::complete({1, 2, 0}), f);
  EXPECT_TRUE(std::isfinite(lp));
  EXPECT_NEAR(lp, -1400.0 - 700.0, 1e-9);
  EXPECT_NEAR(log_pmf(Ranking::complete({0, 2, 1}), f), 0.0, 1e-12);
}

TEST(LogPmf, FastPathAndLogSpaceAgree) {
  Rng rng(14);
  std::vector<double> scratch;
  for (int rep = 0; rep < 20; ++rep) {
    const auto f = random_worth(7, rng, 3.0);
    const Ranking r = sample(f, 4, rng);
    std::vector<double> s1(7, 0.0), s2(7, 0.0);
    const double a = detail::evaluate(f, r.ordering(), r.unranked(), s1, scratch);
    const double b = detail::evaluate_log_space(f, r.ordering(), r.unranked(), s2, scratch);
    EXPECT_NEAR(a, b, 1e-12);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(s1[i], s2[i], 1e-12);
  }
}

TEST(LogPmf, RejectsBadInput) {
  EXPECT_THROW(log_pmf(Ranking::complete({0, 1}), std::vector<double>{0, 0, 0}),
               DimensionMismatch);
  EXPECT_THROW(log_pmf(Ranking::complete({0, 1}), std::vector<double>{0, NAN}),
               InvalidArgument);
}

TEST(Score, SymmetricPair) {
  const auto s = score(Ranking::complete({0, 1}), std::vector<double>{0, 0});
  EXPECT_NEAR(s[0], 0.5, 1e-15);
  EXPECT_NEAR(s[1], -0.5, 1e-15);
}

TEST(Score, EqualWorthsCompleteRanking) {
  const auto s = score(Ranking::complete({0, 1, 2}), std::vector<double>{0, 0, 0});
  EXPECT_NEAR(s[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s[1], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(s[2], -5.0 / 6.0, 1e-15);
}

TEST(Score, EqualWorthsSingleStage) {
  const auto s = score(Ranking(3, {0}), std::vector<double>{0, 0, 0});
  EXPECT_NEAR(s[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s[1], -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s[2], -1.0 / 3.0, 1e-15);
}

TEST(Score, MatchesFiniteDifferencesAndSumsToZero) {
  Rng rng(15);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 6;
    const auto f = random_worth(n, rng);
    const std::size_t top = 1 + rep % n;
    const Ranking r = sample(f, top, rng);
    const auto s = score(r, f);
    const auto fd = oracle::fd_gradient(
        [&](const std::vector<double>& x) { return log_pmf(r, x); }, f, 1e-6);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(s[i], fd[i], 1e-6);
      sum += s[i];
    }
    EXPECT_NEAR(sum, 0.0, 1e-12 * n);
  }
}

TEST(Score, ZeroMeanUnderTheModel) {
  Rng rng(16);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto f = random_worth(n, rng);
    std::vector<double> mean(n, 0.0);
    oracle::for_each_permutation(n, [&](const std::vector<std::size_t>& perm) {
      const Ranking r = Ranking::complete(perm);
      const double p = std::exp(log_pmf(r, f));
      const auto s = score(r, f);
      for (std::size_t i = 0; i < n; ++i) mean[i] += p * s[i];
    });
    for (double m : mean) EXPECT_NEAR(m, 0.0, 1e-10);
  }
}

TEST(Sample, SingleItem) {
  Rng rng(1);
  const Ranking r = sample(std::vector<double>{3.0}, 1, rng);
  EXPECT_EQ(r.ordering()[0], 0u);
}

TEST(Sample, UniformWorthsGiveUniformPermutations) {
  Rng rng(2);
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 60000;
  for (int d = 0; d < draws; ++d) {
    const Ranking r = sample(std::vector<double>{0, 0, 0}, 3, rng);
    counts[{r.ordering().begin(), r.ordering().end()}]++;
  }
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [perm, c] : counts) EXPECT_NEAR(c / double(draws), 1.0 / 6.0, 0.01);
}

TEST(Sample, EmpiricalPmfMatchesEnumeration) {
  Rng rng(3);
  const std::vector<double> f{1.0, 0.0, -1.0, 0.0};
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 200000;
  for (int d = 0; d < draws; ++d) {
    const Ranking r = sample(f, 4, rng);
    counts[{r.ordering().begin(), r.ordering().end()}]++;
  }
  oracle::for_each_permutation(4, [&](const std::vector<std::size_t>& perm) {
    const double p = std::exp(log_pmf(Ranking::complete(perm), f));
    const double se = std::sqrt(p * (1.0 - p) / draws);
    EXPECT_NEAR(counts[perm] / double(draws), p, 3.0 * se);
  });
}

TEST(Sample, TopTruncatesAndValidates) {
  Rng rng(4);
  const Ranking r = sample(std::vector<double>{0, 1, 2, 3}, 2, rng);
  EXPECT_EQ(r.ranked_count(), 2u);
  EXPECT_THROW(sample(std::vector<double>{0, 1}, 3, rng), InvalidArgument);
  EXPECT_THROW(sample(std::vector<double>{0, 1}, 0, rng), InvalidArgument);
}

TEST(Fisher, TwoEqualItems) {
  const Matrix m = fisher_information(std::vector<double>{0, 0});
  EXPECT_NEAR(m(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(m(0, 1), -0.25, 1e-15);
  EXPECT_NEAR(m(1, 1), 0.25, 1e-15);
}

TEST(Fisher, RowSumsVanishAndSymmetric) {
  Rng rng(5);
  for (std::size_t n = 2; n <= 5; ++n) {
    const Matrix m = fisher_information(random_worth(n, rng));
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += m(i, j);
      EXPECT_NEAR(row, 0.0, 1e-12);
    }
    EXPECT_LT(m.asymmetry(), 1e-14);
  }
}

TEST(Fisher, EqualsNegativeExpectedHessian) {
  Rng rng(6);
  const std::size_t n = 4;
  const auto f = random_worth(n, rng);
  const Matrix fisher = fisher_information(f);
  // -E[d2 log p / df df'] by finite differences of the score, enumerated.
  const double h = 1e-5;
  Matrix neg_hessian(n, n, 0.0);
  oracle::for_each_permutation(n, [&](const std::vector<std::size_t>& perm) {
    const Ranking r = Ranking::complete(perm);
    const double p = std::exp(log_pmf(r, f));
    for (std::size_t j = 0; j < n; ++j) {
      auto up = f, down = f;
      up[j] += h;
      down[j] -= h;
      const auto su = score(r, up), sd = score(r, down);
      for (std::size_t i = 0; i < n; ++i) {
        neg_hessian(i, j) -= p * (su[i] - sd[i]) / (2.0 * h);
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(fisher(i, j), neg_hessian(i, j), 1e-6);
  }
}

TEST(Fisher, RefusesLargeUniverse) {
  EXPECT_THROW(fisher_information(std::vector<double>(kMaxEnumerationUniverse + 1, 0.0)),
               EnumerationLimit);
}

}  // namespace
}  // namespace gasrank
