#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gasrank/simulation.hpp"

namespace gasrank {
namespace {

TEST(DesignOmega, TenItemGrid) {
  const auto w = design_omega(10);
  ASSERT_EQ(w.size(), 10u);
  EXPECT_DOUBLE_EQ(w.front(), -2.0);
  EXPECT_NEAR(w[1], -1.556, 1e-3);
  EXPECT_DOUBLE_EQ(w.back(), 2.0);
  double s = 0.0;
  for (double v : w) s += v;
  EXPECT_NEAR(s, 0.0, 1e-14);
}

TEST(DesignParameters, PerVariant) {
  const auto mr = design_parameters(ModelSpec::make(Variant::kMeanReverting, 4, 2));
  EXPECT_EQ(mr.beta, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(mr.alpha, std::vector<double>{0.4});
  EXPECT_EQ(mr.phi, std::vector<double>{0.5});
  EXPECT_EQ(design_parameters(ModelSpec::make(Variant::kRandomWalk, 4)).phi,
            std::vector<double>{1.0});
  EXPECT_TRUE(design_parameters(ModelSpec::make(Variant::kStatic, 4)).alpha.empty());
}

TEST(SimulatePanel, StaticLimitMatchesFirstPlaceProbabilities) {
  const ModelSpec spec = ModelSpec::make(Variant::kMeanReverting, 5, 1);
  const ParameterVector p{{-1.0, -0.5, 0.0, 0.5, 1.0}, {0.0}, {0.0}, {0.0}};
  Rng rng(21);
  const std::size_t periods = 50000;
  const auto panel = simulate_panel(p, spec, periods, rng, {.top = 1});
  std::vector<double> counts(5, 0.0);
  for (const Ranking& r : panel.data.rankings) counts[r.ordering()[0]] += 1.0;
  double z = 0.0;
  for (double w : p.omega) z += std::exp(w);
  for (std::size_t i = 0; i < 5; ++i) {
    const double prob = std::exp(p.omega[i]) / z;
    const double se = std::sqrt(prob * (1.0 - prob) / periods);
    EXPECT_NEAR(counts[i] / periods, prob, 4.0 * se);
  }
}

TEST(SimulatePanel, ShapesLabelsAndDeterminism) {
  const ModelSpec spec = ModelSpec::make(Variant::kMeanReverting, 12, 2);
  Rng a(5), b(5);
  const auto x = simulate_panel(design_parameters(spec), spec, 7, a, {.top = 4});
  const auto y = simulate_panel(design_parameters(spec), spec, 7, b, {.top = 4});
  EXPECT_EQ(x.data, y.data);
  EXPECT_EQ(x.latent_worth, y.latent_worth);
  EXPECT_EQ(x.data.period_count(), 7u);
  EXPECT_EQ(x.data.rankings[0].ranked_count(), 4u);
  EXPECT_EQ(x.data.item_labels.front(), "item01");
  EXPECT_EQ(x.data.covariate_names[1], "x2");
  EXPECT_EQ(x.data.covariates.size(), 7u * 12u * 2u);
  EXPECT_NO_THROW(x.data.validate());
}

TEST(ReplicationSeed, DependsOnAllComponents) {
  const auto s = replication_seed(1, 2, 3);
  EXPECT_EQ(s, replication_seed(1, 2, 3));
  EXPECT_NE(s, replication_seed(2, 2, 3));
  EXPECT_NE(s, replication_seed(1, 3, 3));
  EXPECT_NE(s, replication_seed(1, 2, 4));
}

TEST(ReplicationStudy, OracleModeHasZeroErrorAndNoCoverage) {
  SimulationDesign d;
  d.item_counts = {5};
  d.horizons = {10};
  d.replications = 1;
  d.oracle = true;
  const StudyReport rep = replication_study(d);
  ASSERT_EQ(rep.cells.size(), 4u);
  for (const StudyCell& c : rep.cells) {
    EXPECT_EQ(c.mae, 0.0);
    EXPECT_TRUE(std::isnan(c.coverage));
    EXPECT_EQ(c.n_success, 1u);
  }
}

TEST(ReplicationStudy, ReproducibleAcrossThreadCounts) {
  SimulationDesign d;
  d.item_counts = {5};
  d.horizons = {15, 30};
  d.replications = 4;
  d.threads = 1;
  OptimizerConfig cfg;
  cfg.restart_count = 1;
  const StudyReport one = replication_study(d, cfg);
  d.threads = 3;
  const StudyReport three = replication_study(d, cfg);
  ASSERT_EQ(one.cells.size(), 8u);
  for (std::size_t k = 0; k < one.cells.size(); ++k) {
    EXPECT_EQ(one.cells[k].mae, three.cells[k].mae);
    EXPECT_EQ(one.cells[k].n_success + one.cells[k].n_fail, 4u);
    const double cov = one.cells[k].coverage;
    EXPECT_TRUE(std::isnan(cov) || (cov >= 0.0 && cov <= 1.0));
    EXPECT_GE(one.cells[k].mae, 0.0);
  }
  EXPECT_EQ(&one.at(5, 30, ParameterGroup::kPhi), &one.cells[7]);

  std::ostringstream csv;
  write_study_csv(csv, one);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "N,T,param_group,mae,coverage,n_success,n_fail");
}

}  // namespace
}  // namespace gasrank
