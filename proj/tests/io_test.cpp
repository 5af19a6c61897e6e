#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "gasrank/csv.hpp"
#include "gasrank/error.hpp"
#include "gasrank/io.hpp"
#include "gasrank/simulation.hpp"

namespace gasrank {
namespace {

PanelDataset load(const std::string& rankings, const std::string& covariates = "",
                  const RunConfig& config = {}) {
  std::istringstream r(rankings), c(covariates);
  return load_dataset(r, covariates.empty() ? nullptr : &c, config);
}

std::string error_of(const std::string& rankings, const std::string& covariates = "",
                     const RunConfig& config = {}) {
  try {
    load(rankings, covariates, config);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(Csv, QuotesCrlfAndBom) {
  std::istringstream in("\xEF\xBB\xBF" "a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n\n 3 ,4\n");
  const csv::Table t = csv::read(in, "t.csv");
  ASSERT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].fields[0], "x, y");
  EXPECT_EQ(t.rows[0].fields[1], "say \"hi\"");
  EXPECT_EQ(t.rows[1].fields[0], "3");
  EXPECT_EQ(t.rows[1].line, 4u);
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("plain"), "plain");
}

TEST(LoadDataset, SmallCompletePanel) {
  const PanelDataset d = load("time,item,rank\n1,A,1\n1,B,2\n1,C,3\n2,C,1\n2,A,2\n2,B,3\n");
  EXPECT_EQ(d.universe_size, 3u);
  EXPECT_EQ(d.period_count(), 2u);
  EXPECT_EQ(d.item_labels, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(d.rankings[1], Ranking::complete({2, 0, 1}));
}

TEST(LoadDataset, PartialParticipationAndNumericTimeOrder) {
  const PanelDataset d =
      load("time,item,rank\n10,A,1\n10,B,2\n9,C,1\n9,A,2\n2,B,1\n");
  EXPECT_EQ(d.period_labels, (std::vector<std::string>{"2", "9", "10"}));
  EXPECT_EQ(d.rankings[0], Ranking(3, {1}));
  EXPECT_EQ(d.rankings[1], Ranking(3, {2, 0}));
}

TEST(LoadDataset, ErrorsNameTheLine) {
  EXPECT_NE(error_of("time,item,rank\n1,A,1\n1,B,0\n").find(":3: "), std::string::npos);
  EXPECT_NE(error_of("time,item,rank\n1,A,1\n1,A,2\n").find(":3: "), std::string::npos);
  EXPECT_NE(error_of("time,item,rank\n1,A,1\n1,B,1\n").find(":3: "), std::string::npos);
  EXPECT_NE(error_of("time,item,rank\n1,A,1\n1,B,3\n"), "");
  EXPECT_NE(error_of("time,item,rank\n1,A,x\n").find(":2: "), std::string::npos);
  EXPECT_NE(error_of("time,item\n1,A\n"), "");
}

TEST(LoadDataset, Covariates) {
  const std::string ranks = "time,item,rank\n1,A,1\n1,B,2\n2,B,1\n2,A,2\n";
  const PanelDataset d = load(ranks,
                              "time,item,covariate,value\n1,A,home,1\n1,B,home,0\n"
                              "2,A,home,0\n2,B,home,1.5\n");
  EXPECT_EQ(d.covariate_count, 1u);
  EXPECT_EQ(d.covariate(1, 1, 0), 1.5);

  EXPECT_NE(error_of(ranks, "time,item,covariate,value\n1,A,home,1\n").find("home"),
            std::string::npos);
  EXPECT_NE(error_of(ranks, "time,item,covariate,value\n1,Z,home,1\n"), "");
  EXPECT_NE(error_of(ranks, "time,item,covariate,value\n1,A,home,1\n1,A,home,2\n"), "");

  RunConfig sparse;
  sparse.set("sparse_covariates", "home");
  const PanelDataset s = load(ranks, "time,item,covariate,value\n2,A,home,1\n", sparse);
  EXPECT_EQ(s.covariate(0, 0, 0), 0.0);
  EXPECT_EQ(s.covariate(1, 0, 0), 1.0);

  RunConfig declared;
  declared.set("covariate_names", "away");
  EXPECT_NE(error_of(ranks, "time,item,covariate,value\n1,A,home,1\n", declared), "");
}

TEST(LoadDataset, ZeroScoreOnlyNeedsParticipantCovariates) {
  const std::string ranks = "time,item,rank\n1,A,1\n1,B,2\n2,B,1\n2,C,2\n";
  const std::string cov =
      "time,item,covariate,value\n1,A,h,1\n1,B,h,0\n2,B,h,0\n2,C,h,1\n";
  EXPECT_NE(error_of(ranks, cov), "");
  RunConfig zero;
  zero.set("absent_mode", "zero-score");
  EXPECT_EQ(error_of(ranks, cov, zero), "");
}

TEST(RoundTrip, CompletePanelIsIdentical) {
  Rng rng(3);
  const ModelSpec spec = ModelSpec::make(Variant::kMeanReverting, 11, 2);
  const auto panel = simulate_panel(design_parameters(spec), spec, 9, rng);
  std::ostringstream r, c;
  write_rankings(r, panel.data);
  write_covariates(c, panel.data);
  EXPECT_EQ(load(r.str(), c.str()), panel.data);
}

TEST(RoundTrip, PartialPanelMatchesByLabel) {
  // Items are renumbered by first appearance, so compare through labels.
  Rng rng(4);
  const ModelSpec spec = ModelSpec::make(Variant::kMeanReverting, 8, 1);
  const auto panel = simulate_panel(design_parameters(spec), spec, 30, rng, {.top = 6});
  std::ostringstream r, c;
  write_rankings(r, panel.data);
  write_covariates(c, panel.data);
  const PanelDataset back = load(r.str(), c.str());
  ASSERT_EQ(back.universe_size, 8u);
  EXPECT_EQ(back.period_labels, panel.data.period_labels);
  std::vector<std::size_t> to_back(8);
  for (std::size_t i = 0; i < 8; ++i) {
    to_back[i] = static_cast<std::size_t>(
        std::find(back.item_labels.begin(), back.item_labels.end(), panel.data.item_labels[i]) -
        back.item_labels.begin());
  }
  for (std::size_t t = 0; t < 30; ++t) {
    std::vector<std::size_t> mapped;
    for (std::size_t i : panel.data.rankings[t].ordering()) mapped.push_back(to_back[i]);
    EXPECT_EQ(back.rankings[t], Ranking(8, mapped));
    for (std::size_t i = 0; i < 8; ++i) {
      EXPECT_EQ(back.covariate(t, to_back[i], 0), panel.data.covariate(t, i, 0));
    }
  }
}

TEST(LoadDataset, CovariatesForUnrankedItemAreRejected) {
  EXPECT_NE(error_of("time,item,rank\n1,A,1\n1,B,2\n",
                     "time,item,covariate,value\n1,A,h,1\n1,B,h,0\n1,C,h,0\n")
                .find("C"),
            std::string::npos);
}

TEST(WriteItemPath, SortsLabels) {
  PanelDataset d;
  d.universe_size = 2;
  d.item_labels = {"b", "a"};
  d.period_labels = {"1"};
  d.rankings = {Ranking::complete({0, 1})};
  Matrix path(1, 2);
  path(0, 0) = 0.25;
  path(0, 1) = -0.25;
  std::ostringstream out;
  write_item_path(out, d, path);
  EXPECT_EQ(out.str(), "time,a,b\n1,-0.25,0.25\n");
}

TEST(Config, ParsesKeysAndReportsBadLines) {
  std::istringstream in(
      "# comment\nvariant = all\nrestarts = 2\nseed = 42\nconfidence_level = 0.9\n"
      "participants = A, B\nevents = top:A:1; rank:B:2\n");
  const RunConfig c = parse_config(in, "run.cfg");
  EXPECT_EQ(c.variants.size(), 3u);
  EXPECT_EQ(c.optimizer.restart_count, 2u);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.confidence_level, 0.9);
  EXPECT_EQ(c.participants, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(c.events, (std::vector<std::string>{"top:A:1", "rank:B:2"}));

  std::istringstream bad("seed = 1\nbogus = 3\n");
  try {
    parse_config(bad, "run.cfg");
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("run.cfg:2"), std::string::npos) << e.what();
  }
  RunConfig r;
  EXPECT_THROW(r.set("variant", "garch"), InvalidArgument);
  EXPECT_THROW(r.set("restarts", "-1"), InvalidArgument);
}

TEST(Config, ModelSpecHonoursOrders) {
  RunConfig c;
  c.set("score_order", "2");
  c.set("ar_order", "2");
  const ModelSpec s = c.model_spec(Variant::kMeanReverting, 5, 1);
  EXPECT_EQ(s.score_order, 2u);
  EXPECT_EQ(s.ar_order, 2u);
  EXPECT_EQ(c.model_spec(Variant::kStatic, 5, 1).score_order, 0u);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

}  // namespace
}  // namespace gasrank
