#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "gasrank/csv.hpp"
#include "gasrank/error.hpp"

namespace gasrank::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gasrank_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int run_args(std::vector<std::string> args) const {
    args.insert(args.begin(), "gasrank");
    std::vector<char*> argv;
    for (std::string& a : args) argv.push_back(a.data());
    return run(static_cast<int>(argv.size()), argv.data());
  }

  fs::path dir_;
};

// Each item takes every position once across four periods: a balanced design
// whose static MLE has all worths equal.
std::string balanced_rankings() {
  const char* items[] = {"A", "B", "C", "D"};
  std::string out = "time,item,rank\n";
  for (int t = 0; t < 4; ++t) {
    for (int i = 0; i < 4; ++i) {
      out += std::to_string(t + 1) + "," + items[i] + "," + std::to_string((i + t) % 4 + 1) + "\n";
    }
  }
  return out;
}

TEST_F(CliTest, PredictEqualWorthsTopThree) {
  write("r.csv", balanced_rankings());
  ASSERT_EQ(run_args({"predict", "--rankings", path("r.csv"), "--variant", "static", "--out",
                      path("out"), "--event", "top:A:3", "--event", "top:D:3"}),
            kSuccess);
  const std::string events = slurp("out/events.csv");
  EXPECT_NE(events.find("top:A:3,0.750000,,exact"), std::string::npos) << events;
  EXPECT_NE(events.find("top:D:3,0.750000,,exact"), std::string::npos) << events;
}

TEST_F(CliTest, SimulateIsDeterministicAndFitReadsItBack) {
  ASSERT_EQ(run_args({"simulate", "--seed", "9", "--out", path("a"), "--set", "simulate.items=6",
                      "--set", "simulate.top=4"}),
            kSuccess);
  ASSERT_EQ(run_args({"simulate", "--seed", "9", "--out", path("b"), "--set", "simulate.items=6",
                      "--set", "simulate.top=4"}),
            kSuccess);
  for (const char* f : {"rankings.csv", "covariates.csv", "latent_worth.csv", "true_parameters.csv"}) {
    EXPECT_EQ(slurp(std::string("a/") + f), slurp(std::string("b/") + f)) << f;
  }

  ASSERT_EQ(run_args({"fit", "--rankings", path("a/rankings.csv"), "--covariates",
                      path("a/covariates.csv"), "--variant", "all", "--out", path("fit")}),
            kSuccess);
  std::istringstream aic(slurp("fit/aic_comparison.csv"));
  const csv::Table t = csv::read(aic, "aic");
  ASSERT_EQ(t.rows.size(), 3u);
  int best = 0;
  for (const auto& row : t.rows) best += row.fields[4] == "1";
  EXPECT_EQ(best, 1);

  std::istringstream params(slurp("fit/mean-reverting/parameters.csv"));
  const csv::Table p = csv::read(params, "params");
  // N omega rows (including the derived one), one beta, alpha_1, phi_1.
  ASSERT_EQ(p.rows.size(), 6u + 1u + 2u);
  EXPECT_EQ(p.rows[6].fields[0], "beta[x1]");
  EXPECT_EQ(p.rows[7].fields[0], "alpha_1");
  EXPECT_EQ(p.rows[8].fields[0], "phi_1");
  std::istringstream stat(slurp("fit/static/parameters.csv"));
  EXPECT_EQ(csv::read(stat, "static").rows.size(), 6u + 1u);

  // Byte-stable across runs.
  const std::string first = slurp("fit/mean-reverting/parameters.csv");
  ASSERT_EQ(run_args({"fit", "--rankings", path("a/rankings.csv"), "--covariates",
                      path("a/covariates.csv"), "--variant", "all", "--out", path("fit")}),
            kSuccess);
  EXPECT_EQ(slurp("fit/mean-reverting/parameters.csv"), first);
}

TEST_F(CliTest, ConfigFileAndOverrides) {
  write("r.csv", balanced_rankings());
  write("run.cfg", "rankings = " + path("r.csv") + "\nvariant = static\nout = " + path("cfg") + "\n");
  ASSERT_EQ(run_args({"fit", "--config", path("run.cfg")}), kSuccess);
  EXPECT_TRUE(fs::exists(path("cfg/parameters.csv")));
  EXPECT_TRUE(fs::exists(path("cfg/worth_paths.csv")));
  EXPECT_EQ(slurp("cfg/worth_paths.csv").substr(0, 13), "time,A,B,C,D\n");
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run_args({}), kUsageError);
  EXPECT_EQ(run_args({"fit", "--bogus"}), kUsageError);
  EXPECT_EQ(run_args({"fit", "--set", "nokey=1", "--rankings", "x"}), kUsageError);
  write("bad.csv", "time,item,rank\n1,A,1\n1,B,1\n");
  EXPECT_EQ(run_args({"fit", "--rankings", path("bad.csv"), "--out", path("o")}), kDataError);
  EXPECT_EQ(run_args({"fit", "--rankings", path("missing.csv"), "--out", path("o")}), kDataError);
  // Non-convergence maps to the numerical-failure code.
  write("r.csv", balanced_rankings());
  EXPECT_EQ(run_args({"fit", "--rankings", path("r.csv"), "--set", "max_iterations=1", "--set",
                      "restarts=1", "--out", path("o")}),
            kNumericalFailure);
}

TEST_F(CliTest, BundledExampleAicOrderingIsStableAcrossRestarts) {
  const std::string dir = GASRANK_EXAMPLE_DIR;
  std::vector<std::string> orderings;
  for (const char* restarts : {"restarts=1", "restarts=3", "restarts=6"}) {
    const std::string out = path(restarts);
    ASSERT_EQ(run_args({"fit", "--rankings", dir + "/rankings.csv", "--covariates",
                        dir + "/covariates.csv", "--variant", "all", "--set", restarts, "--out",
                        out}),
              kSuccess);
    std::ifstream in(out + "/aic_comparison.csv");
    csv::Table t = csv::read(in, "aic");
    std::sort(t.rows.begin(), t.rows.end(), [](const csv::Row& a, const csv::Row& b) {
      return std::stod(a.fields[3]) < std::stod(b.fields[3]);
    });
    std::string order;
    for (const auto& row : t.rows) order += row.fields[0] + " ";
    orderings.push_back(order);
  }
  EXPECT_EQ(orderings[0], orderings[1]);
  EXPECT_EQ(orderings[0], orderings[2]);

  // Static table: N - 1 free omegas, the derived omega_N, and M betas.
  std::ifstream in(path("restarts=1") + "/static/parameters.csv");
  EXPECT_EQ(csv::read(in, "static").rows.size(), 12u - 1u + 1u + 1u);
}

TEST(ParseEvent, Forms) {
  const std::vector<std::string> labels{"FIN", "CAN", "RUS"};
  const std::vector<std::size_t> part{0, 1, 2};
  const RankingEvent a = parse_event("top:FIN:3", labels, part);
  EXPECT_EQ(a.kind, RankingEvent::Kind::kTopK);
  EXPECT_EQ(a.position, 3u);
  const RankingEvent b = parse_event("rank:CAN:2", labels, part);
  EXPECT_EQ(b.kind, RankingEvent::Kind::kAtRank);
  EXPECT_EQ(b.item, 1u);
  const RankingEvent c = parse_event("order:FIN,CAN,RUS", labels, part);
  EXPECT_EQ(c.ordering, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(parse_event("top:SWE:1", labels, part), InvalidArgument);
  EXPECT_THROW(parse_event("win:FIN", labels, part), InvalidArgument);
  EXPECT_THROW(parse_event("top:FIN:0", labels, part), InvalidArgument);
}

}  // namespace
}  // namespace gasrank::cli
