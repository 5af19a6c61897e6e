#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gasrank/estimation.hpp"
#include "gasrank/matrix.hpp"
#include "gasrank/model.hpp"

namespace gasrank {

// Everything a CLI run needs. Read from a flat `key = value` file; see
// README.md for the key list.
struct RunConfig {
  std::vector<Variant> variants{Variant::kMeanReverting};
  std::optional<std::size_t> score_order;
  std::optional<std::size_t> ar_order;
  // Declared covariates, in model order. Empty means "every covariate in the
  // covariate file, in first-appearance order".
  std::vector<std::string> covariate_names;
  std::set<std::string> sparse_covariates;
  AbsentMode absent_mode = AbsentMode::kPartialLikelihood;
  RandomWalkInit random_walk_init = RandomWalkInit::kOmega;
  OptimizerConfig optimizer;
  double confidence_level = 0.95;
  std::uint64_t seed = 1;

  std::string rankings_path;
  std::string covariates_path;
  std::string next_covariates_path;
  std::string out_dir = ".";

  // simulate
  std::size_t simulate_items = 10;
  std::size_t simulate_periods = 20;
  std::size_t simulate_top = 0;
  std::size_t simulate_covariates = 1;

  // study
  std::vector<std::size_t> study_items{10, 20, 30};
  std::vector<std::size_t> study_horizons{10, 20, 50, 100};
  std::size_t study_replications = 500;
  std::size_t study_threads = 0;

  // predict
  std::vector<std::string> participants;
  std::vector<std::string> events;

  // Throws InvalidArgument on unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);

  ModelSpec model_spec(Variant variant, std::size_t universe_size,
                       std::size_t covariate_count) const;
};

// Parses `key = value` lines; '#' starts a comment. Throws InvalidArgument
// naming the line.
RunConfig parse_config(std::istream& in, std::string_view source = "config");
RunConfig load_config(const std::string& path);

// Builds the panel from a long-format rankings file (time,item,rank) and an
// optional covariates file (time,item,covariate,value). Items are numbered in
// order of first appearance, periods sorted numerically when every time label
// is an integer and lexicographically otherwise. Throws DataError with the
// offending line number.
PanelDataset load_dataset(std::istream& rankings, std::istream* covariates,
                          const RunConfig& config);
PanelDataset load_dataset(const RunConfig& config);

// Next-period covariates (item,covariate,value) as an N x M matrix over the
// dataset's items and covariates. Sparse covariates default to 0.
Matrix load_next_covariates(std::istream& in, const PanelDataset& data,
                            const RunConfig& config);

// Writes rows in period order, items by index. Values are written in the
// shortest representation that round-trips.
void write_rankings(std::ostream& out, const PanelDataset& data);
void write_covariates(std::ostream& out, const PanelDataset& data);

// time + one column per item (labels sorted lexicographically).
void write_item_path(std::ostream& out, const PanelDataset& data, const Matrix& path);

// Indices of item labels sorted lexicographically.
std::vector<std::size_t> lexicographic_order(const std::vector<std::string>& labels);

// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace gasrank
