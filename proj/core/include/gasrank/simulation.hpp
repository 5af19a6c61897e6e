#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gasrank/estimation.hpp"
#include "gasrank/matrix.hpp"
#include "gasrank/model.hpp"
#include "gasrank/plackett_luce.hpp"

namespace gasrank {

struct SimulatedPanel {
  PanelDataset data;
  Matrix latent_worth;  // T x N
};

struct SimulateOptions {
  // Number of items ranked per period; 0 means complete rankings.
  std::size_t top = 0;
};

// Forward simulation of the model. Covariates are i.i.d. standard normal.
// Item labels are "item01", "item02", ... and period labels "1", "2", ...
SimulatedPanel simulate_panel(const ParameterVector& params, const ModelSpec& spec,
                              std::size_t periods, Rng& rng,
                              const SimulateOptions& options = {});

// omega_i = 4 (i - 1) / (N - 1) - 2.
std::vector<double> design_omega(std::size_t items);

// Design parameters for a variant: omega grid, beta_j = 1, alpha = 0.4,
// phi = 0.5 (1 for the random walk).
ParameterVector design_parameters(const ModelSpec& spec);

struct SimulationDesign {
  std::vector<std::size_t> item_counts{10, 20, 30};
  std::vector<std::size_t> horizons{10, 20, 50, 100};
  std::size_t replications = 500;
  std::uint64_t seed = 20201;
  // Worker threads; 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 0;
  // Replace the fit by the true parameters. MAE is then zero and coverage is
  // undefined.
  bool oracle = false;
  double confidence_level = 0.95;
};

enum class ParameterGroup { kOmega, kBeta, kAlpha, kPhi };
std::string_view to_string(ParameterGroup g);

struct StudyCell {
  std::size_t items = 0;
  std::size_t periods = 0;
  ParameterGroup group = ParameterGroup::kOmega;
  double mae = 0.0;
  // NaN when undefined (oracle mode or no successful replication).
  double coverage = 0.0;
  std::size_t n_success = 0;
  std::size_t n_fail = 0;
};

struct StudyReport {
  std::vector<StudyCell> cells;

  const StudyCell& at(std::size_t items, std::size_t periods, ParameterGroup g) const;
};

// Seed for one replication, derived from (seed, cell, replication) only.
std::uint64_t replication_seed(std::uint64_t seed, std::size_t cell,
                               std::size_t replication);

// Simulate -> fit -> standard errors -> confidence intervals, R times per
// (N, T) cell. Replications that fail to converge, or whose Hessian is not
// negative definite, are excluded and counted in n_fail.
StudyReport replication_study(const SimulationDesign& design,
                              const OptimizerConfig& config = {});

// Columns: N,T,param_group,mae,coverage,n_success,n_fail.
void write_study_csv(std::ostream& out, const StudyReport& report);

}  // namespace gasrank
