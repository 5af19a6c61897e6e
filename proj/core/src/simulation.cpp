#include "gasrank/simulation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "gasrank/error.hpp"
#include "gasrank/gas_filter.hpp"

namespace gasrank {
namespace {

std::string item_label(std::size_t index, std::size_t count) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(count).size());
  return fmt::format("item{:0{}}", index + 1, width);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::size_t kGroups = 4;

struct ReplicationOutcome {
  bool ok = false;
  double abs_error[kGroups] = {0, 0, 0, 0};
  std::size_t hits[kGroups] = {0, 0, 0, 0};
  std::size_t trials[kGroups] = {0, 0, 0, 0};
};

ReplicationOutcome run_replication(std::size_t items, std::size_t periods,
                                   std::uint64_t seed, const SimulationDesign& design,
                                   OptimizerConfig config) {
  ReplicationOutcome out;
  const ModelSpec spec = ModelSpec::make(Variant::kMeanReverting, items, 1);
  const ParameterVector truth = design_parameters(spec);
  Rng rng(seed);
  try {
    const SimulatedPanel panel = simulate_panel(truth, spec, periods, rng);
    if (design.oracle) {
      const FitResult at_truth = evaluate_at(panel.data, spec, truth);
      (void)at_truth;
      out.ok = true;
      return out;  // zero errors, no intervals
    }
    config.random_seed = splitmix64(seed ^ 0xa5a5a5a5a5a5a5a5ULL);
    FitResult fitted = fit(panel.data, spec, config);
    if (!fitted.converged) return out;
    fitted = standard_errors(std::move(fitted), panel.data, config);
    if (!fitted.hessian_negative_definite) return out;
    const std::vector<Interval> ci = confidence_interval(fitted, design.confidence_level);

    const ParameterVector& est = fitted.params;
    // omega: free entries then the derived last one (last interval).
    for (std::size_t i = 0; i < items; ++i) {
      out.abs_error[0] += std::abs(est.omega[i] - truth.omega[i]) / static_cast<double>(items);
      const Interval& iv = i + 1 < items ? ci[i] : ci.back();
      out.hits[0] += iv.contains(truth.omega[i]) ? 1 : 0;
      out.trials[0] += 1;
    }
    const std::size_t beta_at = items - 1;
    const double estimates[3] = {est.beta[0], est.alpha[0], est.phi[0]};
    const double truths[3] = {truth.beta[0], truth.alpha[0], truth.phi[0]};
    for (std::size_t g = 0; g < 3; ++g) {
      out.abs_error[g + 1] = std::abs(estimates[g] - truths[g]);
      out.hits[g + 1] = ci[beta_at + g].contains(truths[g]) ? 1 : 0;
      out.trials[g + 1] = 1;
    }
    out.ok = true;
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

std::vector<double> design_omega(std::size_t items) {
  if (items == 0) throw InvalidArgument("design needs at least one item");
  if (items == 1) return {0.0};
  std::vector<double> omega(items);
  for (std::size_t i = 0; i < items; ++i) {
    omega[i] = 4.0 * static_cast<double>(i) / static_cast<double>(items - 1) - 2.0;
  }
  return omega;
}

ParameterVector design_parameters(const ModelSpec& spec) {
  ParameterVector p;
  p.omega = design_omega(spec.universe_size);
  p.beta.assign(spec.covariate_count, 1.0);
  p.alpha.assign(spec.score_order, 0.0);
  p.phi.assign(spec.ar_order, 0.0);
  if (!p.alpha.empty()) p.alpha[0] = 0.4;
  if (!p.phi.empty()) {
    if (spec.variant == Variant::kRandomWalk) {
      std::fill(p.phi.begin(), p.phi.end(), 1.0);
    } else {
      p.phi[0] = 0.5;
    }
  }
  return p;
}

SimulatedPanel simulate_panel(const ParameterVector& params, const ModelSpec& spec,
                              std::size_t periods, Rng& rng, const SimulateOptions& options) {
  spec.validate();
  params.validate(spec);
  const std::size_t n = spec.universe_size;
  const std::size_t m = spec.covariate_count;
  const std::size_t top = options.top == 0 ? n : options.top;
  if (top > n) throw InvalidArgument("cannot rank more items than the universe holds");
  if (periods == 0) throw InvalidArgument("simulation needs at least one period");

  SimulatedPanel out;
  PanelDataset& data = out.data;
  data.universe_size = n;
  data.covariate_count = m;
  data.covariates.resize(periods * n * m);
  data.rankings.reserve(periods);
  for (std::size_t i = 0; i < n; ++i) data.item_labels.push_back(item_label(i, n));
  for (std::size_t t = 0; t < periods; ++t) data.period_labels.push_back(std::to_string(t + 1));
  for (std::size_t j = 0; j < m; ++j) data.covariate_names.push_back("x" + std::to_string(j + 1));
  out.latent_worth = Matrix(periods, n);

  std::normal_distribution<double> normal(0.0, 1.0);
  detail::WorthRecursion recursion(params, spec);
  std::vector<double> s(n);
  std::vector<double> scratch;
  for (std::size_t t = 0; t < periods; ++t) {
    std::span<double> cov(data.covariates.data() + t * n * m, n * m);
    for (double& x : cov) x = normal(rng);
    std::span<double> f = out.latent_worth.row(t);
    recursion.next(cov, f);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(std::abs(f[i]) <= kDivergenceBound)) {
        throw DivergenceError("simulated worth diverged at period " + std::to_string(t + 1),
                              t, i);
      }
    }
    Ranking y = sample(f, top, rng);
    std::fill(s.begin(), s.end(), 0.0);
    if (spec.absent_mode == AbsentMode::kZeroScore) {
      detail::evaluate(f, y.ordering(), {}, s, scratch);
    } else {
      detail::evaluate(f, y.ordering(), y.unranked(), s, scratch);
    }
    recursion.push(f, s);
    data.rankings.push_back(std::move(y));
  }
  return out;
}

std::string_view to_string(ParameterGroup g) {
  switch (g) {
    case ParameterGroup::kOmega: return "omega";
    case ParameterGroup::kBeta: return "beta";
    case ParameterGroup::kAlpha: return "alpha";
    case ParameterGroup::kPhi: return "phi";
  }
  return "?";
}

const StudyCell& StudyReport::at(std::size_t items, std::size_t periods,
                                 ParameterGroup g) const {
  for (const StudyCell& c : cells) {
    if (c.items == items && c.periods == periods && c.group == g) return c;
  }
  throw InvalidArgument("study has no cell N=" + std::to_string(items) +
                        ", T=" + std::to_string(periods));
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t cell, std::size_t replication) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(cell));
  return splitmix64(h ^ (static_cast<std::uint64_t>(replication) << 1));
}

StudyReport replication_study(const SimulationDesign& design, const OptimizerConfig& config) {
  if (design.replications == 0) throw InvalidArgument("study needs at least one replication");
  if (design.item_counts.empty() || design.horizons.empty()) {
    throw InvalidArgument("study needs at least one item count and one horizon");
  }
  config.validate();

  struct CellSpec {
    std::size_t items, periods;
  };
  std::vector<CellSpec> cells;
  for (std::size_t n : design.item_counts) {
    if (n < 2) throw InvalidArgument("study item counts must be at least 2");
    for (std::size_t t : design.horizons) cells.push_back({n, t});
  }
  const std::size_t reps = design.replications;
  const std::size_t tasks = cells.size() * reps;
  std::vector<ReplicationOutcome> outcomes(tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t task = next++; task < tasks; task = next++) {
      const std::size_t c = task / reps;
      const std::size_t r = task % reps;
      outcomes[task] = run_replication(cells[c].items, cells[c].periods,
                                       replication_seed(design.seed, c, r), design, config);
    }
  };
  std::size_t threads = design.threads != 0 ? design.threads
                                            : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, tasks);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  StudyReport report;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double err[kGroups] = {0, 0, 0, 0};
    std::size_t hits[kGroups] = {0, 0, 0, 0};
    std::size_t trials[kGroups] = {0, 0, 0, 0};
    std::size_t ok = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const ReplicationOutcome& o = outcomes[c * reps + r];
      if (!o.ok) continue;
      ++ok;
      for (std::size_t g = 0; g < kGroups; ++g) {
        err[g] += o.abs_error[g];
        hits[g] += o.hits[g];
        trials[g] += o.trials[g];
      }
    }
    for (std::size_t g = 0; g < kGroups; ++g) {
      StudyCell cell;
      cell.items = cells[c].items;
      cell.periods = cells[c].periods;
      cell.group = static_cast<ParameterGroup>(g);
      cell.n_success = ok;
      cell.n_fail = reps - ok;
      cell.mae = ok > 0 ? err[g] / static_cast<double>(ok) : kNaN;
      cell.coverage = trials[g] > 0 ? static_cast<double>(hits[g]) / static_cast<double>(trials[g])
                                    : kNaN;
      report.cells.push_back(cell);
    }
  }
  return report;
}

void write_study_csv(std::ostream& out, const StudyReport& report) {
  out << "N,T,param_group,mae,coverage,n_success,n_fail\n";
  auto num = [](double v) { return std::isnan(v) ? std::string("NA") : fmt::format("{:.6f}", v); };
  for (const StudyCell& c : report.cells) {
    out << c.items << ',' << c.periods << ',' << to_string(c.group) << ',' << num(c.mae) << ','
        << num(c.coverage) << ',' << c.n_success << ',' << c.n_fail << '\n';
  }
}

}  // namespace gasrank
