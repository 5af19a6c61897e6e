#include "commands.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>

#include "gasrank/csv.hpp"
#include "gasrank/error.hpp"
#include "gasrank/estimation.hpp"
#include "gasrank/gas_filter.hpp"
#include "gasrank/simulation.hpp"

namespace gasrank::cli {
namespace fs = std::filesystem;

namespace {

std::string fixed6(double v) {
  return std::isfinite(v) ? fmt::format("{:.6f}", v) : std::string("NA");
}

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  return out;
}

std::size_t find_item(const std::vector<std::string>& labels, std::string_view label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw InvalidArgument("unknown item '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

std::size_t parse_position(std::string_view text, std::string_view spec) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
    throw InvalidArgument("event '" + std::string(spec) + "': bad position '" +
                          std::string(text) + "'");
  }
  return value;
}

struct ParameterRow {
  std::string name;
  double estimate;
  double std_error;
  Interval ci;
};

void write_parameter_table(const fs::path& path, const FitResult& fit, const PanelDataset& data,
                           double level) {
  const ModelSpec& spec = fit.spec;
  const std::size_t n = spec.universe_size;
  const std::vector<std::string> names =
      free_parameter_names(spec, data.item_labels, data.covariate_names);
  const bool have_se = fit.has_std_errors();
  auto interval = [&](double est, double se) {
    return have_se ? confidence_interval(est, se, level)
                   : Interval{std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN()};
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<ParameterRow> omega_rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double est = fit.params.omega[i];
    const double se = !have_se ? nan : (i + 1 < n ? fit.std_errors[i] : fit.omega_last_std_error);
    omega_rows.push_back({"omega[" + data.item_labels[i] + "]", est, se, interval(est, se)});
  }
  const auto order = lexicographic_order(data.item_labels);
  std::vector<ParameterRow> rows;
  for (std::size_t i : order) rows.push_back(omega_rows[i]);
  for (std::size_t k = n - 1; k < fit.free_params.size(); ++k) {
    const double est = fit.free_params[k];
    const double se = have_se ? fit.std_errors[k] : nan;
    rows.push_back({names[k], est, se, interval(est, se)});
  }

  std::ofstream out = open_output(path);
  out << "parameter,estimate,std_error,z,p_value,ci_lower,ci_upper\n";
  for (const ParameterRow& r : rows) {
    const double z = r.std_error > 0.0 ? r.estimate / r.std_error : nan;
    csv::write_row(out, {r.name, fixed6(r.estimate), fixed6(r.std_error), fixed6(z),
                         fixed6(normal_p_value(r.estimate, r.std_error)), fixed6(r.ci.lower),
                         fixed6(r.ci.upper)});
  }
}

void write_unconditional(const fs::path& path, const FitResult& fit, const PanelDataset& data) {
  const WorthVector bar = unconditional_worth(fit.params, fit.spec);
  std::vector<std::size_t> all(bar.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto ranking = predicted_ranking(bar, all);
  std::vector<std::size_t> rank_of(bar.size());
  for (std::size_t r = 0; r < ranking.size(); ++r) rank_of[ranking[r]] = r + 1;
  std::ofstream out = open_output(path);
  out << "item,unconditional_worth,rank\n";
  for (std::size_t i : lexicographic_order(data.item_labels)) {
    csv::write_row(out, {data.item_labels[i], fixed6(bar[i]), std::to_string(rank_of[i])});
  }
}

FitResult fit_with_errors(const PanelDataset& data, const ModelSpec& spec,
                          const RunConfig& config, std::ostream& log) {
  FitResult fitted = fit(data, spec, config.optimizer);
  try {
    fitted = standard_errors(std::move(fitted), data, config.optimizer);
  } catch (const NumericalError& e) {
    fitted.warnings.push_back(std::string("standard errors unavailable: ") + e.what());
  }
  for (const std::string& w : fitted.warnings) log << "warning (" << to_string(spec.variant) << "): " << w << '\n';
  return fitted;
}

std::vector<std::size_t> resolve_participants(const RunConfig& config, const PanelDataset& data) {
  std::vector<std::size_t> out;
  if (config.participants.empty()) {
    for (std::size_t i = 0; i < data.universe_size; ++i) out.push_back(i);
    return out;
  }
  for (const std::string& label : config.participants) {
    out.push_back(find_item(data.item_labels, label));
  }
  return out;
}

}  // namespace

RankingEvent parse_event(std::string_view spec, const std::vector<std::string>& item_labels,
                         const std::vector<std::size_t>& participants) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("event '" + std::string(spec) +
                          "' must look like top:ITEM:K, rank:ITEM:R or order:A,B,C");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view rest = spec.substr(colon + 1);
  if (kind == "order") {
    std::vector<std::size_t> ordering;
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const auto label = rest.substr(start, comma == std::string_view::npos ? rest.npos : comma - start);
      ordering.push_back(find_item(item_labels, label));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return RankingEvent::exact_ordering(participants, std::move(ordering));
  }
  const auto last = rest.rfind(':');
  if (last == std::string_view::npos) {
    throw InvalidArgument("event '" + std::string(spec) + "' is missing its position");
  }
  const std::size_t item = find_item(item_labels, rest.substr(0, last));
  const std::size_t position = parse_position(rest.substr(last + 1), spec);
  if (kind == "top") return RankingEvent::top_k(participants, item, position);
  if (kind == "rank") return RankingEvent::at_rank(participants, item, position);
  throw InvalidArgument("unknown event kind '" + std::string(kind) + "'");
}

int cmd_fit(const RunConfig& config, std::ostream& log) {
  const PanelDataset data = load_dataset(config);
  log << "loaded " << data.universe_size << " items over " << data.period_count()
      << " periods, " << data.covariate_count << " covariate(s)\n";
  const ConnectivityDiagnostic conn = connectivity_check(data, config.absent_mode);
  if (!conn.connected) {
    std::string witness;
    for (std::size_t i : conn.witness) witness += (witness.empty() ? "" : ", ") + data.item_labels[i];
    log << "warning: data fail the connectivity condition; never ranked below the rest: {"
        << witness << "}\n";
  }

  const fs::path out_dir(config.out_dir);
  const bool batch = config.variants.size() > 1;
  std::vector<FitResult> fits;
  bool all_converged = true;
  for (Variant v : config.variants) {
    const ModelSpec spec = config.model_spec(v, data.universe_size, data.covariate_count);
    FitResult fitted = fit_with_errors(data, spec, config, log);
    const fs::path dir = batch ? out_dir / std::string(to_string(v)) : out_dir;

    write_parameter_table(dir / "parameters.csv", fitted, data, config.confidence_level);
    {
      std::ofstream out = open_output(dir / "summary.csv");
      out << "variant,free_parameters,loglik,aic,converged,iterations,gradient_norm\n";
      csv::write_row(out, {std::string(to_string(v)), std::to_string(spec.free_parameter_count()),
                           fixed6(fitted.loglik), fixed6(fitted.aic),
                           fitted.converged ? "1" : "0", std::to_string(fitted.iterations),
                           fmt::format("{:.3e}", fitted.gradient_norm)});
    }
    {
      std::ofstream out = open_output(dir / "worth_paths.csv");
      write_item_path(out, data, fitted.filter.worth_path);
    }
    if (v != Variant::kRandomWalk) write_unconditional(dir / "unconditional_worth.csv", fitted, data);

    log << fmt::format("{:<15} loglik {:>12.3f}  AIC {:>10.3f}  k {:>3}  {}\n", to_string(v),
                       fitted.loglik, fitted.aic, spec.free_parameter_count(),
                       fitted.converged ? "converged" : "NOT converged");
    all_converged = all_converged && fitted.converged;
    fits.push_back(std::move(fitted));
  }

  if (batch) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < fits.size(); ++k) {
      if (fits[k].aic < fits[best].aic) best = k;
    }
    std::ofstream out = open_output(out_dir / "aic_comparison.csv");
    out << "variant,free_parameters,loglik,aic,best\n";
    for (std::size_t k = 0; k < fits.size(); ++k) {
      csv::write_row(out, {std::string(to_string(fits[k].spec.variant)),
                           std::to_string(fits[k].spec.free_parameter_count()),
                           fixed6(fits[k].loglik), fixed6(fits[k].aic), k == best ? "1" : "0"});
    }
    log << "lowest AIC: " << to_string(fits[best].spec.variant) << '\n';
  }
  return all_converged ? kSuccess : kNumericalFailure;
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  const Variant v = config.variants.front();
  const ModelSpec spec =
      config.model_spec(v, config.simulate_items, config.simulate_covariates);
  const ParameterVector params = design_parameters(spec);
  Rng rng(config.seed);
  SimulateOptions options;
  options.top = config.simulate_top;
  const SimulatedPanel panel = simulate_panel(params, spec, config.simulate_periods, rng, options);

  const fs::path out_dir(config.out_dir);
  {
    std::ofstream out = open_output(out_dir / "rankings.csv");
    write_rankings(out, panel.data);
  }
  if (spec.covariate_count > 0) {
    std::ofstream out = open_output(out_dir / "covariates.csv");
    write_covariates(out, panel.data);
  }
  {
    std::ofstream out = open_output(out_dir / "latent_worth.csv");
    write_item_path(out, panel.data, panel.latent_worth);
  }
  {
    std::ofstream out = open_output(out_dir / "true_parameters.csv");
    out << "parameter,value\n";
    for (std::size_t i = 0; i < spec.universe_size; ++i) {
      csv::write_row(out, {"omega[" + panel.data.item_labels[i] + "]", format_double(params.omega[i])});
    }
    for (std::size_t j = 0; j < params.beta.size(); ++j) {
      csv::write_row(out, {"beta[" + panel.data.covariate_names[j] + "]", format_double(params.beta[j])});
    }
    for (std::size_t k = 0; k < params.alpha.size(); ++k) {
      csv::write_row(out, {"alpha_" + std::to_string(k + 1), format_double(params.alpha[k])});
    }
    for (std::size_t l = 0; l < params.phi.size(); ++l) {
      csv::write_row(out, {"phi_" + std::to_string(l + 1), format_double(params.phi[l])});
    }
  }
  log << "simulated " << spec.universe_size << " items over " << config.simulate_periods
      << " periods (" << to_string(v) << ") into " << out_dir.string() << '\n';
  return kSuccess;
}

int cmd_study(const RunConfig& config, std::ostream& log) {
  SimulationDesign design;
  design.item_counts = config.study_items;
  design.horizons = config.study_horizons;
  design.replications = config.study_replications;
  design.seed = config.seed;
  design.threads = config.study_threads;
  design.confidence_level = config.confidence_level;
  const StudyReport report = replication_study(design, config.optimizer);

  std::ofstream out = open_output(fs::path(config.out_dir) / "study.csv");
  write_study_csv(out, report);
  for (const StudyCell& c : report.cells) {
    log << fmt::format("N={:<3} T={:<4} {:<6} MAE {:>8}  coverage {:>8}  ok {}/{}\n", c.items,
                       c.periods, to_string(c.group), fixed6(c.mae), fixed6(c.coverage),
                       c.n_success, c.n_success + c.n_fail);
  }
  return kSuccess;
}

int cmd_predict(const RunConfig& config, std::ostream& log) {
  const PanelDataset data = load_dataset(config);
  const Variant v = config.variants.front();
  const ModelSpec spec = config.model_spec(v, data.universe_size, data.covariate_count);
  const FitResult fitted = fit(data, spec, config.optimizer);
  for (const std::string& w : fitted.warnings) log << "warning: " << w << '\n';

  Matrix next(data.universe_size, data.covariate_count, 0.0);
  if (!config.next_covariates_path.empty()) {
    std::ifstream in(config.next_covariates_path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + config.next_covariates_path + "'");
    next = load_next_covariates(in, data, config);
  } else if (data.covariate_count > 0) {
    log << "no next-period covariates given; using 0 for every covariate\n";
  }

  const WorthVector worth = predict_worth(fitted, next);
  const std::vector<std::size_t> participants = resolve_participants(config, data);
  const auto ranking = predicted_ranking(worth, participants);
  const auto win = winner_probabilities(worth, participants);

  const fs::path out_dir(config.out_dir);
  {
    std::vector<std::string> labels;
    for (std::size_t i : participants) labels.push_back(data.item_labels[i]);
    std::ofstream out = open_output(out_dir / "predictions.csv");
    out << "item,worth,predicted_rank,p_win\n";
    for (std::size_t k : lexicographic_order(labels)) {
      const std::size_t item = participants[k];
      const auto pos = std::find(ranking.begin(), ranking.end(), item) - ranking.begin();
      csv::write_row(out, {data.item_labels[item], fixed6(worth[item]), std::to_string(pos + 1),
                           fixed6(win[k])});
    }
  }

  Rng rng(config.seed);
  std::ofstream events = open_output(out_dir / "events.csv");
  events << "event,probability,standard_error,method\n";
  for (const std::string& spec_text : config.events) {
    const RankingEvent ev = parse_event(spec_text, data.item_labels, participants);
    const EventProbability p = event_probability(worth, ev, rng);
    csv::write_row(events, {spec_text, fixed6(p.value),
                            p.standard_error ? fixed6(*p.standard_error) : std::string(""),
                            p.exact() ? "exact" : "monte-carlo"});
    log << spec_text << ": " << fixed6(p.value)
        << (p.exact() ? "" : " (Monte Carlo, se " + fixed6(*p.standard_error) + ")") << '\n';
  }
  log << "predicted ranking:";
  for (std::size_t i : ranking) log << ' ' << data.item_labels[i];
  log << '\n';
  return kSuccess;
}

int run(int argc, char** argv) {
  CLI::App app{"Score-driven Plackett-Luce models for time-varying rankings"};
  app.require_subcommand(1);

  std::string config_path, rankings, covariates, next_covariates, variant, out, participants;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> events, overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Flat key = value configuration file");
    sub->add_option("--variant", variant, "static | mean-reverting | random-walk | all");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--set", overrides, "Override any config key (KEY=VALUE)");
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--rankings", rankings, "Long-format rankings CSV (time,item,rank)");
    sub->add_option("--covariates", covariates,
                    "Long-format covariates CSV (time,item,covariate,value)");
  };

  CLI::App* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit and parameter table");
  add_common(fit_cmd);
  add_data(fit_cmd);
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Simulate a panel from the design parameters");
  add_common(sim_cmd);
  CLI::App* study_cmd = app.add_subcommand("study", "Monte Carlo replication study");
  add_common(study_cmd);
  CLI::App* predict_cmd = app.add_subcommand("predict", "One-step-ahead prediction and events");
  add_common(predict_cmd);
  add_data(predict_cmd);
  predict_cmd->add_option("--next-covariates", next_covariates,
                          "Next-period covariates CSV (item,covariate,value)");
  predict_cmd->add_option("--participants", participants, "Comma-separated participant labels");
  predict_cmd->add_option("--event", events, "top:ITEM:K, rank:ITEM:R or order:A,B,C");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--set expects KEY=VALUE, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!variant.empty()) config.set("variant", variant);
    if (seed) config.set("seed", std::to_string(*seed));
    if (!out.empty()) config.out_dir = out;
    if (!rankings.empty()) config.rankings_path = rankings;
    if (!covariates.empty()) config.covariates_path = covariates;
    if (!next_covariates.empty()) config.next_covariates_path = next_covariates;
    if (!participants.empty()) config.set("participants", participants);
    if (!events.empty()) config.events = events;

    if (fit_cmd->parsed()) return cmd_fit(config, std::cout);
    if (sim_cmd->parsed()) return cmd_simulate(config, std::cout);
    if (study_cmd->parsed()) return cmd_study(config, std::cout);
    return cmd_predict(config, std::cout);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace gasrank::cli
