#include "gasrank/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "gasrank/csv.hpp"
#include "gasrank/error.hpp"

namespace gasrank {
namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(delim, start);
    const auto piece = trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (!piece.empty()) out.push_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

template <typename T>
T require_number(std::string_view key, std::string_view value) {
  auto parsed = parse_number<T>(trim(value));
  if (!parsed) {
    throw InvalidArgument("config key '" + std::string(key) + "': cannot parse '" +
                          std::string(value) + "' as a number");
  }
  return *parsed;
}

std::vector<std::size_t> require_sizes(std::string_view key, std::string_view value) {
  std::vector<std::size_t> out;
  for (const auto& piece : split(value, ',')) out.push_back(require_number<std::size_t>(key, piece));
  if (out.empty()) throw InvalidArgument("config key '" + std::string(key) + "' is empty");
  return out;
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

bool all_integers(const std::vector<std::string>& labels) {
  return std::all_of(labels.begin(), labels.end(),
                     [](const std::string& s) { return parse_number<long long>(s).has_value(); });
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "variant") {
    variants.clear();
    if (value == "all") {
      variants = {Variant::kMeanReverting, Variant::kStatic, Variant::kRandomWalk};
    } else {
      for (const auto& v : split(value, ',')) variants.push_back(parse_variant(v));
    }
    if (variants.empty()) throw InvalidArgument("config key 'variant' is empty");
  } else if (key == "score_order") {
    score_order = require_number<std::size_t>(key, value);
  } else if (key == "ar_order") {
    ar_order = require_number<std::size_t>(key, value);
  } else if (key == "covariate_names") {
    covariate_names = split(value, ',');
  } else if (key == "sparse_covariates") {
    const auto names = split(value, ',');
    sparse_covariates = std::set<std::string>(names.begin(), names.end());
  } else if (key == "absent_mode") {
    absent_mode = parse_absent_mode(value);
  } else if (key == "random_walk_init") {
    random_walk_init = parse_random_walk_init(value);
  } else if (key == "max_iterations") {
    optimizer.max_iterations = require_number<std::size_t>(key, value);
  } else if (key == "gradient_tolerance") {
    optimizer.gradient_tolerance = require_number<double>(key, value);
  } else if (key == "relative_loglik_tolerance") {
    optimizer.relative_loglik_tolerance = require_number<double>(key, value);
  } else if (key == "restarts") {
    optimizer.restart_count = require_number<std::size_t>(key, value);
  } else if (key == "restart_jitter") {
    optimizer.restart_jitter = require_number<double>(key, value);
  } else if (key == "finite_difference_step") {
    optimizer.finite_difference_step = require_number<double>(key, value);
  } else if (key == "hessian_step") {
    optimizer.hessian_step = require_number<double>(key, value);
  } else if (key == "confidence_level") {
    confidence_level = require_number<double>(key, value);
    if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
      throw InvalidArgument("confidence_level must lie strictly between 0 and 1");
    }
  } else if (key == "seed") {
    seed = require_number<std::uint64_t>(key, value);
    optimizer.random_seed = seed;
  } else if (key == "rankings") {
    rankings_path = value;
  } else if (key == "covariates") {
    covariates_path = value;
  } else if (key == "next_covariates") {
    next_covariates_path = value;
  } else if (key == "out") {
    out_dir = value;
  } else if (key == "simulate.items") {
    simulate_items = require_number<std::size_t>(key, value);
  } else if (key == "simulate.periods") {
    simulate_periods = require_number<std::size_t>(key, value);
  } else if (key == "simulate.top") {
    simulate_top = require_number<std::size_t>(key, value);
  } else if (key == "simulate.covariates") {
    simulate_covariates = require_number<std::size_t>(key, value);
  } else if (key == "study.items") {
    study_items = require_sizes(key, value);
  } else if (key == "study.horizons") {
    study_horizons = require_sizes(key, value);
  } else if (key == "study.replications") {
    study_replications = require_number<std::size_t>(key, value);
  } else if (key == "study.threads") {
    study_threads = require_number<std::size_t>(key, value);
  } else if (key == "participants") {
    participants = split(value, ',');
  } else if (key == "events") {
    events = split(value, ';');
  } else {
    throw InvalidArgument("unknown config key '" + std::string(key) + "'");
  }
}

ModelSpec RunConfig::model_spec(Variant variant, std::size_t universe_size,
                                std::size_t covariate_count) const {
  ModelSpec spec = ModelSpec::make(variant, universe_size, covariate_count, absent_mode);
  spec.random_walk_init = random_walk_init;
  if (variant != Variant::kStatic) {
    if (score_order) spec.score_order = *score_order;
    if (ar_order && variant == Variant::kMeanReverting) spec.ar_order = *ar_order;
  }
  spec.validate();
  return spec;
}

RunConfig parse_config(std::istream& in, std::string_view source) {
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(where(source, line_no) + "expected 'key = value'");
    }
    try {
      config.set(trim(std::string_view(line).substr(0, eq)),
                 std::string_view(line).substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(where(source, line_no) + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

PanelDataset load_dataset(std::istream& rankings, std::istream* covariates,
                          const RunConfig& config) {
  constexpr std::string_view kRankSource = "rankings";
  const csv::Table table = csv::read(rankings, kRankSource);
  const std::size_t c_time = table.column("time", kRankSource);
  const std::size_t c_item = table.column("item", kRankSource);
  const std::size_t c_rank = table.column("rank", kRankSource);
  if (table.rows.empty()) throw DataError("rankings: no data rows");

  PanelDataset data;
  std::unordered_map<std::string, std::size_t> item_index;
  std::vector<std::string> time_order;
  // time label -> (rank, item, line)
  std::map<std::string, std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>> by_time;

  for (const csv::Row& row : table.rows) {
    const std::string& time = row.fields[c_time];
    const std::string& item = row.fields[c_item];
    const std::string& rank_text = row.fields[c_rank];
    if (time.empty()) throw DataError(where(kRankSource, row.line) + "empty time label");
    if (item.empty()) throw DataError(where(kRankSource, row.line) + "empty item label");
    const auto rank = parse_number<long long>(rank_text);
    if (!rank || *rank <= 0) {
      throw DataError(where(kRankSource, row.line) + "rank must be a positive integer, got '" +
                      rank_text + "'");
    }
    auto [it, inserted] = item_index.try_emplace(item, data.item_labels.size());
    if (inserted) data.item_labels.push_back(item);
    auto [period, new_time] = by_time.try_emplace(time);
    if (new_time) time_order.push_back(time);
    for (const auto& [r, i, line] : period->second) {
      if (i == it->second) {
        throw DataError(where(kRankSource, row.line) + "item '" + item +
                        "' appears twice at time '" + time + "' (first on line " +
                        std::to_string(line) + ")");
      }
      if (r == static_cast<std::size_t>(*rank)) {
        throw DataError(where(kRankSource, row.line) + "tie: rank " + rank_text +
                        " assigned twice at time '" + time + "' (first on line " +
                        std::to_string(line) + "); ties are not supported");
      }
    }
    period->second.emplace_back(static_cast<std::size_t>(*rank), it->second, row.line);
  }

  if (all_integers(time_order)) {
    std::sort(time_order.begin(), time_order.end(), [](const std::string& a, const std::string& b) {
      return *parse_number<long long>(a) < *parse_number<long long>(b);
    });
  } else {
    std::sort(time_order.begin(), time_order.end());
  }

  data.universe_size = data.item_labels.size();
  std::unordered_map<std::string, std::size_t> period_index;
  for (const std::string& time : time_order) {
    auto entries = by_time.at(time);
    std::sort(entries.begin(), entries.end());
    std::vector<std::size_t> ordering;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& [r, i, line] = entries[k];
      if (r != k + 1) {
        throw DataError(where(kRankSource, line) + "ranks at time '" + time +
                        "' are not contiguous from 1 (expected rank " + std::to_string(k + 1) +
                        ", found " + std::to_string(r) + ")");
      }
      ordering.push_back(i);
    }
    period_index.emplace(time, data.period_labels.size());
    data.period_labels.push_back(time);
    data.rankings.emplace_back(data.universe_size, std::move(ordering));
  }

  // Covariates.
  std::vector<std::string> names = config.covariate_names;
  std::optional<csv::Table> cov_table;
  constexpr std::string_view kCovSource = "covariates";
  std::size_t c_ctime = 0, c_citem = 0, c_cname = 0, c_cvalue = 0;
  if (covariates) {
    cov_table = csv::read(*covariates, kCovSource);
    c_ctime = cov_table->column("time", kCovSource);
    c_citem = cov_table->column("item", kCovSource);
    c_cname = cov_table->column("covariate", kCovSource);
    c_cvalue = cov_table->column("value", kCovSource);
    if (names.empty()) {
      for (const csv::Row& row : cov_table->rows) {
        const std::string& name = row.fields[c_cname];
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
      }
    }
  }
  for (const std::string& s : config.sparse_covariates) {
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw DataError("sparse covariate '" + s + "' is not a declared covariate");
    }
  }

  const std::size_t n = data.universe_size;
  const std::size_t m = names.size();
  const std::size_t periods = data.rankings.size();
  data.covariate_count = m;
  data.covariate_names = names;
  constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
  data.covariates.assign(periods * n * m, kMissing);

  if (cov_table) {
    for (const csv::Row& row : cov_table->rows) {
      const std::string& time = row.fields[c_ctime];
      const std::string& item = row.fields[c_citem];
      const std::string& name = row.fields[c_cname];
      const auto t = period_index.find(time);
      if (t == period_index.end()) {
        throw DataError(where(kCovSource, row.line) + "time '" + time +
                        "' does not occur in the rankings");
      }
      const auto i = item_index.find(item);
      if (i == item_index.end()) {
        throw DataError(where(kCovSource, row.line) + "item '" + item +
                        "' does not occur in the rankings");
      }
      const auto j = std::find(names.begin(), names.end(), name);
      if (j == names.end()) {
        throw DataError(where(kCovSource, row.line) + "unknown covariate '" + name + "'");
      }
      const auto value = parse_number<double>(row.fields[c_cvalue]);
      if (!value || !std::isfinite(*value)) {
        throw DataError(where(kCovSource, row.line) + "covariate value '" +
                        row.fields[c_cvalue] + "' is not a finite number");
      }
      double& cell = data.covariates[(t->second * n + i->second) * m +
                                     static_cast<std::size_t>(j - names.begin())];
      if (!std::isnan(cell)) {
        throw DataError(where(kCovSource, row.line) + "duplicate value for (" + time + ", " +
                        item + ", " + name + ")");
      }
      cell = *value;
    }
  }

  const bool all_required = config.absent_mode == AbsentMode::kPartialLikelihood;
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double& cell = data.covariates[(t * n + i) * m + j];
        if (!std::isnan(cell)) continue;
        const bool required = all_required || data.rankings[t].contains(i);
        if (required && !config.sparse_covariates.contains(names[j])) {
          throw DataError("covariates: missing value for (" + data.period_labels[t] + ", " +
                          data.item_labels[i] + ", " + names[j] +
                          "); declare the covariate sparse to default it to 0");
        }
        cell = 0.0;
      }
    }
  }
  data.validate();
  return data;
}

PanelDataset load_dataset(const RunConfig& config) {
  if (config.rankings_path.empty()) throw InvalidArgument("no rankings file given");
  std::ifstream rankings(config.rankings_path, std::ios::binary);
  if (!rankings) throw DataError("cannot open '" + config.rankings_path + "'");
  std::ifstream covariates;
  if (!config.covariates_path.empty()) {
    covariates.open(config.covariates_path, std::ios::binary);
    if (!covariates) throw DataError("cannot open '" + config.covariates_path + "'");
    return load_dataset(rankings, &covariates, config);
  }
  return load_dataset(rankings, nullptr, config);
}

Matrix load_next_covariates(std::istream& in, const PanelDataset& data,
                            const RunConfig& config) {
  constexpr std::string_view kSource = "next covariates";
  const csv::Table table = csv::read(in, kSource);
  const std::size_t c_item = table.column("item", kSource);
  const std::size_t c_name = table.column("covariate", kSource);
  const std::size_t c_value = table.column("value", kSource);
  const std::size_t n = data.universe_size;
  const std::size_t m = data.covariate_count;
  Matrix out(n, m, std::numeric_limits<double>::quiet_NaN());
  for (const csv::Row& row : table.rows) {
    const auto i = std::find(data.item_labels.begin(), data.item_labels.end(), row.fields[c_item]);
    if (i == data.item_labels.end()) {
      throw DataError(where(kSource, row.line) + "unknown item '" + row.fields[c_item] + "'");
    }
    const auto j = std::find(data.covariate_names.begin(), data.covariate_names.end(),
                             row.fields[c_name]);
    if (j == data.covariate_names.end()) {
      throw DataError(where(kSource, row.line) + "unknown covariate '" + row.fields[c_name] +
                      "'");
    }
    const auto value = parse_number<double>(row.fields[c_value]);
    if (!value || !std::isfinite(*value)) {
      throw DataError(where(kSource, row.line) + "value '" + row.fields[c_value] +
                      "' is not a finite number");
    }
    out(static_cast<std::size_t>(i - data.item_labels.begin()),
        static_cast<std::size_t>(j - data.covariate_names.begin())) = *value;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isnan(out(i, j))) continue;
      if (!config.sparse_covariates.contains(data.covariate_names[j])) {
        throw DataError("next covariates: missing value for (" + data.item_labels[i] + ", " +
                        data.covariate_names[j] + ")");
      }
      out(i, j) = 0.0;
    }
  }
  return out;
}

std::string format_double(double value) { return fmt::format("{}", value); }

std::vector<std::size_t> lexicographic_order(const std::vector<std::string>& labels) {
  std::vector<std::size_t> idx(labels.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  return idx;
}

namespace {

std::string label_or_index(const std::vector<std::string>& labels, std::size_t i) {
  return i < labels.size() ? labels[i] : std::to_string(i + 1);
}

}  // namespace

void write_rankings(std::ostream& out, const PanelDataset& data) {
  out << "time,item,rank\n";
  for (std::size_t t = 0; t < data.period_count(); ++t) {
    const Ranking& y = data.rankings[t];
    const std::string time = label_or_index(data.period_labels, t);
    for (std::size_t i = 0; i < data.universe_size; ++i) {
      if (const auto r = y.rank_of(i)) {
        csv::write_row(out, {time, label_or_index(data.item_labels, i), std::to_string(*r)});
      }
    }
  }
}

void write_covariates(std::ostream& out, const PanelDataset& data) {
  out << "time,item,covariate,value\n";
  for (std::size_t t = 0; t < data.period_count(); ++t) {
    for (std::size_t i = 0; i < data.universe_size; ++i) {
      for (std::size_t j = 0; j < data.covariate_count; ++j) {
        csv::write_row(out, {label_or_index(data.period_labels, t),
                             label_or_index(data.item_labels, i),
                             j < data.covariate_names.size() ? data.covariate_names[j]
                                                             : "x" + std::to_string(j + 1),
                             format_double(data.covariate(t, i, j))});
      }
    }
  }
}

void write_item_path(std::ostream& out, const PanelDataset& data, const Matrix& path) {
  std::vector<std::string> labels(data.universe_size);
  for (std::size_t i = 0; i < data.universe_size; ++i) labels[i] = label_or_index(data.item_labels, i);
  const auto order = lexicographic_order(labels);
  std::vector<std::string> header{"time"};
  for (std::size_t i : order) header.push_back(labels[i]);
  csv::write_row(out, header);
  for (std::size_t t = 0; t < path.rows(); ++t) {
    std::vector<std::string> row{label_or_index(data.period_labels, t)};
    for (std::size_t i : order) row.push_back(format_double(path(t, i)));
    csv::write_row(out, row);
  }
}

}  // namespace gasrank
