#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gasrank/io.hpp"
#include "gasrank/prediction.hpp"

namespace gasrank::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kNumericalFailure = 3,
};

// Each command reads its inputs from the config, writes CSV files under
// config.out_dir and a short human-readable report to `log`. The return value
// is the process exit code; errors propagate as exceptions.
int cmd_fit(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_study(const RunConfig& config, std::ostream& log);
int cmd_predict(const RunConfig& config, std::ostream& log);

// "top:ITEM:K", "rank:ITEM:R" or "order:ITEM1,ITEM2,...".
RankingEvent parse_event(std::string_view spec, const std::vector<std::string>& item_labels,
                         const std::vector<std::size_t>& participants);

// Full command line: subcommand, flags, exception-to-exit-code mapping.
int run(int argc, char** argv);

}  // namespace gasrank::cli
