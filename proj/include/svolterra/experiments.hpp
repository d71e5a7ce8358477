#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "svolterra/run_config.hpp"

namespace svolterra {

struct ExperimentResult {
  std::string name;
  bool pass = false;
  /// Ordered key/value lines of `<name>.report.txt`.
  std::vector<std::pair<std::string, std::string>> report;
};

/// Runs one experiment and writes `<name>.csv` and `<name>.report.txt` (plus
/// experiment-specific side files) into `dir`. Library errors are caught and
/// turn into a failing result.
ExperimentResult run_experiment(const std::string& name, const RunConfig& config,
                                const std::filesystem::path& dir, std::ostream& log,
                                bool verbose);

/// Gnuplot script with one plot per experiment CSV that was written.
void write_plot_script(const std::vector<ExperimentResult>& results, const RunConfig& config,
                       const std::filesystem::path& dir);

}  // namespace svolterra
