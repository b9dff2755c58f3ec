#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "trackctl/linalg.hpp"
#include "trackctl/problem.hpp"

namespace trackctl::app {

enum class PlotLayout { kNone, kTwoPane, kSinglePane, kLogLog };

// Outcome of one subcommand: a table for CSV output, metrics for the
// summary line, and free-form details written next to the CSV.
struct RunResult {
  std::string subcommand;
  std::string csv_name;
  std::vector<std::string> columns;
  Matrix table;  // rows x columns
  std::vector<std::pair<std::string, double>> metrics;
  nlohmann::json details = nlohmann::json::object();
  PlotLayout layout = PlotLayout::kNone;
  std::string title;
  bool converged = true;

  /// "MSE=<v> MAXERR=<v> ITERS=<n>" (plus any further metrics).
  std::string metrics_line() const;
  double metric(const std::string& name) const;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"brunovsky", "track", "hum", "pde-heat",
                                              "pde-wave", "gramian", "moment", "sweep"};
  return names;
}

/// Dispatches a subcommand. `threads` caps the sweep fan-out (0 = the
/// TRACKCTL_THREADS environment variable, else hardware concurrency).
RunResult run(const std::string& subcommand, const ProblemConfig& cfg, unsigned threads = 0);

/// Header row, then one line per table row; reals as %.17g, LF endings.
void write_csv(const RunResult& result, const std::string& path);

/// Parses a file written by write_csv.
std::pair<std::vector<std::string>, Matrix> read_csv(const std::string& path);

/// Gnuplot script plotting `csv_relpath` in the layout of the result.
std::string plot_script(const RunResult& result, const std::string& csv_relpath);
void emit_plot_script(const RunResult& result, const std::string& csv_relpath, const std::string& path);

}  // namespace trackctl::app
