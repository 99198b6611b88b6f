#pragma once

#include <map>
#include <string>
#include <vector>

#include "fracstrip/config.hpp"

namespace fracstrip {

/// Result of one experiment run: preformatted CSV rows (bitwise stable for a
/// given config and seed), calibrated constants, and a declarative plot
/// description. Wall-clock lives only in the JSON metadata.
struct RunReport {
    ExperimentConfig config;
    std::string version;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::map<std::string, double> calibrated;
    std::string plot_description;
    double wall_ms = 0.0;
};

/// Executes the configured experiment. Pure compute: writing happens in
/// write_outputs. Deterministic given (config, seed), independent of the
/// thread count.
RunReport run_experiment(const ExperimentConfig& config);

/// Smallest K0 on the geometric grid making the sup-tail bound dominate the
/// Monte Carlo exceedance frequencies of the reference stationary fOU.
double calibrate_k0(const ExperimentConfig& config);

/// Writes results.csv, report.json and plot.txt under out_dir (created if
/// missing). Nothing is written outside out_dir.
void write_outputs(const RunReport& report, const std::string& out_dir);

/// Shortest round-trip decimal form; locale-independent ('.' separator).
std::string format_cell(double value);

} // namespace fracstrip
