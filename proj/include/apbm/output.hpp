#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "apbm/harness.hpp"
#include "apbm/metrics.hpp"

namespace apbm::harness {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

// rmse.csv: step,method,lambda,rmse (lambda empty for non-APBM methods)
void write_rmse_csv(const std::vector<Series>& series, const std::filesystem::path& path);
std::vector<Series> read_rmse_csv(const std::filesystem::path& path);

// theta_var.csv: step,lambda,mean_variance
void write_theta_var_csv(const std::vector<Series>& series, const std::filesystem::path& path);
std::vector<Series> read_theta_var_csv(const std::filesystem::path& path);

// runs_manifest.csv: run,seed,method,lambda,status
void write_manifest_csv(const ExperimentConfig& cfg, const std::vector<RunRecord>& records,
                        const std::filesystem::path& path);

// step,truth_0..,meas_0..,est_0..  (est columns omitted when track is null)
void write_trajectory_csv(const systems::SimTruth& truth, const FilterTrack* track,
                          const std::filesystem::path& path);

/// Writes every output of a finished Monte Carlo experiment into dir:
/// rmse.csv, theta_var.csv, runs_manifest.csv, trajectories/, rmse.svg, theta_var.svg.
void write_experiment_outputs(const ExperimentConfig& cfg, const std::vector<RunRecord>& records,
                              const MetricSeries& metrics, const std::filesystem::path& dir);

/// Static SVG line chart of the curves, one polyline per series.
void emit_plot(const std::vector<Series>& series, const std::string& title, const std::string& y_label,
               const std::filesystem::path& path);

/// Reads rmse.csv (and theta_var.csv when present) from dir and writes one SVG.
void plot_directory(const std::filesystem::path& dir, const std::filesystem::path& out);

}  // namespace apbm::harness
