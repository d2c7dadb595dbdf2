#pragma once

#include <filesystem>
#include <string>

#include "apbm/harness.hpp"

namespace apbm::harness {

/// Parses a JSON experiment description. Unknown keys anywhere are rejected.
///
///   {
///     "experiment": "tracking" | "lorenz",
///     "preset": "paper" | "classical",
///     "n_runs": 100, "steps": 500, "base_seed": 1, "threads": 0,
///     "lambda_grid": [0, 0.01, 0.1, 10, 1e6],
///     "methods": ["apbm", "cv", "true_model"],
///     "filter": {"q_x": 0.1, "q_theta": 1e-4, "theta0_var": 1e-2, "hidden_layers": [5]},
///     "truth": {"omega0": 0.05},
///     "output": {"trajectory_runs": 1}
///   }
///
/// Omitted keys take ExperimentConfig::defaults(experiment, preset).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config (used to record the resolved config next to outputs).
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace apbm::harness
