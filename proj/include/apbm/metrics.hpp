#pragma once

#include <span>
#include <vector>

#include "apbm/harness.hpp"

namespace apbm::harness {

/// Per-step curve of one method configuration.
struct Series {
    MethodKey key;
    std::vector<double> values;
};

struct MetricSeries {
    std::vector<Series> rmse;
    std::vector<Series> theta_var;  ///< APBM keys only
};

/// State indices entering the error: position (0, 2) for tracking, all for Lorenz.
std::vector<int> error_dims(Experiment experiment);

/// RMSE_k = sqrt(sum_r ||p_k - p_hat_k||^2 / (d N)), over the runs in which
/// `key` succeeded. Throws EmptyRecords when there are none.
std::vector<double> rmse_curve(const std::vector<RunRecord>& records, const MethodKey& key,
                               std::span<const int> dims);

/// Mean over runs of the sample variance (divisor P - 1) of the P parameter
/// estimates at each step. Throws MissingThetaSnapshots / EmptyRecords.
std::vector<double> weight_variance_curve(const std::vector<RunRecord>& records, const MethodKey& key);

/// Sample variance with divisor size - 1.
double sample_variance(const filter::Vector& v);

MetricSeries compute_metrics(const ExperimentConfig& cfg, const std::vector<RunRecord>& records);

}  // namespace apbm::harness
