#include "apbm/metrics.hpp"

#include <cmath>

namespace apbm::harness {

std::vector<int> error_dims(Experiment experiment) {
    if (experiment == Experiment::Tracking) return {0, 2};
    return {0, 1, 2};
}

double sample_variance(const filter::Vector& v) {
    if (v.size() < 2) return 0.0;
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

std::vector<double> rmse_curve(const std::vector<RunRecord>& records, const MethodKey& key,
                               std::span<const int> dims) {
    std::vector<double> sum;
    std::size_t runs = 0;
    for (const auto& rec : records) {
        const FilterTrack* t = rec.find(key);
        if (t == nullptr || !t->ok()) continue;
        const std::size_t steps = rec.truth.states.size();
        if (runs == 0) sum.assign(steps, 0.0);
        if (steps != sum.size() || t->estimates.size() != steps) {
            throw Error(ErrorCode::DimensionMismatch, "runs have different lengths");
        }
        for (std::size_t k = 0; k < steps; ++k) {
            for (int d : dims) {
                const double e = rec.truth.states[k](d) - t->estimates[k](d);
                sum[k] += e * e;
            }
        }
        ++runs;
    }
    if (runs == 0) throw Error(ErrorCode::EmptyRecords, "no successful runs for " + key.label());
    const double denom = static_cast<double>(dims.size()) * static_cast<double>(runs);
    for (double& s : sum) s = std::sqrt(s / denom);
    return sum;
}

std::vector<double> weight_variance_curve(const std::vector<RunRecord>& records, const MethodKey& key) {
    std::vector<double> sum;
    std::size_t runs = 0;
    for (const auto& rec : records) {
        const FilterTrack* t = rec.find(key);
        if (t == nullptr || !t->ok()) continue;
        if (t->thetas.empty() && !t->estimates.empty()) {
            throw Error(ErrorCode::MissingThetaSnapshots, key.label() + " has no parameter snapshots");
        }
        if (runs == 0) sum.assign(t->thetas.size(), 0.0);
        if (t->thetas.size() != sum.size()) throw Error(ErrorCode::DimensionMismatch, "runs have different lengths");
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += sample_variance(t->thetas[k]);
        ++runs;
    }
    if (runs == 0) throw Error(ErrorCode::EmptyRecords, "no successful runs for " + key.label());
    for (double& s : sum) s /= static_cast<double>(runs);
    return sum;
}

MetricSeries compute_metrics(const ExperimentConfig& cfg, const std::vector<RunRecord>& records) {
    const auto dims = error_dims(cfg.experiment);
    MetricSeries out;
    for (const auto& key : method_keys(cfg)) {
        out.rmse.push_back({key, rmse_curve(records, key, dims)});
        if (key.is_apbm()) out.theta_var.push_back({key, weight_variance_curve(records, key)});
    }
    return out;
}

}  // namespace apbm::harness
