#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apbm/filtercore.hpp"
#include "apbm/systems.hpp"

namespace apbm::harness {

enum class Experiment { Lorenz, Tracking };
enum class Preset { Paper, Classical };
enum class Method { Apbm, Cv, TrueModel };

std::string to_string(Experiment e);
std::string to_string(Preset p);
std::string to_string(Method m);
Experiment parse_experiment(const std::string& s);
Preset parse_preset(const std::string& s);
Method parse_method(const std::string& s);

/// Filter-side settings shared by every method of an experiment.
struct FilterSettings {
    std::optional<double> q_x;      ///< isotropic Q_x; default 0.1 (tracking) / 1e-4 (Lorenz)
    std::optional<double> q_theta;  ///< isotropic Q_theta; default 1e-4 (tracking) / 1e-3 (Lorenz)
    double theta0_var = 1e-2;
    std::vector<int> hidden_layers{5};
};

struct ExperimentConfig {
    Experiment experiment = Experiment::Tracking;
    Preset preset = Preset::Paper;
    int n_runs = 100;
    int steps = 0;  ///< 0 selects the experiment default (500 tracking, 4000 Lorenz)
    std::uint64_t base_seed = 1;
    std::vector<double> lambda_grid{0.0, 0.01, 0.1, 10.0, 1e6};
    std::vector<Method> methods{Method::Apbm, Method::Cv};
    FilterSettings filter;
    std::optional<double> omega0;  ///< tracking truth initial turn rate
    int trajectory_runs = 1;       ///< per-run trajectory CSVs written for runs [0, trajectory_runs)
    int threads = 0;               ///< 0: APBM_THREADS if set, else the OpenMP default

    /// Defaults per experiment: tracking compares APBM against CV over
    /// the lambda grid, Lorenz compares the lambda = 0 APBM against the true model.
    static ExperimentConfig defaults(Experiment experiment, Preset preset = Preset::Paper);

    int resolved_steps() const;
    double resolved_q_x() const;
    double resolved_q_theta() const;
    systems::LorenzConfig lorenz() const;
    systems::TrackingConfig tracking() const;
    /// Throws InvalidConfig / NoAnchorExists on inconsistent settings.
    void validate() const;
};

/// Identifies one filter configuration. lambda is NaN for non-APBM methods.
struct MethodKey {
    Method method = Method::Cv;
    double lambda = 0.0;

    bool is_apbm() const { return method == Method::Apbm; }
    bool operator==(const MethodKey& o) const;
    std::string label() const;
};

/// All keys the config asks for, in output order: APBM per lambda, then the baselines.
std::vector<MethodKey> method_keys(const ExperimentConfig& cfg);

/// Output of one filter over one run.
struct FilterTrack {
    MethodKey key;
    std::string status = "ok";          ///< "ok" or "failed: <reason>"
    std::vector<filter::Vector> estimates;  ///< physical state mean per step
    std::vector<filter::Vector> thetas;     ///< parameter mean per step (APBM only)

    bool ok() const { return status == "ok"; }
};

struct RunRecord {
    int run = 0;
    std::uint64_t seed = 0;
    std::uint64_t measurement_hash = 0;  ///< FNV-1a of the measurement stream every filter consumed
    std::string sim_status = "ok";
    systems::SimTruth truth;
    std::vector<FilterTrack> tracks;

    const FilterTrack* find(const MethodKey& key) const;
};

std::uint64_t hash_measurements(const std::vector<filter::Vector>& measurements);

/// Initial filter belief for a run: mean drawn around the true x0 from the
/// run's initial-estimate stream, covariance the declared prior covariance.
filter::GaussianBelief initial_belief(const ExperimentConfig& cfg, std::uint64_t seed);

/// Simulates run `run` (seed base_seed + run) and filters it with every configured method.
RunRecord run_single(const ExperimentConfig& cfg, int run);

/// All runs, ordered by run index. Runs execute on `threads` workers (0 = default);
/// the result does not depend on the worker count.
std::vector<RunRecord> run_monte_carlo(const ExperimentConfig& cfg, int threads = 0);

/// Worker count: explicit > 0 wins, then APBM_THREADS, then the OpenMP default.
int resolve_threads(int requested);

struct FailureSummary {
    MethodKey key;
    int failed = 0;
    int total = 0;
};
std::vector<FailureSummary> failure_summary(const ExperimentConfig& cfg, const std::vector<RunRecord>& records);

/// Throws TooManyFailures when any method failed in more than 5% of runs.
void enforce_failure_budget(const ExperimentConfig& cfg, const std::vector<RunRecord>& records);

}  // namespace apbm::harness
