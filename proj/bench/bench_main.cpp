// Serial vs OpenMP timings for the two parallel kernels: cubature point
// evaluation inside propagate, and the Monte Carlo loop over runs.
//
//   apbm_bench [reps] [runs]
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "apbm/augmented.hpp"
#include "apbm/harness.hpp"
#include "apbm/systems.hpp"

using namespace apbm;
using Clock = std::chrono::steady_clock;

template <typename F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
}

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 20;
    const int runs = argc > 2 ? std::atoi(argv[2]) : 8;
    const int threads = harness::resolve_threads(0);
    std::printf("workers: %d (omp_get_max_threads %d)\n", threads, omp_get_max_threads());

    // 53-dim augmented tracking model, 106 cubature points
    const systems::TrackingConfig tc;
    const auto physics = systems::cv_model(tc, 0.1 * filter::Matrix::Identity(4, 4), tc.meas_noise_cov);
    const nn::MlpSpec spec({4, 5, 4});
    const auto cfg = ApbmConfig::defaults(Additive{}, spec, 10.0);
    const auto model = build_augmented_model(physics, spec, cfg);
    filter::GaussianBelief belief = augmented_prior({tc.x0, filter::Matrix::Identity(4, 4)}, cfg);
    belief.mean.tail(49).setConstant(0.05);

    filter::Moments serial, parallel;
    const double t_serial = best_of(reps, [&] { serial = filter::propagate(model.transition, belief, filter::Execution::Serial); });
    const double t_parallel =
        best_of(reps, [&] { parallel = filter::propagate(model.transition, belief, filter::Execution::Parallel); });
    const bool same = serial.mean == parallel.mean && serial.cov == parallel.cov && serial.crosscov == parallel.crosscov;
    std::printf("propagate n=53  serial %.3f ms  parallel %.3f ms  speedup %.2fx  identical=%s\n", 1e3 * t_serial,
                1e3 * t_parallel, t_serial / t_parallel, same ? "yes" : "NO");

    auto mc = harness::ExperimentConfig::defaults(harness::Experiment::Tracking);
    mc.n_runs = runs;
    const double t_one = best_of(1, [&] { harness::run_monte_carlo(mc, 1); });
    const double t_many = best_of(1, [&] { harness::run_monte_carlo(mc, threads); });
    std::printf("monte carlo %d runs  1 worker %.2f s  %d workers %.2f s  speedup %.2fx\n", runs, t_one, threads,
                t_many, t_one / t_many);
    return same ? 0 : 1;
}
