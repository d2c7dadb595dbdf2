// Acceptance checks. Each criterion prints one PASS/FAIL line; details go on
// indented lines above it. Run with --criterion N, or without arguments for all.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "apbm/filtercore.hpp"
#include "apbm/harness.hpp"
#include "apbm/metrics.hpp"
#include "apbm/output.hpp"
#include "test_support.hpp"

using namespace apbm;
using namespace apbm::harness;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void detail(const std::string& s) { std::cout << "    " << s << "\n"; }

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

bool report(int id, const char* name, bool ok, const std::string& summary) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << summary << std::endl;
    return ok;
}

bool criterion_1() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
        const auto sys = oracle::random_lti(rng, 4, 2);
        worst = std::max(worst, support::ckf_vs_kf_max_diff(sys, 100, rng));
    }
    const double elapsed = seconds_since(t0);
    return report(1, "filter oracle equivalence", worst <= 1e-8 && elapsed < 5.0,
                  "max |ckf - kf| = " + num(worst) + " (<= 1e-8), " + num(elapsed) + " s (< 5)");
}

bool criterion_2() {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> dim(1, 60);
    double worst = 0.0;
    double worst_full = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = dim(rng);
        const int m = dim(rng);
        const Eigen::MatrixXd A = oracle::random_matrix(rng, m, n);
        const Eigen::VectorXd b = oracle::random_matrix(rng, m, 1);
        // PSD, with a rank-deficient covariance every fourth trial
        const int rank = trial % 4 == 0 ? std::max(1, n / 2) : n;
        const Eigen::MatrixXd L = oracle::random_matrix(rng, n, rank);
        const Eigen::MatrixXd cov = L * L.transpose() / static_cast<double>(rank);
        const filter::GaussianBelief belief{oracle::random_matrix(rng, n, 1), cov};
        const auto mo = filter::propagate([&](const filter::Vector& x) -> filter::Vector { return A * x + b; }, belief);
        const Eigen::VectorXd mean = A * belief.mean + b;
        const Eigen::MatrixXd out_cov = A * cov * A.transpose();
        const Eigen::MatrixXd cross = cov * A.transpose();
        double err = (mo.mean - mean).cwiseAbs().maxCoeff();
        err = std::max(err, (mo.cov - out_cov).cwiseAbs().maxCoeff());
        err = std::max(err, (mo.crosscov - cross).cwiseAbs().maxCoeff());
        worst = std::max(worst, err);
        if (rank == n) worst_full = std::max(worst_full, err);
    }
    detail("full-rank covariances: " + num(worst_full) + ", rank-deficient (jitter path): " + num(worst));
    return report(2, "cubature exactness for affine maps", worst <= 1e-10,
                  "max moment error over 200 maps = " + num(worst) + " (<= 1e-10)");
}

bool criterion_3() {
    auto cfg = ExperimentConfig::defaults(Experiment::Tracking);
    cfg.n_runs = 10;
    cfg.lambda_grid = {1e12};
    cfg.methods = {Method::Apbm, Method::Cv};
    cfg.filter.q_theta = 0.0;
    cfg.filter.theta0_var = 0.0;  // theta starts exactly at the anchor
    cfg.trajectory_runs = 0;
    const auto recs = run_monte_carlo(cfg);
    const MethodKey apbm_key{Method::Apbm, 1e12};
    const MethodKey cv_key{Method::Cv, std::nan("")};

    double worst_abs = 0.0;
    double worst_rel = 0.0;
    double largest_state = 0.0;
    bool all_ok = true;
    for (const auto& rec : recs) {
        const auto* a = rec.find(apbm_key);
        const auto* c = rec.find(cv_key);
        if (!a || !c || !a->ok() || !c->ok()) {
            detail("run " + std::to_string(rec.run) + ": a filter failed");
            all_ok = false;
            continue;
        }
        for (std::size_t k = 0; k < c->estimates.size(); ++k) {
            const Eigen::VectorXd diff = (a->estimates[k] - c->estimates[k]).cwiseAbs();
            const double mag = c->estimates[k].cwiseAbs().maxCoeff();
            worst_abs = std::max(worst_abs, diff.maxCoeff());
            worst_rel = std::max(worst_rel, diff.maxCoeff() / std::max(1.0, mag));
            largest_state = std::max(largest_state, mag);
        }
    }
    detail("largest |CV estimate| = " + num(largest_state));
    detail("max |apbm - cv| relative to max(1, |cv|) = " + num(worst_rel));
    return report(3, "anchor collapse at lambda=1e12", all_ok && worst_abs <= 1e-6,
                  "max |apbm - cv| over 10 seeds x 500 steps = " + num(worst_abs) + " (<= 1e-6)");
}

// The 100-run tracking experiment shared by criteria 4 and 5.
MetricSeries tracking_reproduction(double& elapsed) {
    auto cfg = ExperimentConfig::defaults(Experiment::Tracking);
    cfg.trajectory_runs = 0;
    const auto t0 = Clock::now();
    const auto recs = run_monte_carlo(cfg);
    for (const auto& s : failure_summary(cfg, recs)) {
        if (s.failed > 0) detail(s.key.label() + " failed in " + std::to_string(s.failed) + " runs");
    }
    auto metrics = compute_metrics(cfg, recs);
    elapsed = seconds_since(t0);
    return metrics;
}

double final_value(const std::vector<Series>& series, const MethodKey& key) {
    for (const auto& s : series) {
        if (s.key == key) return s.values.back();
    }
    throw std::runtime_error("missing series " + key.label());
}

bool criterion_4() {
    double elapsed = 0.0;
    const auto m = tracking_reproduction(elapsed);
    const MethodKey cv_key{Method::Cv, std::nan("")};
    const double cv = final_value(m.rmse, cv_key);
    auto apbm = [&](double l) { return final_value(m.rmse, {Method::Apbm, l}); };
    for (double l : {0.0, 0.01, 0.1, 10.0, 1e6}) detail("final RMSE apbm lambda=" + num(l) + ": " + num(apbm(l)));
    detail("final RMSE cv: " + num(cv));

    bool ok = true;
    auto check = [&](bool cond, const std::string& what) {
        detail(std::string(cond ? "ok   " : "FAIL ") + what);
        ok = ok && cond;
    };
    for (double l : {0.01, 0.1, 10.0}) check(apbm(l) < cv, "lambda=" + num(l) + " beats cv");
    check(std::abs(apbm(1e6) - cv) <= 0.15 * cv, "lambda=1e6 within 15% of cv");
    const double worst_other = std::max({apbm(0.01), apbm(0.1), apbm(10.0), apbm(1e6)});
    check(apbm(0.0) > worst_other, "lambda=0 is the worst apbm");
    check(apbm(0.0) > 5.0, "lambda=0 final RMSE above 5 m");
    const double best = std::min({apbm(0.01), apbm(0.1), apbm(10.0), apbm(1e6)});
    check(best <= 3.0, "best lambda final RMSE <= 3 m");
    check(cv >= 1.5 && cv <= 5.0, "cv final RMSE in [1.5, 5] m");
    check(elapsed < 600.0, "runtime " + num(elapsed) + " s < 600 s");
    return report(4, "tracking reproduction", ok, ok ? "orderings and bands hold" : "see lines above");
}

bool criterion_5() {
    double elapsed = 0.0;
    const auto m = tracking_reproduction(elapsed);
    const std::vector<double> grid{0.01, 0.1, 10.0, 1e6};
    std::vector<double> v;
    for (double l : grid) {
        v.push_back(final_value(m.theta_var, {Method::Apbm, l}));
        detail("final E[Var(theta)] lambda=" + num(l) + ": " + num(v.back()));
    }
    bool ok = true;
    for (std::size_t i = 1; i < v.size(); ++i) ok = ok && v[i] < v[i - 1];
    return report(5, "weight variance ordering", ok, ok ? "strictly decreasing in lambda" : "ordering broken");
}

bool criterion_6() {
    auto cfg = ExperimentConfig::defaults(Experiment::Lorenz, Preset::Classical);
    cfg.trajectory_runs = 0;
    const auto recs = run_monte_carlo(cfg);
    const auto m = compute_metrics(cfg, recs);
    const auto& apbm = m.rmse.at(0).values;
    const auto& truth = m.rmse.at(1).values;
    const std::size_t n = apbm.size();
    const std::size_t tenth = n / 10;
    auto window_mean = [](const std::vector<double>& v, std::size_t from, std::size_t to) {
        double s = 0.0;
        for (std::size_t k = from; k < to; ++k) s += v[k];
        return s / static_cast<double>(to - from);
    };
    const double first = window_mean(apbm, 0, tenth) / window_mean(truth, 0, tenth);
    const double last = window_mean(apbm, n - tenth, n) / window_mean(truth, n - tenth, n);
    detail("apbm/true RMSE ratio, first 10%: " + num(first));
    detail("apbm/true RMSE ratio, last 10%: " + num(last));
    return report(6, "Lorenz reproduction", last <= 2.0 && last < first,
                  "last-10% ratio " + num(last) + " (<= 2), first-10% ratio " + num(first));
}

std::uint64_t hash_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::uint64_t h = 1469598103934665603ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

bool same_csvs(const fs::path& a, const fs::path& b, int& compared) {
    bool ok = true;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (entry.path().extension() != ".csv") continue;
        const fs::path other = b / fs::relative(entry.path(), a);
        ++compared;
        if (!fs::exists(other) || hash_file(entry.path()) != hash_file(other)) {
            detail("differs: " + fs::relative(entry.path(), a).string());
            ok = false;
        }
    }
    return ok;
}

bool criterion_7() {
    const fs::path root = fs::temp_directory_path() / "apbm_acceptance_determinism";
    fs::remove_all(root);
    auto tracking = ExperimentConfig::defaults(Experiment::Tracking);
    tracking.n_runs = 6;
    tracking.trajectory_runs = 2;
    auto lorenz = ExperimentConfig::defaults(Experiment::Lorenz, Preset::Classical);
    lorenz.n_runs = 4;
    lorenz.steps = 1000;

    bool ok = true;
    int compared = 0;
    for (const auto& [name, cfg] : {std::pair{"tracking", tracking}, std::pair{"lorenz", lorenz}}) {
        std::vector<fs::path> dirs;
        for (int threads : {1, 3, 1}) {
            const fs::path dir = root / (std::string(name) + "_t" + std::to_string(threads) + "_" +
                                         std::to_string(dirs.size()));
            const auto recs = run_monte_carlo(cfg, threads);
            write_experiment_outputs(cfg, recs, compute_metrics(cfg, recs), dir);
            dirs.push_back(dir);
        }
        ok = same_csvs(dirs[0], dirs[1], compared) && ok;
        ok = same_csvs(dirs[0], dirs[2], compared) && ok;
    }
    fs::remove_all(root);
    return report(7, "determinism across reruns and worker counts", ok && compared > 0,
                  std::to_string(compared) + " CSV comparisons, " + (ok ? "all byte-identical" : "mismatch"));
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<bool()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                      criterion_5, criterion_6, criterion_7};
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            selected.push_back(std::atoi(argv[++i]));
        } else {
            std::cerr << "usage: test_acceptance [--criterion N]...\n";
            return 2;
        }
    }
    if (selected.empty()) {
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
    }
    bool all = true;
    for (int id : selected) {
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::cerr << "no criterion " << id << "\n";
            return 2;
        }
        try {
            all = criteria[static_cast<std::size_t>(id - 1)]() && all;
        } catch (const std::exception& e) {
            report(id, "exception", false, e.what());
            all = false;
        }
    }
    return all ? 0 : 1;
}
