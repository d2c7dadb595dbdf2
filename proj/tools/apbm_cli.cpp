// Command-line front end: simulate, run, sweep, plot.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "apbm/config.hpp"
#include "apbm/metrics.hpp"
#include "apbm/output.hpp"
#include "apbm/systems.hpp"

namespace fs = std::filesystem;
using namespace apbm;
using namespace apbm::harness;

namespace {

std::vector<double> parse_lambdas(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "inf") {
            out.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidConfig, "bad lambda '" + item + "'");
        }
    }
    return out;
}

void run_experiment(const ExperimentConfig& cfg, const fs::path& out) {
    cfg.validate();
    const auto records = run_monte_carlo(cfg);
    fs::create_directories(out);
    {
        std::ofstream cfg_out(out / "config.json", std::ios::binary);
        cfg_out << dump_config(cfg);
    }
    write_manifest_csv(cfg, records, out / "runs_manifest.csv");
    for (const auto& s : failure_summary(cfg, records)) {
        if (s.failed > 0) {
            std::cerr << "warning: " << s.key.label() << " failed in " << s.failed << "/" << s.total << " runs\n";
        }
    }
    enforce_failure_budget(cfg, records);
    write_experiment_outputs(cfg, records, compute_metrics(cfg, records), out);
    std::cout << "wrote " << out.string() << " (" << cfg.n_runs << " runs, " << cfg.resolved_steps()
              << " steps)\n";
}

void simulate(const std::string& experiment, const std::string& preset, std::uint64_t seed, int steps,
              const fs::path& out) {
    ExperimentConfig cfg = ExperimentConfig::defaults(parse_experiment(experiment), parse_preset(preset));
    cfg.steps = steps;
    cfg.validate();
    const auto truth = cfg.experiment == Experiment::Tracking ? systems::tracking_simulate(cfg.tracking(), seed)
                                                              : systems::lorenz_simulate(cfg.lorenz(), seed);
    write_trajectory_csv(truth, nullptr, out / "trajectory.csv");
    std::cout << "wrote " << (out / "trajectory.csv").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Augmented physics-based model filtering experiments"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Simulate one ground-truth run and its measurements");
    std::string sim_experiment = "tracking";
    std::string sim_preset = "paper";
    std::uint64_t sim_seed = 1;
    int sim_steps = 0;
    std::string sim_out;
    sim->add_option("--experiment", sim_experiment, "lorenz | tracking")
        ->check(CLI::IsMember({"lorenz", "tracking"}));
    sim->add_option("--preset", sim_preset, "paper | classical")->check(CLI::IsMember({"paper", "classical"}));
    sim->add_option("--seed", sim_seed, "Simulation seed");
    sim->add_option("--steps", sim_steps, "Number of steps (0 = experiment default)");
    sim->add_option("--out", sim_out, "Output directory")->required();

    auto* run = app.add_subcommand("run", "Run the Monte Carlo experiment described by a config file");
    std::string run_config;
    std::string run_out;
    int run_threads = 0;
    run->add_option("--config", run_config, "JSON config")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "Output directory")->required();
    run->add_option("--threads", run_threads, "Worker count (overrides config and APBM_THREADS)");

    auto* sweep = app.add_subcommand("sweep", "Run a config over a lambda grid");
    std::string sweep_config;
    std::string sweep_lambdas = "0,0.01,0.1,10,1e6";
    int sweep_runs = 100;
    std::string sweep_out;
    int sweep_threads = 0;
    sweep->add_option("--config", sweep_config, "JSON config")->required()->check(CLI::ExistingFile);
    sweep->add_option("--lambdas", sweep_lambdas, "Comma-separated lambda values ('inf' allowed)");
    sweep->add_option("--runs", sweep_runs, "Monte Carlo runs");
    sweep->add_option("--out", sweep_out, "Output directory")->required();
    sweep->add_option("--threads", sweep_threads, "Worker count (overrides config and APBM_THREADS)");

    auto* plot = app.add_subcommand("plot", "Render rmse.csv / theta_var.csv of a result directory to SVG");
    std::string plot_in;
    std::string plot_out;
    plot->add_option("--in", plot_in, "Result directory")->required()->check(CLI::ExistingDirectory);
    plot->add_option("--out", plot_out, "SVG file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            simulate(sim_experiment, sim_preset, sim_seed, sim_steps, sim_out);
        } else if (*run) {
            ExperimentConfig cfg = load_config(run_config);
            if (run_threads > 0) cfg.threads = run_threads;
            run_experiment(cfg, run_out);
        } else if (*sweep) {
            ExperimentConfig cfg = load_config(sweep_config);
            cfg.lambda_grid = parse_lambdas(sweep_lambdas);
            cfg.n_runs = sweep_runs;
            if (sweep_threads > 0) cfg.threads = sweep_threads;
            run_experiment(cfg, sweep_out);
        } else if (*plot) {
            plot_directory(plot_in, plot_out);
            std::cout << "wrote " << plot_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
