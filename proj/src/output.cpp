#include "apbm/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace apbm::harness {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw Error(ErrorCode::Io, path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

/// Reads a CSV, checks the header and returns the data rows.
std::vector<std::vector<std::string>> read_rows(const fs::path& path, const std::string& header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw Error(ErrorCode::Io, path.string() + ": expected header '" + header + "'");
    }
    const std::size_t columns = split(header).size();
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != columns) throw Error(ErrorCode::Io, path.string() + ": malformed row '" + line + "'");
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::string lambda_cell(const MethodKey& key) { return key.is_apbm() ? format_double(key.lambda) : std::string(); }

std::string lambda_file_tag(const MethodKey& key) {
    if (!key.is_apbm()) return to_string(key.method);
    return "apbm_lambda" + format_double(key.lambda);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::Io, "not a number: '" + s + "'");
    }
    return v;
}

void write_rmse_csv(const std::vector<Series>& series, const fs::path& path) {
    auto out = open_out(path);
    out << "step,method,lambda,rmse\n";
    for (const auto& s : series) {
        const std::string method = to_string(s.key.method);
        const std::string lambda = lambda_cell(s.key);
        for (std::size_t k = 0; k < s.values.size(); ++k) {
            out << (k + 1) << ',' << method << ',' << lambda << ',' << format_double(s.values[k]) << '\n';
        }
    }
    close_out(out, path);
}

namespace {

// Groups rows into series in order of first appearance, keyed by (method, lambda text).
std::vector<Series> group_rows(const std::vector<std::vector<std::string>>& rows, int method_col, int lambda_col,
                               int value_col, const fs::path& path) {
    std::vector<Series> out;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& row : rows) {
        const std::string method = method_col >= 0 ? row[static_cast<std::size_t>(method_col)] : "apbm";
        const std::string& lambda = row[static_cast<std::size_t>(lambda_col)];
        auto [it, inserted] = index.try_emplace({method, lambda}, out.size());
        if (inserted) {
            MethodKey key{parse_method(method), lambda.empty() ? std::nan("") : parse_double(lambda)};
            out.push_back({key, {}});
        }
        Series& s = out[it->second];
        const auto step = static_cast<std::size_t>(std::stoul(row[0]));
        if (step != s.values.size() + 1) throw Error(ErrorCode::Io, path.string() + ": steps out of order");
        s.values.push_back(parse_double(row[static_cast<std::size_t>(value_col)]));
    }
    return out;
}

}  // namespace

std::vector<Series> read_rmse_csv(const fs::path& path) {
    return group_rows(read_rows(path, "step,method,lambda,rmse"), 1, 2, 3, path);
}

void write_theta_var_csv(const std::vector<Series>& series, const fs::path& path) {
    auto out = open_out(path);
    out << "step,lambda,mean_variance\n";
    for (const auto& s : series) {
        const std::string lambda = format_double(s.key.lambda);
        for (std::size_t k = 0; k < s.values.size(); ++k) {
            out << (k + 1) << ',' << lambda << ',' << format_double(s.values[k]) << '\n';
        }
    }
    close_out(out, path);
}

std::vector<Series> read_theta_var_csv(const fs::path& path) {
    return group_rows(read_rows(path, "step,lambda,mean_variance"), -1, 1, 2, path);
}

void write_manifest_csv(const ExperimentConfig& cfg, const std::vector<RunRecord>& records, const fs::path& path) {
    auto out = open_out(path);
    out << "run,seed,method,lambda,status\n";
    const auto keys = method_keys(cfg);
    for (const auto& rec : records) {
        for (const auto& key : keys) {
            const FilterTrack* t = rec.find(key);
            out << rec.run << ',' << rec.seed << ',' << to_string(key.method) << ',' << lambda_cell(key) << ','
                << (t ? t->status : std::string("failed: missing")) << '\n';
        }
    }
    close_out(out, path);
}

void write_trajectory_csv(const systems::SimTruth& truth, const FilterTrack* track, const fs::path& path) {
    auto out = open_out(path);
    const Eigen::Index nx = truth.states.empty() ? 0 : truth.states.front().size();
    const Eigen::Index ny = truth.measurements.empty() ? 0 : truth.measurements.front().size();
    const bool with_est = track != nullptr && track->ok();
    out << "step";
    for (Eigen::Index i = 0; i < nx; ++i) out << ",truth_" << i;
    for (Eigen::Index i = 0; i < ny; ++i) out << ",meas_" << i;
    if (with_est) {
        for (Eigen::Index i = 0; i < nx; ++i) out << ",est_" << i;
    }
    out << '\n';
    for (std::size_t k = 0; k < truth.states.size(); ++k) {
        out << (k + 1);
        for (Eigen::Index i = 0; i < nx; ++i) out << ',' << format_double(truth.states[k](i));
        for (Eigen::Index i = 0; i < ny; ++i) out << ',' << format_double(truth.measurements[k](i));
        if (with_est) {
            for (Eigen::Index i = 0; i < nx; ++i) out << ',' << format_double(track->estimates[k](i));
        }
        out << '\n';
    }
    close_out(out, path);
}

void write_experiment_outputs(const ExperimentConfig& cfg, const std::vector<RunRecord>& records,
                              const MetricSeries& metrics, const fs::path& dir) {
    write_rmse_csv(metrics.rmse, dir / "rmse.csv");
    if (!metrics.theta_var.empty()) write_theta_var_csv(metrics.theta_var, dir / "theta_var.csv");
    write_manifest_csv(cfg, records, dir / "runs_manifest.csv");
    for (const auto& rec : records) {
        if (rec.run >= cfg.trajectory_runs) continue;
        for (const auto& track : rec.tracks) {
            std::ostringstream name;
            name << "run" << rec.run << '_' << lambda_file_tag(track.key) << ".csv";
            write_trajectory_csv(rec.truth, &track, dir / "trajectories" / name.str());
        }
    }
    emit_plot(metrics.rmse, "RMSE over Monte Carlo runs", "RMSE", dir / "rmse.svg");
    if (!metrics.theta_var.empty()) {
        emit_plot(metrics.theta_var, "Mean parameter variance", "E[Var(theta)]", dir / "theta_var.svg");
    }
}

}  // namespace apbm::harness
