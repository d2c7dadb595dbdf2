#include "apbm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace apbm::harness {

using json = nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw Error(ErrorCode::InvalidConfig, where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw Error(ErrorCode::InvalidConfig, "unknown key '" + where + key + "'");
    }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "bad value for '" + where + key + "': " + e.what());
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root,
                   {"experiment", "preset", "n_runs", "steps", "base_seed", "threads", "lambda_grid", "methods",
                    "filter", "truth", "output"},
                   "");
    if (!root.contains("experiment")) throw Error(ErrorCode::InvalidConfig, "missing 'experiment'");
    const Experiment experiment = parse_experiment(get<std::string>(root, "experiment", ""));
    const Preset preset = root.contains("preset") ? parse_preset(get<std::string>(root, "preset", "")) : Preset::Paper;
    ExperimentConfig cfg = ExperimentConfig::defaults(experiment, preset);

    if (root.contains("n_runs")) cfg.n_runs = get<int>(root, "n_runs", "");
    if (root.contains("steps")) cfg.steps = get<int>(root, "steps", "");
    if (root.contains("base_seed")) cfg.base_seed = get<std::uint64_t>(root, "base_seed", "");
    if (root.contains("threads")) cfg.threads = get<int>(root, "threads", "");
    if (root.contains("lambda_grid")) cfg.lambda_grid = get<std::vector<double>>(root, "lambda_grid", "");
    if (root.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : get<std::vector<std::string>>(root, "methods", "")) cfg.methods.push_back(parse_method(m));
    }
    if (root.contains("filter")) {
        const json& f = root["filter"];
        reject_unknown(f, {"q_x", "q_theta", "theta0_var", "hidden_layers"}, "filter.");
        if (f.contains("q_x")) cfg.filter.q_x = get<double>(f, "q_x", "filter.");
        if (f.contains("q_theta")) cfg.filter.q_theta = get<double>(f, "q_theta", "filter.");
        if (f.contains("theta0_var")) cfg.filter.theta0_var = get<double>(f, "theta0_var", "filter.");
        if (f.contains("hidden_layers")) cfg.filter.hidden_layers = get<std::vector<int>>(f, "hidden_layers", "filter.");
    }
    if (root.contains("truth")) {
        const json& t = root["truth"];
        reject_unknown(t, {"omega0"}, "truth.");
        if (t.contains("omega0")) cfg.omega0 = get<double>(t, "omega0", "truth.");
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        reject_unknown(o, {"trajectory_runs"}, "output.");
        if (o.contains("trajectory_runs")) cfg.trajectory_runs = get<int>(o, "trajectory_runs", "output.");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

std::string dump_config(const ExperimentConfig& cfg) {
    json root;
    root["experiment"] = to_string(cfg.experiment);
    root["preset"] = to_string(cfg.preset);
    root["n_runs"] = cfg.n_runs;
    root["steps"] = cfg.resolved_steps();
    root["base_seed"] = cfg.base_seed;
    root["lambda_grid"] = cfg.lambda_grid;
    json methods = json::array();
    for (Method m : cfg.methods) methods.push_back(to_string(m));
    root["methods"] = methods;
    json f;
    f["q_x"] = cfg.resolved_q_x();
    f["q_theta"] = cfg.resolved_q_theta();
    f["theta0_var"] = cfg.filter.theta0_var;
    f["hidden_layers"] = cfg.filter.hidden_layers;
    root["filter"] = f;
    if (cfg.omega0) root["truth"] = json{{"omega0", *cfg.omega0}};
    root["output"] = json{{"trajectory_runs", cfg.trajectory_runs}};
    return root.dump(2) + "\n";
}

}  // namespace apbm::harness
