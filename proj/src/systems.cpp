#include "apbm/systems.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "apbm/random.hpp"

namespace apbm::systems {

namespace {

void check_state(const Vector& x, int step, double bound = std::numeric_limits<double>::infinity()) {
    if (!x.allFinite()) {
        std::ostringstream os;
        os << "state became non-finite at step " << step;
        throw Error(ErrorCode::NonFiniteState, os.str());
    }
    if (x.cwiseAbs().maxCoeff() > bound) {
        std::ostringstream os;
        os << "state diverged past " << bound << " at step " << step;
        throw Error(ErrorCode::NonFiniteState, os.str());
    }
}

}  // namespace

LorenzConfig LorenzConfig::paper() {
    LorenzConfig cfg;
    cfg.sigma = 28.0;
    cfg.rho = 10.0;
    cfg.beta = 8.0 / 3.0;
    cfg.Ts = 1.0;
    cfg.damping = 0.0;
    return cfg;
}

LorenzConfig LorenzConfig::classical() { return LorenzConfig{}; }

Eigen::Vector3d lorenz_deriv(const Eigen::Vector3d& x, const LorenzConfig& cfg) {
    return {cfg.sigma * (x(1) - x(0)), x(0) * (cfg.rho - x(2)) - cfg.damping * x(1), x(0) * x(1) - cfg.beta * x(2)};
}

Vector lorenz_step(const Vector& x, const LorenzConfig& cfg) {
    const Eigen::Vector3d x3 = x;
    return x3 + cfg.Ts * lorenz_deriv(x3, cfg);
}

SimTruth lorenz_simulate(const LorenzConfig& cfg, std::uint64_t seed) {
    if (!(cfg.Ts > 0.0) || cfg.steps < 1) throw Error(ErrorCode::InvalidConfig, "Lorenz needs Ts > 0 and steps >= 1");
    auto engine = make_engine(seed, stream::kMeasurement);
    const GaussianSampler noise(cfg.meas_noise_cov);

    SimTruth truth;
    truth.seed = seed;
    truth.states.reserve(static_cast<std::size_t>(cfg.steps));
    truth.measurements.reserve(static_cast<std::size_t>(cfg.steps));
    Vector x = cfg.x0;
    for (int k = 1; k <= cfg.steps; ++k) {
        x = lorenz_step(x, cfg);
        check_state(x, k, cfg.divergence_bound);
        truth.states.push_back(x);
        truth.measurements.push_back(x + noise(engine));
    }
    return truth;
}

filter::StateSpaceModel lorenz_model(const LorenzConfig& cfg, const Matrix& Q, const Matrix& R) {
    filter::StateSpaceModel m;
    m.state_dim = 3;
    m.meas_dim = 3;
    m.transition = [cfg](const Vector& x) { return lorenz_step(x, cfg); };
    m.measurement = [](const Vector& x) { return x; };
    m.Q = Q;
    m.R = R;
    return m;
}

Eigen::Matrix4d cv_matrix(double Ts) {
    Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
    F(0, 1) = Ts;
    F(2, 3) = Ts;
    return F;
}

Eigen::Matrix4d turn_matrix(double omega, double Ts, double small_angle) {
    const double wt = omega * Ts;
    const double s = std::sin(wt);
    const double c = std::cos(wt);
    double one_minus_cos_over_w;
    double sin_over_w;
    if (std::abs(omega) < small_angle) {
        one_minus_cos_over_w = omega * Ts * Ts / 2.0;
        sin_over_w = Ts;
    } else {
        one_minus_cos_over_w = (1.0 - c) / omega;
        sin_over_w = s / omega;
    }
    Eigen::Matrix4d G;
    // clang-format off
    G << 0, s / Ts,               0, -one_minus_cos_over_w,
         0, c,                    0, -s,
         0, one_minus_cos_over_w, 0, sin_over_w,
         0, s,                    0, c;
    // clang-format on
    return G;
}

Eigen::Matrix4d ct_matrix(double omega, double Ts, double small_angle) {
    return cv_matrix(Ts) + turn_matrix(omega, Ts, small_angle);
}

Eigen::Vector2d rss_bearing_measure(const Eigen::Vector2d& p, const TrackingConfig& cfg) {
    const Eigen::Vector2d d = p - cfg.sensor_pos;
    const double range = d.norm();
    if (!(range >= 1e-9)) throw Error(ErrorCode::SensorCollocated, "target coincides with the sensor");
    return {cfg.psi0_db - 10.0 * cfg.path_loss_exponent * std::log10(range), std::atan2(d(1), d(0))};
}

SimTruth tracking_simulate(const TrackingConfig& cfg, std::uint64_t seed) {
    if (cfg.steps < 1) throw Error(ErrorCode::InvalidConfig, "tracking needs steps >= 1");
    if (cfg.M.rows() != 4 || cfg.M.cols() != cfg.u_cov.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "M must be 4 x dim(u)");
    }
    if (cfg.v_var < 0.0) throw Error(ErrorCode::InvalidConfig, "v_var must be >= 0");
    auto process = make_engine(seed, stream::kProcess);
    auto meas = make_engine(seed, stream::kMeasurement);
    const GaussianSampler u_noise(cfg.u_cov);
    const GaussianSampler y_noise(cfg.meas_noise_cov);
    std::normal_distribution<double> v_noise(0.0, std::sqrt(cfg.v_var));

    SimTruth truth;
    truth.seed = seed;
    Vector x = cfg.x0;
    double omega = cfg.omega0;
    for (int k = 1; k <= cfg.steps; ++k) {
        x = ct_matrix(omega, cfg.Ts) * x + cfg.M * u_noise(process);
        omega += v_noise(process);
        check_state(x, k);
        truth.states.push_back(x);
        truth.omegas.push_back(omega);
        const Eigen::Vector2d p(x(0), x(2));
        truth.measurements.push_back(rss_bearing_measure(p, cfg) + y_noise(meas));
    }
    return truth;
}

filter::StateSpaceModel cv_model(const TrackingConfig& cfg, const Matrix& Q, const Matrix& R) {
    filter::StateSpaceModel m;
    m.state_dim = 4;
    m.meas_dim = 2;
    const Eigen::Matrix4d F = cv_matrix(cfg.Ts);
    m.transition = [F](const Vector& x) -> Vector { return F * x; };
    m.measurement = [cfg](const Vector& x) -> Vector {
        return rss_bearing_measure(Eigen::Vector2d(x(0), x(2)), cfg);
    };
    m.Q = Q;
    m.R = R;
    m.residual_wrap = {false, true};
    return m;
}

}  // namespace apbm::systems
