#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "apbm/filtercore.hpp"

namespace apbm::systems {

using filter::Matrix;
using filter::Vector;

struct LorenzConfig {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double Ts = 0.01;
    /// Coefficient of -x2 in the second equation: 0 drops the term, 1 is the classical system.
    double damping = 1.0;
    int steps = 4000;
    Eigen::Vector3d x0 = Eigen::Vector3d::Ones();
    Eigen::Matrix3d meas_noise_cov = 1e-3 * Eigen::Matrix3d::Identity();
    /// The attractor stays within a few tens of the origin; a state component
    /// beyond this magnitude is reported as divergence.
    double divergence_bound = 1e6;

    /// sigma=28, rho=10, beta=8/3, Ts=1, no damping term. Diverges under Euler.
    static LorenzConfig paper();
    /// sigma=10, rho=28, beta=8/3, Ts=0.01, damping 1, 4000 steps.
    static LorenzConfig classical();
};

struct TrackingConfig {
    double Ts = 1.0;
    int steps = 500;
    Eigen::Vector4d x0{100.0, 100.0, 0.0, 0.0};  ///< (x, x_dot, y, y_dot)
    double omega0 = 0.05;                         ///< initial turn rate, rad/s
    double psi0_db = 30.0;                        ///< 10 log10(Psi_0), dBm
    double path_loss_exponent = 2.2;
    Eigen::Vector2d sensor_pos = Eigen::Vector2d::Zero();
    Eigen::Matrix2d meas_noise_cov = Eigen::Vector2d(1.0, 0.1).asDiagonal();
    Matrix u_cov = 0.1 * Matrix::Identity(4, 4);
    double v_var = 0.1;
    Matrix M = Matrix::Identity(4, 4);  ///< noise input matrix, 4 x dim(u)
};

/// Ground truth of one simulated run. Index k holds step k+1 (the initial
/// state is not stored).
struct SimTruth {
    std::vector<Vector> states;
    std::vector<double> omegas;  ///< tracking only
    std::vector<Vector> measurements;
    std::uint64_t seed = 0;

    bool operator==(const SimTruth&) const = default;
};

// --- Lorenz ----------------------------------------------------------------

/// (sigma (x2 - x1), x1 (rho - x3) - damping x2, x1 x2 - beta x3)
Eigen::Vector3d lorenz_deriv(const Eigen::Vector3d& x, const LorenzConfig& cfg);

/// Euler step x + Ts f(x).
Vector lorenz_step(const Vector& x, const LorenzConfig& cfg);

/// Noise-free Euler truth, measurements y = x + n. Throws NonFiniteState when
/// the state overflows or leaves divergence_bound.
SimTruth lorenz_simulate(const LorenzConfig& cfg, std::uint64_t seed);

/// Exact discretized Lorenz dynamics with identity measurement.
filter::StateSpaceModel lorenz_model(const LorenzConfig& cfg, const Matrix& Q, const Matrix& R);

// --- Target tracking -------------------------------------------------------

/// Constant-velocity matrix F.
Eigen::Matrix4d cv_matrix(double Ts);

/// Turn-rate dependent term G(omega). For |omega| < small_angle the entries with an
/// omega denominator use their small-angle limits.
Eigen::Matrix4d turn_matrix(double omega, double Ts, double small_angle = 1e-6);

/// F + G(omega), the truth transition of the tracking scenario.
Eigen::Matrix4d ct_matrix(double omega, double Ts, double small_angle = 1e-6);

/// (rss in dBm, bearing in (-pi, pi]) of position p seen from the sensor.
/// Throws SensorCollocated when p is within 1e-9 of the sensor.
Eigen::Vector2d rss_bearing_measure(const Eigen::Vector2d& p, const TrackingConfig& cfg);

SimTruth tracking_simulate(const TrackingConfig& cfg, std::uint64_t seed);

/// Linear CV transition F x with the RSS/bearing measurement (bearing row wrapped).
filter::StateSpaceModel cv_model(const TrackingConfig& cfg, const Matrix& Q, const Matrix& R);

}  // namespace apbm::systems
