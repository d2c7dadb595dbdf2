#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "apbm/error.hpp"

namespace apbm::filter {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Deterministic vector-valued map evaluated at cubature points.
using VectorFn = std::function<Vector(const Vector&)>;

/// Gaussian approximation of a (possibly augmented) state: N(mean, cov).
struct GaussianBelief {
    Vector mean;
    Matrix cov;

    Eigen::Index dim() const { return mean.size(); }
};

/// Discrete-time model x_k = transition(x_{k-1}) + q, y_k = measurement(x_k) + r.
/// Noise is never added inside the two functions.
struct StateSpaceModel {
    Eigen::Index state_dim = 0;
    Eigen::Index meas_dim = 0;
    VectorFn transition;
    VectorFn measurement;
    Matrix Q;
    Matrix R;
    /// Rows whose residual is an angle and must be wrapped into (-pi, pi].
    /// Empty means no wrapping; otherwise its size equals meas_dim.
    std::vector<bool> residual_wrap;
};

/// Third-degree spherical-radial rule: 2n points stored as columns, uniform weight.
struct CubaturePointSet {
    Matrix points;
    double weight = 0.0;

    Eigen::Index count() const { return points.cols(); }
};

/// Moments of l(x) for x ~ N(mu, Sigma) under the cubature rule.
struct Moments {
    Vector mean;
    Matrix cov;
    Matrix crosscov;  ///< E[(x - mu)(l(x) - mean)^T], n x m
};

/// How point evaluations are scheduled. Both produce bit-identical results.
enum class Execution { Serial, Parallel };

struct JitterPolicy {
    double initial_scale = 1e-12;  ///< epsilon_0 = initial_scale * trace / n
    double growth = 10.0;
    int max_retries = 10;
};

/// Lower-triangular S with S S^T = sigma. When the plain factorization fails,
/// retries on sigma + eps I with eps growing geometrically (see JitterPolicy).
/// Throws NotSquare, NotSymmetric, NonFinite or NotPositiveDefinite.
Matrix cholesky(const Matrix& sigma, const JitterPolicy& policy = {});

CubaturePointSet cubature_points(const GaussianBelief& belief);

Moments propagate(const VectorFn& fn, const GaussianBelief& belief,
                  Execution exec = Execution::Serial);

/// Time update: moments of the transition, plus Q.
GaussianBelief predict(const GaussianBelief& belief, const StateSpaceModel& model,
                       Execution exec = Execution::Serial);

/// Measurement update with observation y. Innovation covariance is inverted
/// through its Cholesky factor; angle rows are wrapped before the gain.
GaussianBelief update(const GaussianBelief& belief, const StateSpaceModel& model,
                      const Vector& y, Execution exec = Execution::Serial);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// (m + m^T) / 2
Matrix symmetrize(const Matrix& m);

/// Throws unless the belief is finite, square and dimensionally consistent.
void validate(const GaussianBelief& belief);

}  // namespace apbm::filter
