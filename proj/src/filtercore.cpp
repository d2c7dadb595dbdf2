#include "apbm/filtercore.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

namespace apbm::filter {

namespace {

void check_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << " is " << m.rows() << "x" << m.cols();
        throw Error(ErrorCode::NotSquare, os.str());
    }
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Evaluates fn at every column of points. Exceptions thrown by a worker are
// rethrown on the calling thread.
Matrix evaluate(const VectorFn& fn, const Matrix& points, Execution exec) {
    const Eigen::Index count = points.cols();
    std::vector<Vector> values(static_cast<std::size_t>(count));
    std::exception_ptr failure;

    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index j = 0; j < count; ++j) {
            try {
                values[static_cast<std::size_t>(j)] = fn(points.col(j));
            } catch (...) {
#pragma omp critical(apbm_propagate_failure)
                if (!failure) failure = std::current_exception();
            }
        }
    } else {
        for (Eigen::Index j = 0; j < count; ++j) values[static_cast<std::size_t>(j)] = fn(points.col(j));
    }
    if (failure) std::rethrow_exception(failure);

    const Eigen::Index m = values.front().size();
    Matrix out(m, count);
    for (Eigen::Index j = 0; j < count; ++j) {
        const Vector& v = values[static_cast<std::size_t>(j)];
        if (v.size() != m) {
            throw Error(ErrorCode::DimensionMismatch, "function output size changed across cubature points");
        }
        if (!v.allFinite()) {
            std::ostringstream os;
            os << "non-finite value at cubature point " << j;
            throw Error(ErrorCode::NonFiniteFunctionValue, os.str());
        }
        out.col(j) = v;
    }
    return out;
}

}  // namespace

double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    double r = std::remainder(a, 2.0 * pi);  // [-pi, pi]
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void validate(const GaussianBelief& belief) {
    check_square(belief.cov, "covariance");
    if (belief.cov.rows() != belief.mean.size()) {
        throw Error(ErrorCode::DimensionMismatch, "mean and covariance sizes differ");
    }
    if (belief.mean.size() == 0) throw Error(ErrorCode::DimensionMismatch, "empty belief");
    if (!belief.mean.allFinite() || !belief.cov.allFinite()) {
        throw Error(ErrorCode::NonFinite, "belief contains non-finite entries");
    }
}

Matrix cholesky(const Matrix& sigma, const JitterPolicy& policy) {
    check_square(sigma, "matrix");
    if (!sigma.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
    const Eigen::Index n = sigma.rows();
    if (n == 0) return Matrix(0, 0);

    const double scale = std::max(1.0, max_abs(sigma));
    if (max_abs(sigma - sigma.transpose()) > 1e-10 * scale) {
        throw Error(ErrorCode::NotSymmetric, "asymmetry exceeds 1e-10 relative");
    }

    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();

    // A zero trace would freeze the jitter at zero; fall back to unit scale.
    const double mean_diag = sigma.trace() / static_cast<double>(n);
    double eps = policy.initial_scale * (mean_diag > 0.0 ? mean_diag : 1.0);
    for (int attempt = 0; attempt < policy.max_retries; ++attempt, eps *= policy.growth) {
        llt.compute(sigma + eps * Matrix::Identity(n, n));
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    std::ostringstream os;
    os << n << "x" << n << " matrix not positive definite after " << policy.max_retries << " jitter retries";
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
}

CubaturePointSet cubature_points(const GaussianBelief& belief) {
    validate(belief);
    const Eigen::Index n = belief.dim();
    const Matrix factor = cholesky(belief.cov);
    const double radius = std::sqrt(static_cast<double>(n));

    CubaturePointSet set;
    set.points.resize(n, 2 * n);
    set.weight = 1.0 / static_cast<double>(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector offset = radius * factor.col(i);
        set.points.col(2 * i) = belief.mean + offset;
        set.points.col(2 * i + 1) = belief.mean - offset;
    }
    return set;
}

Moments propagate(const VectorFn& fn, const GaussianBelief& belief, Execution exec) {
    const CubaturePointSet set = cubature_points(belief);
    const Matrix values = evaluate(fn, set.points, exec);
    const Eigen::Index m = values.rows();
    const double w = set.weight;

    Moments out;
    out.mean = w * values.rowwise().sum();
    const Matrix dy = values.colwise() - out.mean;
    const Matrix dx = set.points.colwise() - belief.mean;

    out.cov = Matrix::Zero(m, m);
    out.cov.selfadjointView<Eigen::Lower>().rankUpdate(dy, w);
    out.cov = out.cov.selfadjointView<Eigen::Lower>();
    out.crosscov = w * (dx * dy.transpose());
    return out;
}

GaussianBelief predict(const GaussianBelief& belief, const StateSpaceModel& model, Execution exec) {
    if (belief.dim() != model.state_dim || model.Q.rows() != model.state_dim || model.Q.cols() != model.state_dim) {
        throw Error(ErrorCode::DimensionMismatch, "predict: belief, model and Q dimensions disagree");
    }
    Moments mo = propagate(model.transition, belief, exec);
    if (mo.mean.size() != model.state_dim) {
        throw Error(ErrorCode::DimensionMismatch, "transition output has wrong dimension");
    }
    return {std::move(mo.mean), symmetrize(mo.cov + model.Q)};
}

GaussianBelief update(const GaussianBelief& belief, const StateSpaceModel& model, const Vector& y,
                      Execution exec) {
    if (belief.dim() != model.state_dim) {
        throw Error(ErrorCode::DimensionMismatch, "update: belief and model dimensions disagree");
    }
    if (y.size() != model.meas_dim || model.R.rows() != model.meas_dim || model.R.cols() != model.meas_dim) {
        throw Error(ErrorCode::DimensionMismatch, "update: observation or R has wrong dimension");
    }
    if (!y.allFinite()) throw Error(ErrorCode::NonFinite, "observation contains non-finite entries");
    if (!model.residual_wrap.empty() && static_cast<Eigen::Index>(model.residual_wrap.size()) != model.meas_dim) {
        throw Error(ErrorCode::DimensionMismatch, "residual_wrap size differs from meas_dim");
    }

    const Moments mo = propagate(model.measurement, belief, exec);
    if (mo.mean.size() != model.meas_dim) {
        throw Error(ErrorCode::DimensionMismatch, "measurement output has wrong dimension");
    }
    const Matrix innovation_cov = symmetrize(mo.cov + model.R);

    Matrix factor;
    try {
        factor = cholesky(innovation_cov);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotPositiveDefinite) throw;
        throw Error(ErrorCode::SingularInnovation, e.what());
    }

    Vector residual = y - mo.mean;
    for (std::size_t i = 0; i < model.residual_wrap.size(); ++i) {
        if (model.residual_wrap[i]) {
            const auto row = static_cast<Eigen::Index>(i);
            residual(row) = wrap_angle(residual(row));
        }
    }

    // K^T = Pyy^{-1} Pxy^T via two triangular solves against the factor.
    Matrix gain_t = factor.triangularView<Eigen::Lower>().solve(mo.crosscov.transpose());
    factor.triangularView<Eigen::Lower>().transpose().solveInPlace(gain_t);
    const Matrix gain = gain_t.transpose();

    GaussianBelief out;
    out.mean = belief.mean + gain * residual;
    out.cov = symmetrize(belief.cov - gain * innovation_cov * gain.transpose());
    if (!out.mean.allFinite() || !out.cov.allFinite()) {
        throw Error(ErrorCode::NonFinite, "update produced non-finite belief");
    }
    return out;
}

}  // namespace apbm::filter
