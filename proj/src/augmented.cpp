#include "apbm/augmented.hpp"

#include <cmath>
#include <sstream>

namespace apbm {

using filter::Matrix;
using filter::Vector;

namespace {

Matrix block_diag(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

void expect_square(const Matrix& m, Eigen::Index n, const char* name) {
    if (m.rows() != n || m.cols() != n) {
        std::ostringstream os;
        os << name << " must be " << n << "x" << n << ", got " << m.rows() << "x" << m.cols();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

Eigen::Index gamma_output_dim(const Combiner& combiner, Eigen::Index state_dim) {
    if (const auto* rep = std::get_if<ReplaceComponents>(&combiner)) {
        return static_cast<Eigen::Index>(rep->indices.size());
    }
    return state_dim;
}

}  // namespace

ApbmConfig ApbmConfig::defaults(Combiner combiner, const nn::MlpSpec& spec, double lambda) {
    const auto p = static_cast<Eigen::Index>(nn::param_count(spec));
    ApbmConfig cfg;
    cfg.combiner = std::move(combiner);
    cfg.lambda = lambda;
    cfg.theta_bar = Vector::Zero(p);
    cfg.Q_theta = 1e-4 * Matrix::Identity(p, p);
    cfg.theta0_cov = 1e-2 * Matrix::Identity(p, p);
    cfg.theta0_mean = cfg.theta_bar;
    return cfg;
}

Vector anchor_theta_bar(const Combiner& combiner, const nn::MlpSpec& spec) {
    if (std::holds_alternative<ReplaceComponents>(combiner)) {
        throw Error(ErrorCode::NoAnchorExists,
                    "replacing a physics component leaves no parameter value that recovers the physics model");
    }
    return Vector::Zero(static_cast<Eigen::Index>(nn::param_count(spec)));
}

double effective_lambda(double lambda) {
    if (std::isnan(lambda) || lambda < 0.0) throw Error(ErrorCode::NegativeLambda, "lambda must be >= 0");
    return std::min(lambda, kLambdaClamp);
}

filter::StateSpaceModel build_augmented_model(const filter::StateSpaceModel& physics, const nn::MlpSpec& nn,
                                              const ApbmConfig& cfg) {
    const double lambda = effective_lambda(cfg.lambda);
    const Eigen::Index nx = physics.state_dim;
    const Eigen::Index ny = physics.meas_dim;
    const auto np = static_cast<Eigen::Index>(nn::param_count(nn));

    if (nn.input_dim() != nx) {
        throw Error(ErrorCode::DimensionMismatch, "network input must equal the physical state dimension");
    }
    if (nn.output_dim() != gamma_output_dim(cfg.combiner, nx)) {
        throw Error(ErrorCode::DimensionMismatch, "network output does not match the combiner");
    }
    if (const auto* rep = std::get_if<ReplaceComponents>(&cfg.combiner)) {
        for (int i : rep->indices) {
            if (i < 0 || i >= nx) throw Error(ErrorCode::DimensionMismatch, "replaced component index out of range");
        }
    }
    expect_square(physics.Q, nx, "Q_x");
    expect_square(physics.R, ny, "R_y");
    expect_square(cfg.Q_theta, np, "Q_theta");
    if (lambda > 0.0 && cfg.theta_bar.size() != np) {
        throw Error(ErrorCode::DimensionMismatch, "theta_bar length differs from parameter count");
    }

    filter::StateSpaceModel out;
    out.state_dim = nx + np;
    out.Q = block_diag(physics.Q, cfg.Q_theta);

    auto f = physics.transition;
    auto combiner = cfg.combiner;
    out.transition = [f, nn, combiner, nx, np](const Vector& z) -> Vector {
        const auto x = z.head(nx);
        const auto theta = z.tail(np);
        Vector next(z.size());
        Vector fx = f(Vector(x));
        const Vector gamma = nn::forward(nn, theta, x);
        if (std::holds_alternative<Additive>(combiner)) {
            next.head(nx) = fx + gamma;
        } else {
            const auto& indices = std::get<ReplaceComponents>(combiner).indices;
            for (std::size_t k = 0; k < indices.size(); ++k) {
                const int i = indices[k];
                fx(i) = x(i) + gamma(static_cast<Eigen::Index>(k));
            }
            next.head(nx) = fx;
        }
        next.tail(np) = theta;
        return next;
    };

    auto h = physics.measurement;
    out.residual_wrap = physics.residual_wrap;
    if (lambda == 0.0) {
        out.meas_dim = ny;
        out.R = physics.R;
        out.measurement = [h, nx](const Vector& z) -> Vector { return h(Vector(z.head(nx))); };
    } else {
        out.meas_dim = ny + np;
        out.R = block_diag(physics.R, Matrix::Identity(np, np) / lambda);
        out.measurement = [h, nx, ny, np](const Vector& z) -> Vector {
            Vector obs(ny + np);
            obs.head(ny) = h(Vector(z.head(nx)));
            obs.tail(np) = z.tail(np);
            return obs;
        };
        if (!out.residual_wrap.empty()) out.residual_wrap.resize(static_cast<std::size_t>(ny + np), false);
    }
    return out;
}

Vector augmented_observation(const Vector& y, const ApbmConfig& cfg) {
    if (effective_lambda(cfg.lambda) == 0.0) return y;
    Vector obs(y.size() + cfg.theta_bar.size());
    obs << y, cfg.theta_bar;
    return obs;
}

filter::GaussianBelief augmented_prior(const filter::GaussianBelief& state_prior, const ApbmConfig& cfg) {
    const Eigen::Index np = cfg.theta0_mean.size();
    expect_square(cfg.theta0_cov, np, "theta0_cov");
    filter::GaussianBelief out;
    out.mean.resize(state_prior.dim() + np);
    out.mean << state_prior.mean, cfg.theta0_mean;
    out.cov = block_diag(state_prior.cov, cfg.theta0_cov);
    return out;
}

filter::GaussianBelief apbm_step(const filter::GaussianBelief& belief, const filter::StateSpaceModel& model,
                                 const Vector& y, const ApbmConfig& cfg, filter::Execution exec) {
    const filter::GaussianBelief predicted = filter::predict(belief, model, exec);
    return filter::update(predicted, model, augmented_observation(y, cfg), exec);
}

}  // namespace apbm
