#include "apbm/random.hpp"

#include "apbm/error.hpp"

namespace apbm {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x41504u};
    return std::mt19937_64(seq);
}

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols()) throw Error(ErrorCode::NotSquare, "noise covariance");
    if (cov.isDiagonal(0.0)) {
        if ((cov.diagonal().array() < 0.0).any()) {
            throw Error(ErrorCode::NotPositiveDefinite, "noise covariance has negative variances");
        }
        factor_ = cov.diagonal().cwiseSqrt().asDiagonal();
        return;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
        factor_ = llt.matrixL();
        return;
    }
    // Singular PSD: symmetric square root with tiny negative eigenvalues clipped.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff())) {
        throw Error(ErrorCode::NotPositiveDefinite, "noise covariance is indefinite");
    }
    factor_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Eigen::VectorXd GaussianSampler::operator()(std::mt19937_64& engine) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(factor_.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(engine);
    return factor_ * z;
}

}  // namespace apbm
