#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace apbm {

/// Independent, reproducible engine for (seed, stream). Streams separate the
/// process noise, measurement noise and initial-estimate draws of one run.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream);

namespace stream {
inline constexpr std::uint64_t kProcess = 0;
inline constexpr std::uint64_t kMeasurement = 1;
inline constexpr std::uint64_t kInitialEstimate = 2;
}  // namespace stream

/// Draws from N(0, cov) with a fixed square-root factor.
class GaussianSampler {
public:
    explicit GaussianSampler(const Eigen::MatrixXd& cov);

    Eigen::VectorXd operator()(std::mt19937_64& engine) const;
    Eigen::Index dim() const { return factor_.rows(); }

private:
    Eigen::MatrixXd factor_;
};

}  // namespace apbm
