#pragma once

#include <limits>
#include <variant>
#include <vector>

#include "apbm/filtercore.hpp"
#include "apbm/mlp.hpp"

namespace apbm {

/// g = f(x) + gamma(x; theta). gamma outputs d_x values.
struct Additive {};

/// Listed components evolve as x_i + gamma_i(x; theta); the rest follow the
/// physics transition. gamma outputs one value per listed index.
struct ReplaceComponents {
    std::vector<int> indices;
};

using Combiner = std::variant<Additive, ReplaceComponents>;

/// Stands for lambda = +infinity; clamped to kLambdaClamp when building a model.
inline constexpr double kLambdaInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kLambdaClamp = 1e12;

struct ApbmConfig {
    Combiner combiner = Additive{};
    double lambda = 0.0;
    filter::Vector theta_bar;    ///< anchor, length P (may be empty when lambda == 0)
    filter::Matrix Q_theta;      ///< random-walk covariance of theta, P x P
    filter::Matrix theta0_cov;   ///< initial theta covariance, P x P
    filter::Vector theta0_mean;  ///< initial theta mean, length P

    /// Q_theta = 1e-4 I, theta0_cov = 1e-2 I, theta0_mean = theta_bar, and
    /// theta_bar the zero anchor (zero vector also for ReplaceComponents,
    /// where it is only used as a starting point since lambda must be 0).
    static ApbmConfig defaults(Combiner combiner, const nn::MlpSpec& spec, double lambda);
};

/// theta_bar with g(f(x), x; theta_bar) = f(x). For ReLU/linear layers this
/// is the zero vector. Throws NoAnchorExists for ReplaceComponents.
filter::Vector anchor_theta_bar(const Combiner& combiner, const nn::MlpSpec& spec);

/// lambda as used by the filter: +inf is clamped to kLambdaClamp.
double effective_lambda(double lambda);

/// State-space model over z = [x; theta]:
///   transition  [x; theta] -> [g(f(x), x; theta); theta],  Q = blkdiag(Q_x, Q_theta)
///   measurement [x; theta] -> [h(x); theta],               R = blkdiag(R_y, I / lambda)
/// With lambda == 0 the theta rows are dropped from the measurement.
filter::StateSpaceModel build_augmented_model(const filter::StateSpaceModel& physics, const nn::MlpSpec& nn,
                                              const ApbmConfig& cfg);

/// Observation fed to the augmented model: [y; theta_bar], or y when lambda == 0.
filter::Vector augmented_observation(const filter::Vector& y, const ApbmConfig& cfg);

/// Joint prior N([x0; theta0_mean], blkdiag(P0, theta0_cov)).
filter::GaussianBelief augmented_prior(const filter::GaussianBelief& state_prior, const ApbmConfig& cfg);

/// One predict + update cycle on the augmented state.
filter::GaussianBelief apbm_step(const filter::GaussianBelief& belief, const filter::StateSpaceModel& model,
                                 const filter::Vector& y, const ApbmConfig& cfg,
                                 filter::Execution exec = filter::Execution::Serial);

}  // namespace apbm
