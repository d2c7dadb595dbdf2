#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "apbm/error.hpp"

namespace apbm::nn {

/// Fully connected network [d_in, h_1, ..., d_out]: ReLU on hidden layers,
/// identity on the output layer.
class MlpSpec {
public:
    explicit MlpSpec(std::vector<int> layer_sizes);

    const std::vector<int>& layer_sizes() const { return sizes_; }
    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    std::size_t layer_count() const { return sizes_.size() - 1; }

    bool operator==(const MlpSpec&) const = default;

private:
    std::vector<int> sizes_;
};

/// Sum over consecutive (a, b) of a*b + b.
std::size_t param_count(const MlpSpec& spec);

/// One affine layer; weight has one row per output unit.
struct Layer {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
};

/// Flat theta whose length always matches its spec.
class MlpParams {
public:
    MlpParams(const MlpSpec& spec, Eigen::VectorXd theta);
    static MlpParams zeros(const MlpSpec& spec);

    const Eigen::VectorXd& theta() const { return theta_; }

private:
    Eigen::VectorXd theta_;
};

// theta layout, layer by layer: weight row-major (rows = output units), then bias.
Eigen::VectorXd pack(const MlpSpec& spec, const std::vector<Layer>& layers);
std::vector<Layer> unpack(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta);

/// Evaluates the network straight from the flat vector (no unpacking), so a
/// segment of a filter state can be passed in directly.
Eigen::VectorXd forward(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                        const Eigen::Ref<const Eigen::VectorXd>& x);

inline Eigen::VectorXd forward(const MlpSpec& spec, const MlpParams& params,
                               const Eigen::Ref<const Eigen::VectorXd>& x) {
    return forward(spec, params.theta(), x);
}

}  // namespace apbm::nn
