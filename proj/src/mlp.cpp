#include "apbm/mlp.hpp"

#include <sstream>

namespace apbm::nn {

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void check_length(const MlpSpec& spec, Eigen::Index length) {
    const auto expected = static_cast<Eigen::Index>(param_count(spec));
    if (length != expected) {
        std::ostringstream os;
        os << "theta has " << length << " entries, spec needs " << expected;
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

}  // namespace

MlpSpec::MlpSpec(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw Error(ErrorCode::InvalidConfig, "MLP needs at least input and output sizes");
    for (int s : sizes_) {
        if (s <= 0) throw Error(ErrorCode::InvalidConfig, "MLP layer sizes must be positive");
    }
}

std::size_t param_count(const MlpSpec& spec) {
    const auto& s = spec.layer_sizes();
    std::size_t total = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const auto a = static_cast<std::size_t>(s[i]);
        const auto b = static_cast<std::size_t>(s[i + 1]);
        total += a * b + b;
    }
    return total;
}

MlpParams::MlpParams(const MlpSpec& spec, Eigen::VectorXd theta) : theta_(std::move(theta)) {
    check_length(spec, theta_.size());
}

MlpParams MlpParams::zeros(const MlpSpec& spec) {
    return MlpParams(spec, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(param_count(spec))));
}

Eigen::VectorXd pack(const MlpSpec& spec, const std::vector<Layer>& layers) {
    const auto& s = spec.layer_sizes();
    if (layers.size() != spec.layer_count()) {
        throw Error(ErrorCode::DimensionMismatch, "layer count differs from spec");
    }
    Eigen::VectorXd theta(static_cast<Eigen::Index>(param_count(spec)));
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        if (layer.weight.rows() != s[l + 1] || layer.weight.cols() != s[l] || layer.bias.size() != s[l + 1]) {
            throw Error(ErrorCode::DimensionMismatch, "layer shape differs from spec");
        }
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
            theta.segment(at, layer.weight.cols()) = layer.weight.row(r).transpose();
            at += layer.weight.cols();
        }
        theta.segment(at, layer.bias.size()) = layer.bias;
        at += layer.bias.size();
    }
    return theta;
}

std::vector<Layer> unpack(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta) {
    check_length(spec, theta.size());
    const auto& s = spec.layer_sizes();
    std::vector<Layer> layers;
    layers.reserve(spec.layer_count());
    Eigen::Index at = 0;
    for (std::size_t l = 0; l + 1 < s.size(); ++l) {
        const int in = s[l];
        const int out = s[l + 1];
        Layer layer;
        layer.weight = RowMajorMap(theta.data() + at, out, in);
        at += static_cast<Eigen::Index>(in) * out;
        layer.bias = theta.segment(at, out);
        at += out;
        layers.push_back(std::move(layer));
    }
    return layers;
}

Eigen::VectorXd forward(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                        const Eigen::Ref<const Eigen::VectorXd>& x) {
    check_length(spec, theta.size());
    if (x.size() != spec.input_dim()) {
        std::ostringstream os;
        os << "input has " << x.size() << " entries, network expects " << spec.input_dim();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    const auto& s = spec.layer_sizes();
    Eigen::VectorXd activation = x;
    Eigen::Index at = 0;
    for (std::size_t l = 0; l + 1 < s.size(); ++l) {
        const int in = s[l];
        const int out = s[l + 1];
        const RowMajorMap weight(theta.data() + at, out, in);
        at += static_cast<Eigen::Index>(in) * out;
        Eigen::VectorXd next = weight * activation + theta.segment(at, out);
        at += out;
        if (l + 2 < s.size()) next = next.cwiseMax(0.0);
        activation = std::move(next);
    }
    return activation;
}

}  // namespace apbm::nn
