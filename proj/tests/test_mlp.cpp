#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "apbm/mlp.hpp"

using namespace apbm;
using namespace apbm::nn;

namespace {

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST_CASE("parameter counts") {
    CHECK(param_count(MlpSpec({4, 5, 4})) == 49);
    CHECK(param_count(MlpSpec({3, 5, 1})) == 26);
    CHECK(param_count(MlpSpec({1, 1})) == 2);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(MlpSpec({3}), Error);
    CHECK_THROWS_AS(MlpSpec({3, 0, 1}), Error);
}

TEST_CASE("zero parameters give a zero network") {
    const MlpSpec spec({4, 5, 4});
    const auto zero = MlpParams::zeros(spec);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        CHECK(forward(spec, zero, random_vector(rng, 4) * 100.0).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("hand-evaluated [1,1,1] network") {
    const MlpSpec spec({1, 1, 1});
    Eigen::VectorXd theta(4);
    theta << 1.0, -2.0, 3.0, 0.5;  // w1, b1, w2, b2
    const MlpParams params(spec, theta);
    CHECK(forward(spec, params, Eigen::VectorXd::Constant(1, 5.0))(0) == doctest::Approx(9.5));
    CHECK(forward(spec, params, Eigen::VectorXd::Constant(1, 0.0))(0) == doctest::Approx(0.5));
}

TEST_CASE("packing order: weights row-major then bias") {
    const MlpSpec tiny({1, 1});
    const auto layers = unpack(tiny, Eigen::Vector2d(2.0, 3.0));
    REQUIRE(layers.size() == 1);
    CHECK(layers[0].weight(0, 0) == 2.0);
    CHECK(layers[0].bias(0) == 3.0);

    const MlpSpec spec({2, 3});
    Eigen::VectorXd theta(9);
    theta << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    const auto l = unpack(spec, theta);
    CHECK(l[0].weight(0, 1) == 2.0);
    CHECK(l[0].weight(1, 0) == 3.0);
    CHECK(l[0].weight(2, 1) == 6.0);
    CHECK(l[0].bias(2) == 9.0);
}

TEST_CASE("pack and unpack are inverse for random specs") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> width(1, 6);
    std::uniform_int_distribution<int> depth(1, 4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> sizes{width(rng)};
        const int layers = depth(rng);
        for (int l = 0; l < layers; ++l) sizes.push_back(width(rng));
        const MlpSpec spec(sizes);
        const auto theta = random_vector(rng, static_cast<Eigen::Index>(param_count(spec)));
        CHECK(pack(spec, unpack(spec, theta)) == theta);
    }
    const MlpSpec spec({4, 5, 4});
    const auto theta = random_vector(rng, 49);
    CHECK(pack(spec, unpack(spec, theta)) == theta);
}

TEST_CASE("unpacked layers evaluate like forward") {
    std::mt19937_64 rng(4);
    const MlpSpec spec({3, 4, 2});
    const auto theta = random_vector(rng, static_cast<Eigen::Index>(param_count(spec)));
    const auto layers = unpack(spec, theta);
    const auto x = random_vector(rng, 3);
    const Eigen::VectorXd hidden = (layers[0].weight * x + layers[0].bias).cwiseMax(0.0);
    const Eigen::VectorXd out = layers[1].weight * hidden + layers[1].bias;
    CHECK((forward(spec, theta, x) - out).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("length and input guards") {
    const MlpSpec spec({4, 5, 4});
    CHECK_THROWS_AS(MlpParams(spec, Eigen::VectorXd::Zero(48)), Error);
    CHECK_THROWS_AS(unpack(spec, Eigen::VectorXd::Zero(50)), Error);
    CHECK_THROWS_AS(forward(spec, Eigen::VectorXd::Zero(49), Eigen::VectorXd::Zero(3)), Error);
    try {
        forward(spec, Eigen::VectorXd::Zero(10), Eigen::VectorXd::Zero(4));
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("forward is linear along a segment that crosses no ReLU boundary") {
    std::mt19937_64 rng(8);
    const MlpSpec spec({3, 5, 2});
    const auto theta = random_vector(rng, static_cast<Eigen::Index>(param_count(spec)));
    const auto layers = unpack(spec, theta);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 20; ++trial) {
        const auto x = random_vector(rng, 3);
        // pre-activations along t * x for t in [1, 2] keep their sign when both ends agree
        const Eigen::VectorXd a1 = layers[0].weight * x + layers[0].bias;
        const Eigen::VectorXd a2 = layers[0].weight * (2.0 * x) + layers[0].bias;
        if (((a1.array() > 0) != (a2.array() > 0)).any()) continue;
        const auto y1 = forward(spec, theta, x);
        const auto y15 = forward(spec, theta, 1.5 * x);
        const auto y2 = forward(spec, theta, 2.0 * x);
        CHECK(((y15 - 0.5 * (y1 + y2)).cwiseAbs().maxCoeff()) <= 1e-12);
        ++checked;
    }
    CHECK(checked > 0);
}
