#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "apbm/systems.hpp"

using namespace apbm;
using namespace apbm::systems;

namespace {

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Lorenz derivative with the verbatim parameters") {
    const auto cfg = LorenzConfig::paper();
    const auto d = lorenz_deriv(Eigen::Vector3d::Ones(), cfg);
    CHECK(d(0) == 0.0);
    CHECK(d(1) == doctest::Approx(9.0));
    CHECK(d(2) == doctest::Approx(-5.0 / 3.0));
    CHECK(lorenz_deriv(Eigen::Vector3d::Zero(), cfg).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Lorenz derivative with the classical parameters") {
    const auto cfg = LorenzConfig::classical();
    CHECK(cfg.sigma == 10.0);
    CHECK(cfg.rho == 28.0);
    CHECK(cfg.damping == 1.0);
    const auto d = lorenz_deriv(Eigen::Vector3d::Ones(), cfg);
    CHECK(d(0) == 0.0);
    CHECK(d(1) == doctest::Approx(26.0));
    CHECK(d(2) == doctest::Approx(-5.0 / 3.0));
    CHECK(lorenz_deriv(Eigen::Vector3d::Zero(), cfg).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noise-free Lorenz measurements equal the states") {
    auto cfg = LorenzConfig::classical();
    cfg.steps = 200;
    cfg.meas_noise_cov.setZero();
    const auto truth = lorenz_simulate(cfg, 3);
    REQUIRE(truth.states.size() == 200);
    for (std::size_t k = 0; k < truth.states.size(); ++k) CHECK(truth.states[k] == truth.measurements[k]);
    CHECK(truth.states[0] == lorenz_step(cfg.x0, cfg));
}

TEST_CASE("Lorenz simulation is reproducible per seed") {
    auto cfg = LorenzConfig::classical();
    cfg.steps = 300;
    CHECK(lorenz_simulate(cfg, 42) == lorenz_simulate(cfg, 42));
    CHECK_FALSE(lorenz_simulate(cfg, 42).measurements == lorenz_simulate(cfg, 43).measurements);
}

TEST_CASE("verbatim Lorenz preset diverges under Euler") {
    auto cfg = LorenzConfig::paper();
    cfg.steps = 4000;
    try {
        lorenz_simulate(cfg, 1);
        FAIL("expected NonFiniteState");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteState);
        const std::string what = e.what();
        const auto pos = what.find("step ");
        REQUIRE(pos != std::string::npos);
        CHECK(std::stoi(what.substr(pos + 5)) <= 10);
    }
    // x1 already exceeds 1e2 by the third step; plain overflow follows at step 12
    cfg.divergence_bound = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(lorenz_simulate(cfg, 1), Error);
    Eigen::VectorXd x = cfg.x0;
    for (int k = 0; k < 3; ++k) x = lorenz_step(x, cfg);
    CHECK(std::abs(x(0)) > 1e2);
}

TEST_CASE("turn matrix near zero turn rate") {
    Eigen::Matrix4d expected;
    expected << 1, 1, 0, 0, 0, 2, 0, 0, 0, 0, 1, 2, 0, 0, 0, 2;
    CHECK(max_diff(ct_matrix(0.0, 1.0), expected) == 0.0);
    CHECK(max_diff(ct_matrix(1e-9, 1.0), expected) <= 1e-8);
    Eigen::Matrix4d expected_half;
    expected_half << 1, 0.5, 0, 0, 0, 2, 0, 0, 0, 0, 1, 1, 0, 0, 0, 2;
    CHECK(max_diff(ct_matrix(0.0, 0.5), expected_half) == 0.0);
}

TEST_CASE("turn matrix at omega = pi / Ts") {
    const double Ts = 2.0;
    const auto m = ct_matrix(std::numbers::pi / Ts, Ts);
    CHECK(max_diff(m.row(1), Eigen::RowVector4d::Zero()) <= 1e-15);
    const auto g = turn_matrix(std::numbers::pi / Ts, Ts);
    CHECK(g(1, 1) == doctest::Approx(-1.0));
    CHECK(std::abs(g(1, 3)) <= 1e-15);
    // (1 - cos) / omega = 2 Ts / pi
    CHECK(g(2, 1) == doctest::Approx(2.0 * Ts / std::numbers::pi));
}

TEST_CASE("ct matrix without the turn term is the CV matrix") {
    CHECK(max_diff(ct_matrix(0.3, 1.0) - turn_matrix(0.3, 1.0), cv_matrix(1.0)) <= 1e-15);
    CHECK(cv_matrix(0.0) == Eigen::Matrix4d::Identity());
}

TEST_CASE("small-angle branch agrees with the exact entries near zero") {
    for (double Ts : {0.1, 1.0, 2.5}) {
        for (double w : {1e-5, -1e-5}) {
            // force the branch at w and compare against the trigonometric form
            CHECK(max_diff(ct_matrix(w, Ts, 1e-4), ct_matrix(w, Ts)) <= 1e-6);
        }
        // the entries are O(omega) away from the limit matrix
        CHECK(max_diff(ct_matrix(0.0, Ts), ct_matrix(1e-5, Ts)) <= 1e-5 * std::max(1.0, Ts * Ts));
    }
}

TEST_CASE("RSS and bearing") {
    const TrackingConfig cfg;
    const auto a = rss_bearing_measure({10.0, 0.0}, cfg);
    CHECK(a(0) == doctest::Approx(8.0));
    CHECK(a(1) == 0.0);
    CHECK(rss_bearing_measure({10.0, 10.0}, cfg)(1) == doctest::Approx(std::numbers::pi / 4.0));
    CHECK(rss_bearing_measure({1.0, 0.0}, cfg)(0) == doctest::Approx(30.0));
    CHECK(rss_bearing_measure({-1.0, 0.0}, cfg)(1) == doctest::Approx(std::numbers::pi));
    try {
        rss_bearing_measure({0.0, 0.0}, cfg);
        FAIL("expected SensorCollocated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SensorCollocated);
    }
}

TEST_CASE("RSS strictly decreases with range") {
    const TrackingConfig cfg;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> radius(0.01, 1e5);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    std::vector<double> radii(200);
    for (double& r : radii) r = radius(rng);
    std::sort(radii.begin(), radii.end());
    double previous = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        const double a = angle(rng);
        const double rss = rss_bearing_measure({r * std::cos(a), r * std::sin(a)}, cfg)(0);
        CHECK(rss < previous);
        previous = rss;
    }
}

TEST_CASE("noise-free tracking follows matrix powers") {
    TrackingConfig cfg;
    cfg.u_cov.setZero();
    cfg.v_var = 0.0;
    cfg.omega0 = 0.0;
    cfg.steps = 20;
    cfg.meas_noise_cov.setZero();
    const auto truth = tracking_simulate(cfg, 1);
    const Eigen::Matrix4d step = ct_matrix(0.0, cfg.Ts);
    Eigen::Vector4d x = cfg.x0;
    for (int k = 0; k < cfg.steps; ++k) {
        x = step * x;
        CHECK(max_diff(truth.states[static_cast<std::size_t>(k)], x) <= 1e-9 * x.cwiseAbs().maxCoeff());
        CHECK(truth.omegas[static_cast<std::size_t>(k)] == 0.0);
    }
}

TEST_CASE("default tracking scenario runs 500 finite steps, reproducibly") {
    const TrackingConfig cfg;
    const auto a = tracking_simulate(cfg, 11);
    REQUIRE(a.states.size() == 500);
    REQUIRE(a.measurements.size() == 500);
    REQUIRE(a.omegas.size() == 500);
    for (const auto& x : a.states) CHECK(x.allFinite());
    CHECK(a == tracking_simulate(cfg, 11));
    CHECK_FALSE(a.measurements == tracking_simulate(cfg, 12).measurements);
}

TEST_CASE("CV model") {
    const TrackingConfig cfg;
    const auto m = cv_model(cfg, 0.1 * Eigen::MatrixXd::Identity(4, 4), cfg.meas_noise_cov);
    CHECK(m.transition(Eigen::Vector4d(0, 1, 0, 2)) == Eigen::VectorXd(Eigen::Vector4d(1, 1, 2, 2)));
    CHECK(m.residual_wrap == std::vector<bool>{false, true});
    CHECK(m.measurement(Eigen::Vector4d(10, 0, 0, 0))(0) == doctest::Approx(8.0));
}

TEST_CASE("a CV filter over a simulated run has finite error") {
    const TrackingConfig cfg;
    const auto truth = tracking_simulate(cfg, 2);
    const auto m = cv_model(cfg, 0.1 * Eigen::MatrixXd::Identity(4, 4), cfg.meas_noise_cov);
    filter::GaussianBelief b{cfg.x0, Eigen::Vector4d(0.1, 0.1, 0.01, 0.01).asDiagonal()};
    double sq = 0.0;
    for (std::size_t k = 0; k < truth.measurements.size(); ++k) {
        b = filter::update(filter::predict(b, m), m, truth.measurements[k]);
        const double ex = b.mean(0) - truth.states[k](0);
        const double ey = b.mean(2) - truth.states[k](2);
        sq += ex * ex + ey * ey;
    }
    CHECK(std::isfinite(std::sqrt(sq / 1000.0)));
}
