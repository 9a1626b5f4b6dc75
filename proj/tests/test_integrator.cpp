#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "support/oracles.hpp"
#include "wmrecall/integrator.hpp"

using namespace wmrecall;
using Vec1 = Eigen::Matrix<double, 1, 1>;

namespace {

auto decay = [](const Vec1& x) -> Vec1 { return -x; };

double endpoint_error(double dt) {
    const auto traj = integrate(decay, Vec1(1.0), IntegrationConfig{dt, 1.0, 1});
    return std::abs(traj.states.back()(0) - std::exp(-1.0));
}

}  // namespace

TEST_CASE("rk4_step examples") {
    const Eigen::Vector2d x{1.5, -2.0};
    const auto same = rk4_step([](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero().eval(); }, x, 0.1);
    CHECK(same == x);

    const double one = rk4_step(decay, Vec1(1.0), 0.1)(0);
    CHECK(std::abs(one - 0.9048375) < 1e-6);
    CHECK(std::abs(one - std::exp(-0.1)) < 1e-6);
}

TEST_CASE("rk4 local error is fifth order") {
    const double e1 = std::abs(rk4_step(decay, Vec1(1.0), 0.1)(0) - std::exp(-0.1));
    const double e2 = std::abs(rk4_step(decay, Vec1(1.0), 0.05)(0) - std::exp(-0.05));
    const double ratio = e1 / e2;
    CHECK(ratio > 32.0 * 0.8);
    CHECK(ratio < 32.0 * 1.2);
}

TEST_CASE("rk4 global error is fourth order") {
    const double ratio = endpoint_error(0.1) / endpoint_error(0.05);
    CHECK(ratio > 16.0 * 0.8);
    CHECK(ratio < 16.0 * 1.2);
}

TEST_CASE("integrate bookkeeping") {
    const auto two = integrate(decay, Vec1(1.0), IntegrationConfig{0.1, 0.1, 1});
    CHECK(two.size() == 2);
    CHECK(two.times.front() == 0.0);
    CHECK(two.times.back() == doctest::Approx(0.1));

    const auto strided = integrate(decay, Vec1(1.0), IntegrationConfig{0.01, 1.0, 10});
    CHECK(strided.size() == 11);
    for (std::size_t k = 1; k < strided.size(); ++k)
        CHECK(strided.times[k] - strided.times[k - 1] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(strided.sample_spacing() == doctest::Approx(0.1));
}

TEST_CASE("integration config validation") {
    CHECK_THROWS_AS(IntegrationConfig({0.0, 1.0, 1}).validate(), ContractError);
    CHECK_THROWS_AS(IntegrationConfig({0.1, 0.05, 1}).validate(), ContractError);
    CHECK_THROWS_AS(IntegrationConfig({0.1, 1.0, 0}).validate(), ContractError);
    CHECK_THROWS_AS(integrate(decay, Vec1(1.0), IntegrationConfig{0.1, 0.0, 1}), ContractError);
}

TEST_CASE("blow-up is reported with its time") {
    auto quadratic = [](const Vec1& x) -> Vec1 { return x.cwiseProduct(x); };
    try {
        integrate(quadratic, Vec1(1.0), IntegrationConfig{0.001, 2.0, 1});
        FAIL("expected IntegrationBlowup");
    } catch (const IntegrationBlowup& e) {
        // x = 1 / (1 - t) leaves [-1e6, 1e6] just before t = 1.
        CHECK(e.time() > 0.99);
        CHECK(e.time() < 1.01);
    }
    auto nan_field = [](const Vec1&) -> Vec1 { return Vec1(std::nan("")); };
    CHECK_THROWS_AS(rk4_step(nan_field, Vec1(0.0), 0.1, 3.0), IntegrationBlowup);
}

TEST_CASE("reduced system below kappa* settles at the origin") {
    oracle::Sampler rng(42);
    for (int i = 0; i < 10; ++i) {
        const ReducedState<double> x0{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto traj = simulate_reduced({2.0, 10.0, 2.0}, x0, {0.01, 200.0, 100});
        CHECK(traj.states.back().norm() < 1e-3);
        REQUIRE(traj.params.has_value());
        CHECK(traj.params->kappa == 2.0);
    }
}

TEST_CASE("reduced system above kappa* keeps oscillating") {
    oracle::Sampler rng(43);
    for (int i = 0; i < 5; ++i) {
        const ReducedState<double> x0{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto traj = simulate_reduced({5.0, 10.0, 2.0}, x0, {0.01, 200.0, 1});
        double lo = 1e300, hi = -1e300;
        for (std::size_t k = traj.size() * 3 / 4; k < traj.size(); ++k) {
            lo = std::min(lo, traj.states[k](0));
            hi = std::max(hi, traj.states[k](0));
        }
        CHECK(hi - lo > 0.5);
    }
}

TEST_CASE("equilibrium preservation at the origin") {
    for (double kappa : {2.0, 5.0, 11.9}) {
        const auto traj = simulate_reduced({kappa, 10.0, 2.0}, {0.0, 0.0}, {0.01, 100.0, 50});
        for (const auto& x : traj.states) CHECK(x.cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("integration is deterministic") {
    const NetworkParams p(4, 1.8, 97.0, 54.0);
    NetworkState<double> x0 = NetworkState<double>::zero(4);
    x0.s << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7, -0.8;
    const auto a = simulate_network(p, x0, {0.005, 20.0, 7});
    const auto b = simulate_network(p, x0, {0.005, 20.0, 7});
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.times[k] == b.times[k]);
        CHECK(a.states[k] == b.states[k]);
    }
}

TEST_CASE("detect_crossings") {
    Trajectory<Vec1> constant;
    constant.dt = 0.1;
    for (int k = 0; k < 50; ++k) {
        constant.times.push_back(0.1 * k);
        constant.states.push_back(Vec1(2.0));
    }
    auto first = [](const Vec1& x) { return x(0); };
    CHECK(detect_crossings(constant, first, 0.0, CrossingDirection::Both).empty());

    const double dt = 0.01;
    Trajectory<Vec1> sine;
    sine.dt = dt;
    for (int k = 0; k <= 4000; ++k) {
        // Start just after t = 0 so the crossing at 0 itself is not counted.
        const double t = 1e-3 + k * dt;
        sine.times.push_back(t);
        sine.states.push_back(Vec1(std::sin(t)));
    }
    const auto ups = detect_crossings(sine, first, 0.0, CrossingDirection::Up);
    REQUIRE(ups.size() == 6);
    for (std::size_t k = 0; k < ups.size(); ++k)
        CHECK(std::abs(ups[k] - 2.0 * std::numbers::pi * static_cast<double>(k + 1)) < dt);
    const auto downs = detect_crossings(sine, first, 0.0, CrossingDirection::Down);
    CHECK(downs.size() == 6);
    CHECK(detect_crossings(sine, first, 0.0, CrossingDirection::Both).size() == 12);

    Trajectory<Vec1> single;
    single.times = {0.0};
    single.states = {Vec1(0.0)};
    CHECK_THROWS_AS(detect_crossings(single, first, 0.0, CrossingDirection::Up), ContractError);
}

TEST_CASE("limit cycle crossings are periodic") {
    const auto traj = simulate_reduced({5.0, 10.0, 2.0}, {0.1, 0.0}, {0.01, 400.0, 1});
    auto ups = detect_crossings(traj, [](const Pair<double>& x) { return x(0); }, 0.0, CrossingDirection::Up);
    std::erase_if(ups, [](double t) { return t < 200.0; });
    REQUIRE(ups.size() >= 4);
    std::vector<double> gaps;
    for (std::size_t k = 1; k < ups.size(); ++k) gaps.push_back(ups[k] - ups[k - 1]);
    const double ref = gaps.front();
    for (double g : gaps) CHECK(std::abs(g - ref) / ref < 0.01);
}
