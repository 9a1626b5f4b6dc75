#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "support/oracles.hpp"
#include "wmrecall/model.hpp"

using namespace wmrecall;
using oracle::Sampler;

TEST_CASE("softmax examples") {
    const auto half = softmax(0.0, 0.0);
    CHECK(half(0) == 0.5);
    CHECK(half(1) == 0.5);

    for (double s : {-700.0, -3.0, 12.5, 800.0}) {
        const auto o = softmax(s, s);
        CHECK(o(0) == 0.5);
        CHECK(o(1) == 0.5);
    }

    const auto o = softmax(std::log(3.0), 0.0);
    CHECK(std::abs(o(0) - 0.75) < 1e-15);
    CHECK(std::abs(o(1) - 0.25) < 1e-15);
}

TEST_CASE("softmax does not overflow and rejects non-finite input") {
    const auto o = softmax(1000.0, 999.0);
    CHECK(std::isfinite(o(0)));
    CHECK(std::abs(o.sum() - 1.0) < 1e-15);
    CHECK_THROWS_AS(softmax(std::numeric_limits<double>::quiet_NaN(), 0.0), DomainError);
    CHECK_THROWS_AS(softmax(std::numeric_limits<double>::infinity(), 0.0), DomainError);
}

TEST_CASE("softmax properties over random rows") {
    Sampler rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Pair<double> a{rng.uniform(-30, 30), rng.uniform(-30, 30)};
        const Pair<double> b{rng.uniform(-30, 30), rng.uniform(-30, 30)};
        const double c = rng.uniform(-50, 50);
        const auto oa = softmax(a);
        const auto ob = softmax(b);

        CHECK(std::abs(oa.sum() - 1.0) < 1e-12);
        CHECK(oa.minCoeff() >= 0.0);
        CHECK(oa.maxCoeff() <= 1.0);
        CHECK((softmax(Pair<double>(a.array() + c)) - oa).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((a - b).dot(oa - ob) >= -1e-12);
    }
}

TEST_CASE("output_difference") {
    CHECK(output_difference(0.0) == 0.0);
    CHECK(std::abs(output_difference(2.0 * std::atanh(0.9)) - 0.9) < 1e-14);
    CHECK_THROWS_AS(output_difference(std::numeric_limits<double>::infinity()), DomainError);

    Sampler rng(3);
    for (int i = 0; i < 500; ++i) {
        const double d = rng.uniform(-40, 40);
        CHECK(output_difference(d) == -output_difference(-d));
        const auto o = softmax(d, 0.0);
        CHECK(std::abs(output_difference(d) - (o(0) - o(1))) < 1e-12);
    }
}

TEST_CASE("output_difference_slope matches a central difference") {
    for (double d : {-6.0, -1.0, 0.0, 0.3, 4.0}) {
        const double h = 1e-5;
        const double fd = (std::tanh(0.5 * (d + h)) - std::tanh(0.5 * (d - h))) / (2 * h);
        CHECK(std::abs(output_difference_slope(d) - fd) < 1e-9);
    }
}

TEST_CASE("NetworkParams validation and derived values") {
    const NetworkParams p(12, 1.8, 97.0, 54.0);
    CHECK(p.kappa() == doctest::Approx(19.8).epsilon(1e-15));
    CHECK(p.alpha() == 1.0 / 54.0);
    CHECK(p.g_bar() == doctest::Approx(97.0 / 54.0));
    CHECK(p.beta() == doctest::Approx(97.0 / 54.0 + (1.0 / 54.0 - 1.0) * 1.8));

    CHECK_THROWS_AS(NetworkParams(1, 1.0, 1.0, 2.0), ContractError);
    CHECK_THROWS_AS(NetworkParams(3, 0.0, 1.0, 2.0), ContractError);
    CHECK_THROWS_AS(NetworkParams(3, 1.0, -1.0, 2.0), ContractError);
    CHECK_THROWS_AS(NetworkParams(3, 1.0, 1.0, 1.0), ContractError);
    CHECK_THROWS_AS(ReducedParams(1.0, 1.0, 0.5), DomainError);
}

TEST_CASE("network_rhs at the symmetric zero state") {
    const NetworkParams p(2, 1.0, 10.0, 2.0);
    const auto ds = network_rhs(NetworkState<double>::zero(2), p);
    CHECK(ds.s.cwiseAbs().maxCoeff() == 0.0);
    CHECK((ds.a.array() == 10.0 * 0.5 / 2.0).all());
}

TEST_CASE("network_rhs rejects mismatched dimensions") {
    const NetworkParams p(3, 1.0, 10.0, 2.0);
    CHECK_THROWS_AS(network_rhs(NetworkState<double>::zero(2), p), ContractError);
    CHECK_THROWS_AS(FlatNetworkRhs{p}(VectorX<double>::Zero(8)), ContractError);
}

TEST_CASE("network_rhs equals the signed-weight sum on random N=3 states") {
    Sampler rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const NetworkParams p(3, rng.uniform(0.1, 4.0), rng.uniform(0.5, 100.0), rng.uniform(1.1, 60.0));
        const NetworkState<double> st{rng.block(3, -5, 5), rng.block(3, -20, 20)};
        Eigen::MatrixX2d ds, da;
        oracle::signed_weight_rhs(st.s, st.a, p.omega(), p.g_a(), p.tau(), ds, da);

        const auto rhs = network_rhs(st, p);
        CHECK((rhs.s - ds).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((rhs.a - da).cwiseAbs().maxCoeff() < 1e-12);

        const auto flat = NetworkState<double>::unflatten(FlatNetworkRhs(p)(st.flatten()));
        CHECK((flat.s - ds).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((flat.a - da).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("sync manifold is invariant and reduces to the (d, e) system") {
    Sampler rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 11;
        const NetworkParams p(n, rng.uniform(0.1, 3.0), rng.uniform(0.5, 100.0), rng.uniform(1.1, 60.0));
        const Eigen::RowVector2d s_row(rng.uniform(-10, 10), rng.uniform(-10, 10));
        const Eigen::RowVector2d a_row(rng.uniform(-50, 50), rng.uniform(-50, 50));
        const NetworkState<double> st{s_row.replicate(n, 1), a_row.replicate(n, 1)};
        REQUIRE(on_sync_manifold(st));

        const auto rhs = network_rhs(st, p);
        for (int i = 1; i < n; ++i) {
            CHECK((rhs.s.row(i) - rhs.s.row(0)).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((rhs.a.row(i) - rhs.a.row(0)).cwiseAbs().maxCoeff() < 1e-12);
        }

        const auto projected_rhs = project_reduced(rhs);
        const auto reduced = project_reduced(st);
        for (int i = 0; i < n; ++i) {
            const auto r = reduced_rhs(reduced[static_cast<std::size_t>(i)], ReducedParams::from(p));
            CHECK(std::abs(projected_rhs[static_cast<std::size_t>(i)].d - r.d) < 1e-10);
            CHECK(std::abs(projected_rhs[static_cast<std::size_t>(i)].e - r.e) < 1e-10);
        }
    }
}

TEST_CASE("reduced_rhs examples and odd symmetry") {
    const auto zero = reduced_rhs(ReducedState<double>{0.0, 0.0}, 5.0, 10.0, 2.0);
    CHECK(zero.d == 0.0);
    CHECK(zero.e == 0.0);

    Sampler rng(5);
    for (int i = 0; i < 1000; ++i) {
        const ReducedParams p{rng.uniform(-5, 20), rng.uniform(0.1, 100), rng.uniform(1.01, 60)};
        const ReducedState<double> x{rng.uniform(-20, 20), rng.uniform(-100, 100)};
        const auto plus = reduced_rhs(x, p);
        const auto minus = reduced_rhs(ReducedState<double>{-x.d, -x.e}, p);
        CHECK(plus.d == -minus.d);
        CHECK(plus.e == -minus.e);

        const auto v = ReducedVectorField{p}(x.vector());
        CHECK(v(0) == plus.d);
        CHECK(v(1) == plus.e);
    }
}

TEST_CASE("project_reduced") {
    for (const auto& r : project_reduced(NetworkState<double>::zero(4))) {
        CHECK(r.d == 0.0);
        CHECK(r.e == 0.0);
    }
    NetworkState<double> st = NetworkState<double>::zero(2);
    st.s.row(0) << 3.0, 1.0;
    st.a.row(0) << 2.0, 2.0;
    const auto r = project_reduced(st);
    CHECK(r[0].d == 2.0);
    CHECK(r[0].e == 0.0);
}

TEST_CASE("flat layout is per hypercolumn s then a") {
    NetworkState<double> st = NetworkState<double>::zero(2);
    st.s << 1, 2, 5, 6;
    st.a << 3, 4, 7, 8;
    const auto x = st.flatten();
    for (int i = 0; i < 8; ++i) CHECK(x(i) == i + 1);
    CHECK(NetworkState<double>::unflatten(x) == st);
    CHECK_THROWS_AS(NetworkState<double>::unflatten(VectorX<double>::Zero(6)), ContractError);
}

TEST_CASE("model core is generic over the scalar type") {
    const auto o = softmax(std::log(3.0L), 0.0L);
    CHECK(std::abs(static_cast<double>(o(0)) - 0.75) < 1e-15);
    const NetworkParams p(2, 1.0, 10.0, 2.0);
    const auto ds = network_rhs(NetworkState<long double>::zero(2), p);
    CHECK(ds.s.cwiseAbs().maxCoeff() == 0.0L);
}
