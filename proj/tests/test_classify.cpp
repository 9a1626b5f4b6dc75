#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "wmrecall/classify.hpp"

using namespace wmrecall;

TEST_CASE("detect_limit_cycle examples") {
    CHECK_FALSE(detect_limit_cycle(2.0, 10.0, 2.0, {0.5, 0.0}).has_value());
    const auto lc = detect_limit_cycle(5.0, 10.0, 2.0, {0.1, 0.0});
    REQUIRE(lc.has_value());
    CHECK(lc->amplitude_d > 1.0);
    CHECK(lc->period > 0.0);
    CHECK(lc->period_spread < 0.02);
    // Past kappa^oo the stable equilibria attract trajectories starting near them.
    const auto eqs = find_equilibria(14.0, 10.0, 2.0);
    CHECK_FALSE(detect_limit_cycle(14.0, 10.0, 2.0, {eqs[1].d_star + 0.1, eqs[1].e_star}).has_value());
}

TEST_CASE("slowly decaying spirals near kappa* are not cycles") {
    CHECK_FALSE(detect_limit_cycle(2.99, 10.0, 2.0, {1.0, 0.0}).has_value());
    CHECK(detect_limit_cycle(3.05, 10.0, 2.0, {1.0, 0.0}).has_value());
}

TEST_CASE("run_trial outcomes") {
    const ReducedParams p{14.0, 10.0, 2.0};
    const auto eqs = find_equilibria(p.kappa, p.g_a, p.tau);
    const auto plus = run_trial(p, eqs, {eqs[1].d_star + 0.05, eqs[1].e_star});
    CHECK(plus.outcome == TrialOutcome::PositiveEquilibrium);
    const auto minus = run_trial(p, eqs, {eqs[2].d_star - 0.05, eqs[2].e_star});
    CHECK(minus.outcome == TrialOutcome::NegativeEquilibrium);

    const ReducedParams q{2.0, 10.0, 2.0};
    CHECK(run_trial(q, find_equilibria(2.0, 10.0, 2.0), {1.0, 1.0}).outcome == TrialOutcome::Origin);
    const ReducedParams r{5.0, 10.0, 2.0};
    const auto cyc = run_trial(r, find_equilibria(5.0, 10.0, 2.0), {1.0, 1.0});
    CHECK(cyc.outcome == TrialOutcome::LimitCycle);
    CHECK(cyc.cycle.has_value());
}

TEST_CASE("initial conditions are deterministic and inside the box") {
    const auto a = sample_initial_conditions(10.0, 32, 5);
    const auto b = sample_initial_conditions(10.0, 32, 5);
    const auto c = sample_initial_conditions(10.0, 32, 6);
    REQUIRE(a.size() == 32);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    for (const auto& x : a) {
        CHECK(std::abs(x.d) <= 8.0);
        CHECK(std::abs(x.e) <= 10.0);
    }
}

TEST_CASE("classify_regime examples") {
    CHECK(classify_regime(2.0, 10.0, 2.0, 16, 1).regime == Regime::UniqueStableFixedPoint);
    const auto lc = classify_regime(5.0, 10.0, 2.0, 16, 1);
    CHECK(lc.regime == Regime::StableLimitCycle);
    CHECK(lc.limit_cycle.has_value());
    CHECK(lc.evidence.size() == 16);
    CHECK(classify_regime(13.2, 10.0, 2.0, 16, 1).regime == Regime::Coexistence);
    CHECK(classify_regime(14.0, 10.0, 2.0, 16, 1).regime == Regime::BistableFixedPoints);
    // The origin is marginal exactly at kappa*.
    CHECK(classify_regime(3.0, 10.0, 2.0, 16, 1).regime == Regime::UniqueStableFixedPoint);
    CHECK_THROWS_AS(classify_regime(5.0, 10.0, 2.0, 4, 1), ContractError);
}

TEST_CASE("coexistence: trials land in the cycle and in both equilibria") {
    const auto r = classify_regime(13.2, 10.0, 2.0, 128, 3);
    int cycle = 0, plus = 0, minus = 0;
    for (const auto& t : r.evidence) {
        cycle += t.outcome == TrialOutcome::LimitCycle;
        plus += t.outcome == TrialOutcome::PositiveEquilibrium;
        minus += t.outcome == TrialOutcome::NegativeEquilibrium;
    }
    CHECK(cycle > 0);
    CHECK(plus > 0);
    CHECK(minus > 0);
}

TEST_CASE("classification is deterministic for a fixed seed") {
    const auto a = classify_regime(13.2, 10.0, 2.0, 16, 9);
    const auto b = classify_regime(13.2, 10.0, 2.0, 16, 9);
    REQUIRE(a.evidence.size() == b.evidence.size());
    for (std::size_t i = 0; i < a.evidence.size(); ++i) {
        CHECK(a.evidence[i].outcome == b.evidence[i].outcome);
        CHECK(a.evidence[i].final_state == b.evidence[i].final_state);
    }
}

TEST_CASE("small sweep is ordered and thread-count independent") {
    SweepConfig cfg;
    cfg.kappa_min = 2.0;
    cfg.kappa_max = 14.0;
    cfg.step = 1.0;
    cfg.threads = 1;
    const auto one = sweep_kappa(cfg);
    cfg.threads = 4;
    const auto four = sweep_kappa(cfg);
    REQUIRE(one.grid.size() == 13);
    REQUIRE(one.grid.size() == four.grid.size());
    for (std::size_t i = 0; i < one.grid.size(); ++i) {
        CHECK(one.grid[i].kappa == four.grid[i].kappa);
        CHECK(one.grid[i].regime == four.grid[i].regime);
        if (i > 0) CHECK(static_cast<int>(one.grid[i].regime) >= static_cast<int>(one.grid[i - 1].regime));
    }
    REQUIRE(one.transitions.size() == 2);
    CHECK(one.transitions[0].from == Regime::UniqueStableFixedPoint);
    CHECK(one.transitions[0].to == Regime::StableLimitCycle);
    CHECK(one.transitions[1].to == Regime::BistableFixedPoints);

    const auto refined = refine_transition(one.transitions[0], cfg, 1e-2);
    CHECK(refined.kappa_high - refined.kappa_low <= 1e-2);
    CHECK(refined.kappa_low >= 2.95);
    CHECK(refined.kappa_high <= 3.05);
}

TEST_CASE("recall demo with the 12-hypercolumn parameters") {
    const NetworkParams p(12, 1.8, 97.0, 54.0);
    const auto demo = recall_demo(p, {0.005, 1500.0, 20}, 1);
    CHECK(demo.warnings.empty());
    CHECK(demo.corollary.all_satisfied());
    CHECK(demo.sync_error.back() < 1e-3);
    const auto alt = check_alternation(demo, 750.0);
    CHECK(alt.periods >= 5);
    CHECK(alt.all_alternate());
}

TEST_CASE("recall demo with two hypercolumns") {
    const NetworkParams p(2, 11.0, 50.0, 5.0);
    const auto demo = recall_demo(p, {0.005, 600.0, 10}, 2);
    CHECK(demo.corollary.all_satisfied());
    CHECK(demo.sync_error.back() < 1e-3);
    const auto alt = check_alternation(demo, 300.0);
    CHECK(alt.periods >= 3);
    CHECK(alt.all_alternate());
}

TEST_CASE("recall demo is reproducible and warns outside the bounds") {
    const NetworkParams p(3, 1.0, 10.0, 2.0);
    const auto a = recall_demo(p, {0.01, 5.0, 5}, 4);
    const auto b = recall_demo(p, {0.01, 5.0, 5}, 4);
    CHECK(a.trajectory.states == b.trajectory.states);
    CHECK_FALSE(a.warnings.empty());
    CHECK(random_network_state(3, 4) == random_network_state(3, 4));
    CHECK(random_network_state(3, 4).s.cwiseAbs().maxCoeff() <= 1.0);
}
