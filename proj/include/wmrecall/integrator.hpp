#pragma once

// Fixed-step classical Runge-Kutta integration with uniform trajectory recording,
// plus linear-interpolated level-crossing detection.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wmrecall/errors.hpp"
#include "wmrecall/model.hpp"

namespace wmrecall {

/// Magnitude above which any state component counts as a blow-up.
inline constexpr double kBlowupBound = 1e6;

struct IntegrationConfig {
    double dt = 0.01;
    double t_end = 1.0;
    int record_stride = 1;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractError("dt must be a finite positive number");
        if (!std::isfinite(t_end) || !(t_end >= dt))
            throw ContractError("t_end must be finite and >= dt");
        if (record_stride < 1) throw ContractError("record_stride must be >= 1");
    }

    /// Number of steps; t_end is rounded to the nearest multiple of dt when within 1e-9 relative.
    std::int64_t step_count() const {
        const double ratio = t_end / dt;
        const double nearest = std::round(ratio);
        if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return static_cast<std::int64_t>(nearest);
        return static_cast<std::int64_t>(std::floor(ratio));
    }
};

struct NoParams {};

/// Uniformly sampled solution; times[k] = k * dt * record_stride.
template <typename State, typename Params = NoParams>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    double dt = 0.0;
    int record_stride = 1;
    std::optional<Params> params;

    std::size_t size() const { return states.size(); }
    double sample_spacing() const { return dt * record_stride; }
};

using NetworkTrajectory = Trajectory<VectorX<double>, NetworkParams>;
using ReducedTrajectory = Trajectory<Pair<double>, ReducedParams>;

namespace detail {

template <typename State>
bool out_of_bounds(const State& x) {
    return !x.allFinite() || x.cwiseAbs().maxCoeff() > kBlowupBound;
}

}  // namespace detail

/// One classical RK4 step. `t` only labels the blow-up error.
template <typename Rhs, typename State>
State rk4_step(const Rhs& rhs, const State& x, double dt, double t = 0.0) {
    const State k1 = rhs(x);
    if (!k1.allFinite()) throw IntegrationBlowup(t, "non-finite RK4 stage 1");
    const State k2 = rhs(State(x + (0.5 * dt) * k1));
    if (!k2.allFinite()) throw IntegrationBlowup(t, "non-finite RK4 stage 2");
    const State k3 = rhs(State(x + (0.5 * dt) * k2));
    if (!k3.allFinite()) throw IntegrationBlowup(t, "non-finite RK4 stage 3");
    const State k4 = rhs(State(x + dt * k3));
    if (!k4.allFinite()) throw IntegrationBlowup(t, "non-finite RK4 stage 4");
    State next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) throw IntegrationBlowup(t + dt, "non-finite state");
    return next;
}

template <typename Params = NoParams, typename Rhs, typename State>
Trajectory<State, Params> integrate(const Rhs& rhs, const State& initial, const IntegrationConfig& config) {
    config.validate();
    if (detail::out_of_bounds(initial)) throw IntegrationBlowup(0.0, "initial state out of bounds");

    const std::int64_t steps = config.step_count();
    const std::int64_t stride = config.record_stride;

    Trajectory<State, Params> traj;
    traj.dt = config.dt;
    traj.record_stride = config.record_stride;
    traj.times.reserve(static_cast<std::size_t>(steps / stride + 1));
    traj.states.reserve(static_cast<std::size_t>(steps / stride + 1));
    traj.times.push_back(0.0);
    traj.states.push_back(initial);

    State x = initial;
    for (std::int64_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k - 1) * config.dt;
        x = rk4_step(rhs, x, config.dt, t);
        if (detail::out_of_bounds(x))
            throw IntegrationBlowup(t + config.dt, "state magnitude exceeded " + std::to_string(kBlowupBound));
        if (k % stride == 0) {
            traj.times.push_back(static_cast<double>(k) * config.dt);
            traj.states.push_back(x);
        }
    }
    return traj;
}

inline NetworkTrajectory simulate_network(const NetworkParams& params, const NetworkState<double>& initial,
                                          const IntegrationConfig& config) {
    initial.validate(params);
    auto traj = integrate<NetworkParams>(FlatNetworkRhs(params), initial.flatten(), config);
    traj.params = params;
    return traj;
}

inline ReducedTrajectory simulate_reduced(const ReducedParams& params, const ReducedState<double>& initial,
                                          const IntegrationConfig& config) {
    auto traj = integrate<ReducedParams>(ReducedVectorField{params}, initial.vector(), config);
    traj.params = params;
    return traj;
}

enum class CrossingDirection { Up, Down, Both };

/// Interpolated times at which selector(state) crosses `level`.
/// An up-crossing is x_k < level <= x_{k+1}; a down-crossing is x_k > level >= x_{k+1}.
template <typename State, typename Params, typename Selector>
std::vector<double> detect_crossings(const Trajectory<State, Params>& traj, Selector&& selector, double level,
                                     CrossingDirection direction) {
    std::vector<double> out;
    if (traj.size() < 2) throw ContractError("detect_crossings: trajectory needs at least 2 samples");
    const bool want_up = direction != CrossingDirection::Down;
    const bool want_down = direction != CrossingDirection::Up;

    double prev = selector(traj.states[0]) - level;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double cur = selector(traj.states[k]) - level;
        const bool up = prev < 0.0 && cur >= 0.0;
        const bool down = prev > 0.0 && cur <= 0.0;
        if ((up && want_up) || (down && want_down)) {
            const double frac = prev / (prev - cur);
            out.push_back(traj.times[k - 1] + frac * (traj.times[k] - traj.times[k - 1]));
        }
        prev = cur;
    }
    return out;
}

}  // namespace wmrecall
