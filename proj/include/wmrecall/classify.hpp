#pragma once

// Simulation-based attractor classification of the reduced system, kappa sweeps with
// bisection refinement of regime changes, and the full-network recall demonstration.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmrecall/analysis.hpp"
#include "wmrecall/integrator.hpp"
#include "wmrecall/model.hpp"

namespace wmrecall {

struct CycleDetectionConfig {
    double horizon = 500.0;
    double dt = 0.01;
    /// Leading fraction of the run discarded as transient.
    double transient_fraction = 0.5;
    /// Peak-to-peak d below this is not an oscillation.
    double amplitude_floor = 1e-2;
    /// (max - min) / mean over the retained up-crossing periods.
    double max_period_spread = 0.02;
    /// Distance from an equilibrium at which a non-oscillating run counts as converged.
    double convergence_tolerance = 1e-2;
};

struct LimitCycle {
    double amplitude_d;  // peak-to-peak of d
    double period;
    double period_spread;
};

enum class TrialOutcome { LimitCycle, Origin, PositiveEquilibrium, NegativeEquilibrium, Unresolved };

const char* to_string(TrialOutcome o);

struct TrialSummary {
    ReducedState<double> initial;
    TrialOutcome outcome = TrialOutcome::Unresolved;
    std::optional<LimitCycle> cycle;
    ReducedState<double> final_state;
};

/// Runs one reduced trajectory and decides whether it settled on a sustained cycle: in the
/// retained window the peak-to-peak of d must exceed amplitude_floor, the up-crossing periods
/// must agree within max_period_spread, and the per-cycle amplitude trend must not point to a
/// limit below amplitude_floor (growth rate fitted as mu + c * amplitude^2, i.e. the Hopf normal
/// form, so slowly decaying spirals are rejected). At least three full periods are required.
std::optional<LimitCycle> detect_limit_cycle(const ReducedParams& params, const ReducedState<double>& initial,
                                             const CycleDetectionConfig& config = {});

std::optional<LimitCycle> detect_limit_cycle(double kappa, double g_a, double tau,
                                             const ReducedState<double>& initial, double horizon = 500.0);

/// detect_limit_cycle plus the attractor the trial ended on.
TrialSummary run_trial(const ReducedParams& params, const std::vector<Equilibrium>& equilibria,
                       const ReducedState<double>& initial, const CycleDetectionConfig& config = {});

enum class Regime { UniqueStableFixedPoint, StableLimitCycle, Coexistence, BistableFixedPoints };

const char* to_string(Regime r);

struct RegimeReport {
    double kappa;
    double g_a;
    double tau;
    Regime regime;
    std::vector<Equilibrium> equilibria;
    std::optional<LimitCycle> limit_cycle;
    std::vector<TrialSummary> evidence;
};

/// Evidence that fits none of the four regimes; what() carries the full evidence dump.
class ClassificationError : public std::runtime_error {
public:
    ClassificationError(const std::string& what, RegimeReport partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const RegimeReport& partial() const { return partial_; }

private:
    RegimeReport partial_;
};

/// Deterministic initial conditions in d in [-8, 8], e in [-g_a, g_a]: a Halton (2, 3) sequence
/// shifted by a seed-derived random offset.
std::vector<ReducedState<double>> sample_initial_conditions(double g_a, int count, std::uint64_t seed);

RegimeReport classify_regime(double kappa, double g_a, double tau, int trial_count, std::uint64_t seed,
                             const CycleDetectionConfig& config = {});

struct Transition {
    double kappa_low;
    double kappa_high;
    Regime from;
    Regime to;
};

struct SweepResult {
    double g_a;
    double tau;
    std::vector<RegimeReport> grid;
    std::vector<Transition> transitions;
};

struct SweepConfig {
    double kappa_min = 2.0;
    double kappa_max = 15.0;
    double step = 0.25;
    double g_a = 10.0;
    double tau = 2.0;
    int trial_count = 16;
    std::uint64_t seed = 1;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
    CycleDetectionConfig detection{};
};

SweepResult sweep_kappa(const SweepConfig& config);

/// Bisects the classifier inside `bracket` until it is narrower than `width`. The midpoint goes
/// to the low side when it still shows `bracket.from`, otherwise to the high side, so the result
/// brackets the end of the `from` regime.
Transition refine_transition(const Transition& bracket, const SweepConfig& config, double width = 1e-3);

struct RecallDemo {
    NetworkTrajectory trajectory;
    std::vector<double> sync_error;
    /// Minicolumn outputs of every hypercolumn, one N x 2 block per sample.
    std::vector<Block<double>> outputs;
    CorollaryReport corollary;
    std::vector<std::string> warnings;
};

/// Seeded uniform initial state, every component in [-1, 1].
NetworkState<double> random_network_state(int n_hypercolumns, std::uint64_t seed);

RecallDemo recall_demo(const NetworkParams& params, const IntegrationConfig& config, std::uint64_t seed);

struct AlternationSummary {
    std::vector<double> period_starts;  // up-crossings of s_h1 - s_h2 through 0
    int periods = 0;
    int alternating_periods = 0;        // periods where both outputs exceed high and drop below low
    double mean_period = 0.0;

    bool all_alternate() const { return periods > 0 && alternating_periods == periods; }
};

/// Checks, for one hypercolumn and every full period after t_from, that each output goes above
/// `high` and below `low`.
AlternationSummary check_alternation(const RecallDemo& demo, double t_from, int hypercolumn = 0,
                                     double high = 0.9, double low = 0.1);

}  // namespace wmrecall
