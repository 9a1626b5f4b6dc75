#include "wmrecall/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace wmrecall {

namespace {

double peak_to_peak(const std::vector<Pair<double>>& states, std::size_t begin, std::size_t end) {
    double lo = states[begin](0), hi = lo;
    for (std::size_t k = begin; k < end; ++k) {
        lo = std::min(lo, states[k](0));
        hi = std::max(hi, states[k](0));
    }
    return hi - lo;
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

std::string dump_evidence(const RegimeReport& r) {
    std::ostringstream os;
    os << "kappa=" << r.kappa << " g_a=" << r.g_a << " tau=" << r.tau << "\n  equilibria:";
    for (const auto& eq : r.equilibria)
        os << "\n    d*=" << eq.d_star << " e*=" << eq.e_star << " eig=(" << eq.eigenvalues[0] << ", "
           << eq.eigenvalues[1] << ") " << to_string(eq.stability);
    os << "\n  trials:";
    for (const auto& t : r.evidence) {
        os << "\n    (" << t.initial.d << ", " << t.initial.e << ") -> " << to_string(t.outcome);
        if (t.cycle) os << " amplitude_d=" << t.cycle->amplitude_d << " period=" << t.cycle->period;
        os << " final=(" << t.final_state.d << ", " << t.final_state.e << ")";
    }
    return os.str();
}

/// Limiting peak-to-peak amplitude implied by per-cycle amplitudes a_k measured at times t_k.
/// The log growth rate per cycle is fitted as mu + c * a^2 (the planar Hopf normal form); a
/// non-positive mu means decay onto a point, mu > 0 with c < 0 a cycle of amplitude sqrt(-mu/c).
double limiting_amplitude(const std::vector<double>& a, const std::vector<double>& t) {
    const double last = a.back();
    const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
    if (*amax - *amin <= 1e-3 * *amax) return last;
    if (a.size() < 3 || !(*amin > 0.0)) return last;

    const auto m = static_cast<Eigen::Index>(a.size() - 1);
    Eigen::MatrixX2d design(m, 2);
    Eigen::VectorXd rate(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto i = static_cast<std::size_t>(k);
        const double mean = 0.5 * (a[i] + a[i + 1]);
        design(k, 0) = 1.0;
        design(k, 1) = mean * mean;
        rate(k) = std::log(a[i + 1] / a[i]) / (t[i + 1] - t[i]);
    }
    const Eigen::Vector2d fit = design.colPivHouseholderQr().solve(rate);
    const double mu = fit(0), c = fit(1);
    if (!(mu > 0.0)) return 0.0;
    if (c < 0.0) return std::sqrt(-mu / c);
    return last;
}

}  // namespace

const char* to_string(TrialOutcome o) {
    switch (o) {
        case TrialOutcome::LimitCycle: return "LimitCycle";
        case TrialOutcome::Origin: return "Origin";
        case TrialOutcome::PositiveEquilibrium: return "PositiveEquilibrium";
        case TrialOutcome::NegativeEquilibrium: return "NegativeEquilibrium";
        case TrialOutcome::Unresolved: return "Unresolved";
    }
    return "Unknown";
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::UniqueStableFixedPoint: return "UniqueStableFixedPoint";
        case Regime::StableLimitCycle: return "StableLimitCycle";
        case Regime::Coexistence: return "Coexistence";
        case Regime::BistableFixedPoints: return "BistableFixedPoints";
    }
    return "Unknown";
}

TrialSummary run_trial(const ReducedParams& params, const std::vector<Equilibrium>& equilibria,
                       const ReducedState<double>& initial, const CycleDetectionConfig& config) {
    if (!(config.transient_fraction >= 0.0 && config.transient_fraction < 1.0))
        throw ContractError("transient_fraction must lie in [0, 1)");
    const ReducedTrajectory traj = simulate_reduced(params, initial, {config.dt, config.horizon, 1});

    TrialSummary summary;
    summary.initial = initial;
    summary.final_state = ReducedState<double>::from(traj.states.back());

    const std::size_t n = traj.size();
    const auto begin = static_cast<std::size_t>(std::ceil(config.transient_fraction * static_cast<double>(n)));
    if (n - begin >= 4) {
        const double amplitude = peak_to_peak(traj.states, begin, n);
        if (amplitude > config.amplitude_floor) {
            double lo = traj.states[begin](0), hi = lo, sum = 0.0;
            for (std::size_t k = begin; k < n; ++k) {
                lo = std::min(lo, traj.states[k](0));
                hi = std::max(hi, traj.states[k](0));
                sum += traj.states[k](0);
            }
            const double level = (lo < 0.0 && hi > 0.0) ? 0.0 : sum / static_cast<double>(n - begin);
            const double t_begin = traj.times[begin];
            std::vector<double> ups = detect_crossings(
                traj, [](const Pair<double>& x) { return x(0); }, level, CrossingDirection::Up);
            std::erase_if(ups, [t_begin](double t) { return t < t_begin; });

            if (ups.size() >= 4) {
                std::vector<double> periods, amplitudes, starts;
                std::size_t k = begin;
                for (std::size_t c = 1; c < ups.size(); ++c) {
                    periods.push_back(ups[c] - ups[c - 1]);
                    starts.push_back(ups[c - 1]);
                    while (k < n && traj.times[k] < ups[c - 1]) ++k;
                    std::size_t end = k;
                    while (end < n && traj.times[end] <= ups[c]) ++end;
                    amplitudes.push_back(end > k ? peak_to_peak(traj.states, k, end) : 0.0);
                }
                const auto [pmin, pmax] = std::minmax_element(periods.begin(), periods.end());
                const double mean = std::accumulate(periods.begin(), periods.end(), 0.0) /
                                    static_cast<double>(periods.size());
                const double spread = (*pmax - *pmin) / mean;
                const double limit = limiting_amplitude(amplitudes, starts);
                if (spread < config.max_period_spread && limit > config.amplitude_floor)
                    summary.cycle = LimitCycle{amplitude, mean, spread};
            }
        }
    }

    if (summary.cycle) {
        summary.outcome = TrialOutcome::LimitCycle;
        return summary;
    }
    const Pair<double> last = traj.states.back();
    double best = config.convergence_tolerance;
    for (const auto& eq : equilibria) {
        const double dist = (last - Pair<double>{eq.d_star, eq.e_star}).norm();
        if (dist <= best) {
            best = dist;
            summary.outcome = eq.d_star == 0.0  ? TrialOutcome::Origin
                              : eq.d_star > 0.0 ? TrialOutcome::PositiveEquilibrium
                                                : TrialOutcome::NegativeEquilibrium;
        }
    }
    return summary;
}

std::optional<LimitCycle> detect_limit_cycle(const ReducedParams& params, const ReducedState<double>& initial,
                                             const CycleDetectionConfig& config) {
    return run_trial(params, {}, initial, config).cycle;
}

std::optional<LimitCycle> detect_limit_cycle(double kappa, double g_a, double tau,
                                             const ReducedState<double>& initial, double horizon) {
    CycleDetectionConfig config;
    config.horizon = horizon;
    return detect_limit_cycle(ReducedParams{kappa, g_a, tau}, initial, config);
}

std::vector<ReducedState<double>> sample_initial_conditions(double g_a, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double shift_d = unit(rng);
    const double shift_e = unit(rng);

    std::vector<ReducedState<double>> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 1; i <= count; ++i) {
        const double ud = std::fmod(radical_inverse(static_cast<std::uint64_t>(i), 2) + shift_d, 1.0);
        const double ue = std::fmod(radical_inverse(static_cast<std::uint64_t>(i), 3) + shift_e, 1.0);
        out.push_back({-8.0 + 16.0 * ud, g_a * (2.0 * ue - 1.0)});
    }
    return out;
}

RegimeReport classify_regime(double kappa, double g_a, double tau, int trial_count, std::uint64_t seed,
                             const CycleDetectionConfig& config) {
    if (trial_count < 8) throw ContractError("classify_regime: trial_count must be >= 8");
    const ReducedParams params{kappa, g_a, tau};

    RegimeReport report{kappa, g_a, tau, Regime::UniqueStableFixedPoint, find_equilibria(kappa, g_a, tau), {}, {}};
    for (const auto& ic : sample_initial_conditions(g_a, trial_count, seed)) {
        report.evidence.push_back(run_trial(params, report.equilibria, ic, config));
        const auto& cycle = report.evidence.back().cycle;
        if (cycle && !report.limit_cycle) report.limit_cycle = cycle;
    }

    const bool origin_stable = report.equilibria.front().stable;
    const bool nonzero_stable = std::any_of(report.equilibria.begin() + 1, report.equilibria.end(),
                                            [](const Equilibrium& eq) { return eq.stable; });
    const bool cycle = report.limit_cycle.has_value();

    if (cycle && origin_stable)
        throw ClassificationError("limit cycle found while the origin is stable\n" + dump_evidence(report), report);
    if (cycle) {
        report.regime = nonzero_stable ? Regime::Coexistence : Regime::StableLimitCycle;
    } else if (nonzero_stable) {
        report.regime = Regime::BistableFixedPoints;
    } else if (report.equilibria.size() == 1 && report.equilibria.front().stability != Stability::Unstable) {
        // A marginal origin (kappa == kappa*) still attracts through the negative cubic term;
        // trajectories decay algebraically rather than settling on a cycle.
        report.regime = Regime::UniqueStableFixedPoint;
    } else {
        throw ClassificationError("no limit cycle and no stable equilibrium\n" + dump_evidence(report), report);
    }
    return report;
}

SweepResult sweep_kappa(const SweepConfig& config) {
    if (!(config.step > 0.0)) throw ContractError("sweep_kappa: step must be > 0");
    if (!(config.kappa_max >= config.kappa_min)) throw ContractError("sweep_kappa: kappa_max < kappa_min");

    const auto count = static_cast<std::size_t>(
        std::floor((config.kappa_max - config.kappa_min) / config.step + 1e-9)) + 1;
    std::vector<double> kappas(count);
    for (std::size_t i = 0; i < count; ++i) kappas[i] = config.kappa_min + static_cast<double>(i) * config.step;

    std::vector<std::optional<RegimeReport>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i] = classify_regime(kappas[i], config.g_a, config.tau, config.trial_count, config.seed,
                                           config.detection);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    SweepResult result{config.g_a, config.tau, {}, {}};
    for (auto& s : slots) result.grid.push_back(std::move(*s));
    for (std::size_t i = 1; i < count; ++i) {
        const auto& a = result.grid[i - 1];
        const auto& b = result.grid[i];
        if (a.regime != b.regime) result.transitions.push_back({a.kappa, b.kappa, a.regime, b.regime});
    }
    return result;
}

Transition refine_transition(const Transition& bracket, const SweepConfig& config, double width) {
    if (!(width > 0.0)) throw ContractError("refine_transition: width must be > 0");
    Transition t = bracket;
    while (t.kappa_high - t.kappa_low > width) {
        const double mid = 0.5 * (t.kappa_low + t.kappa_high);
        const Regime r =
            classify_regime(mid, config.g_a, config.tau, config.trial_count, config.seed, config.detection).regime;
        if (r == t.from) {
            t.kappa_low = mid;
        } else {
            t.kappa_high = mid;
            t.to = r;
        }
    }
    return t;
}

NetworkState<double> random_network_state(int n_hypercolumns, std::uint64_t seed) {
    if (n_hypercolumns < 2) throw ContractError("random_network_state: N must be >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    VectorX<double> x(4 * n_hypercolumns);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform(rng);
    return NetworkState<double>::unflatten(x);
}

RecallDemo recall_demo(const NetworkParams& params, const IntegrationConfig& config, std::uint64_t seed) {
    RecallDemo demo{{}, {}, {}, corollary_check(params.n_hypercolumns(), params.omega(), params.g_a(), params.tau()), {}};
    const auto& c = demo.corollary;
    if (!c.sync_condition)
        demo.warnings.push_back("omega outside (g_a/tau, g_a/(tau-1)); synchronization is not guaranteed");
    if (!c.unique_equilibrium_condition)
        demo.warnings.push_back("omega >= (g_a+2)/(N-1); the reduced system has nonzero equilibria");
    if (!c.limit_cycle_condition)
        demo.warnings.push_back("necessary limit-cycle conditions fail; no oscillatory recall expected");

    demo.trajectory = simulate_network(params, random_network_state(params.n_hypercolumns(), seed), config);
    demo.sync_error = sync_error(demo.trajectory);
    demo.outputs.reserve(demo.trajectory.size());
    for (const auto& x : demo.trajectory.states) demo.outputs.push_back(softmax_rows(NetworkState<double>::unflatten(x).s));
    return demo;
}

AlternationSummary check_alternation(const RecallDemo& demo, double t_from, int hypercolumn, double high,
                                     double low) {
    const auto& traj = demo.trajectory;
    if (traj.size() < 2) throw ContractError("check_alternation: trajectory too short");
    if (hypercolumn < 0 || 4 * hypercolumn >= traj.states.front().size())
        throw ContractError("check_alternation: hypercolumn out of range");

    const Eigen::Index h = hypercolumn;
    AlternationSummary summary;
    summary.period_starts = detect_crossings(
        traj, [h](const VectorX<double>& x) { return x(4 * h) - x(4 * h + 1); }, 0.0, CrossingDirection::Up);
    std::erase_if(summary.period_starts, [t_from](double t) { return t < t_from; });
    if (summary.period_starts.size() < 2) return summary;

    std::size_t k = 0;
    for (std::size_t p = 1; p < summary.period_starts.size(); ++p) {
        const double t0 = summary.period_starts[p - 1];
        const double t1 = summary.period_starts[p];
        double max0 = 0.0, max1 = 0.0, min0 = 1.0, min1 = 1.0;
        while (k < traj.size() && traj.times[k] < t0) ++k;
        for (std::size_t j = k; j < traj.size() && traj.times[j] <= t1; ++j) {
            const double o0 = demo.outputs[j](h, 0), o1 = demo.outputs[j](h, 1);
            max0 = std::max(max0, o0);
            max1 = std::max(max1, o1);
            min0 = std::min(min0, o0);
            min1 = std::min(min1, o1);
        }
        ++summary.periods;
        if (max0 > high && max1 > high && min0 < low && min1 < low) ++summary.alternating_periods;
    }
    summary.mean_period = (summary.period_starts.back() - summary.period_starts.front()) /
                          static_cast<double>(summary.periods);
    return summary;
}

}  // namespace wmrecall
