// wmrecall: command-line front end.
//
// Precedence for every setting: built-in default < --config file < command-line flag.
// Exit status: 0 success, 1 validation error, 2 runtime / integration / I/O error.

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "wmrecall/analysis.hpp"
#include "wmrecall/classify.hpp"
#include "wmrecall/integrator.hpp"
#include "wmrecall/io.hpp"

namespace fs = std::filesystem;
using namespace wmrecall;

namespace {

constexpr IntegrationConfig kNetworkDefaults{0.005, 1500.0, 20};
constexpr IntegrationConfig kReducedDefaults{0.01, 200.0, 1};

struct Overrides {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> values;
};

std::string flag_name(std::string key) {
    for (auto& c : key)
        if (c == '_') c = '-';
    return "--" + key;
}

void add_config_options(CLI::App* sub, Overrides& ov) {
    sub->add_option("--config", ov.config_path, "Flat key = value configuration file");
    for (const auto& key : config_keys()) {
        if (key == "refine") {
            sub->add_flag_function("--refine", [&ov](std::int64_t) { ov.values.emplace_back("refine", "true"); },
                                   "Bisect every regime change down to refine_width");
            continue;
        }
        std::string names = flag_name(key);
        if (key == "n_hypercolumns") names = "-N," + names;
        sub->add_option_function<std::string>(
            names, [&ov, key](const std::string& v) { ov.values.emplace_back(key, v); }, "Sets '" + key + "'");
    }
}

RunConfig resolve(const Overrides& ov) {
    RunConfig config;
    if (!ov.config_path.empty()) config = load_config(ov.config_path);
    for (const auto& [k, v] : ov.values) set_config_value(config, k, v);
    validate(config);
    return config;
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

const char* yes_no(bool b) { return b ? "satisfied" : "NOT satisfied"; }

int run_sync_check(const RunConfig& c) {
    const SyncBounds b = sync_bounds(c.g_a, c.tau);
    const CorollaryReport r = corollary_check(c.n_hypercolumns, c.omega, c.g_a, c.tau);
    std::cout << "sync bounds: (" << fixed(b.omega_min, 4) << ", " << fixed(b.omega_max, 4) << ")"
              << "  omega_min=" << format_double(b.omega_min) << " omega_max=" << format_double(b.omega_max) << "\n"
              << "omega=" << format_double(c.omega) << " N=" << c.n_hypercolumns << " kappa=" << format_double(r.kappa)
              << "\n"
              << "(i)   synchronization  g_a/tau < omega < g_a/(tau-1): " << yes_no(r.sync_condition) << "\n"
              << "(ii)  unique equilibrium omega < (g_a+2)/(N-1) = " << format_double(r.omega_unique_max) << ": "
              << yes_no(r.unique_equilibrium_condition) << "\n"
              << "(iii) limit cycle  g_a > 2/tau and omega > " << format_double(r.omega_cycle_min) << ": "
              << yes_no(r.limit_cycle_condition) << "\n"
              << (r.all_satisfied() ? "all conditions satisfied" : "some conditions not satisfied") << "\n";
    if (c.report) write_report_json({{"sync_bounds", to_json(b)}, {"corollary", to_json(r)}}, *c.report);
    return 0;
}

int run_simulate(const RunConfig& c) {
    const NetworkParams p = c.network_params();
    const IntegrationConfig ic = c.integration(kNetworkDefaults);
    const auto traj = simulate_network(p, random_network_state(p.n_hypercolumns(), c.seed), ic);
    const fs::path out = c.output.value_or("trajectory.csv");
    write_trajectory_csv(traj, out);
    const double err = sync_error(traj).back();
    std::cout << "wrote " << traj.size() << " samples to " << out.string() << "\n"
              << "final sync error " << format_double(err) << "\n";
    if (c.report)
        write_report_json({{"samples", traj.size()},
                           {"dt", ic.dt},
                           {"t_end", ic.t_end},
                           {"record_stride", ic.record_stride},
                           {"final_sync_error", err},
                           {"corollary", to_json(corollary_check(p.n_hypercolumns(), p.omega(), p.g_a(), p.tau()))}},
                          *c.report);
    return 0;
}

int run_reduce(const RunConfig& c) {
    const ReducedParams p = c.reduced_params();
    const auto traj = simulate_reduced(p, {c.d0, c.e0}, c.integration(kReducedDefaults));
    const fs::path out = c.output.value_or("reduced.csv");
    write_trajectory_csv(traj, out);
    std::cout << "wrote " << traj.size() << " samples (kappa=" << format_double(p.kappa) << ") to " << out.string()
              << "\n";
    return 0;
}

int run_equilibria(const RunConfig& c) {
    const ReducedParams p = c.reduced_params();
    const auto eqs = find_equilibria(p.kappa, p.g_a, p.tau);
    std::cout << "kappa=" << format_double(p.kappa) << " g_a=" << format_double(p.g_a)
              << " tau=" << format_double(p.tau) << "\n"
              << "d_star,e_star,lambda1,lambda2,stable,stability\n";
    auto ev = [](const std::complex<double>& z) {
        return format_double(z.real()) + (z.imag() < 0 ? "-" : "+") + format_double(std::abs(z.imag())) + "i";
    };
    nlohmann::json list = nlohmann::json::array();
    for (const auto& eq : eqs) {
        std::cout << format_double(eq.d_star) << "," << format_double(eq.e_star) << "," << ev(eq.eigenvalues[0])
                  << "," << ev(eq.eigenvalues[1]) << "," << (eq.stable ? "true" : "false") << ","
                  << to_string(eq.stability) << (eq.degenerate ? " (degenerate)" : "") << "\n";
        list.push_back(to_json(eq));
    }
    if (c.report)
        write_report_json({{"kappa", p.kappa}, {"g_a", p.g_a}, {"tau", p.tau}, {"equilibria", list}}, *c.report);
    return 0;
}

int run_classify(const RunConfig& c) {
    const ReducedParams p = c.reduced_params();
    const SweepConfig s = c.sweep();
    const RegimeReport r = classify_regime(p.kappa, p.g_a, p.tau, c.trial_count, c.seed, s.detection);
    const fs::path out = c.report.value_or("regime_report.json");
    write_report_json(to_json(r), out);
    std::cout << "kappa=" << format_double(r.kappa) << " regime=" << to_string(r.regime) << "\n";
    if (r.limit_cycle)
        std::cout << "limit cycle: amplitude_d=" << format_double(r.limit_cycle->amplitude_d)
                  << " period=" << format_double(r.limit_cycle->period) << "\n";
    std::cout << "report written to " << out.string() << "\n";
    return 0;
}

int run_sweep(const RunConfig& c) {
    const SweepConfig s = c.sweep();
    const SweepResult r = sweep_kappa(s);
    nlohmann::json report = to_json(r);
    for (const auto& t : r.transitions)
        std::cout << "transition " << to_string(t.from) << " -> " << to_string(t.to) << " in ["
                  << format_double(t.kappa_low) << ", " << format_double(t.kappa_high) << "]\n";
    if (c.refine) {
        nlohmann::json refined = nlohmann::json::array();
        for (const auto& t : r.transitions) {
            const Transition rt = refine_transition(t, s, c.refine_width);
            std::cout << "refined " << to_string(rt.from) << " -> " << to_string(rt.to) << " in ["
                      << format_double(rt.kappa_low) << ", " << format_double(rt.kappa_high) << "]\n";
            refined.push_back(to_json(rt));
        }
        report["refined_transitions"] = refined;
    }
    const fs::path out = c.report.value_or("sweep_report.json");
    write_report_json(report, out);
    std::cout << "report written to " << out.string() << "\n";
    return 0;
}

int run_recall_demo(const RunConfig& c) {
    const NetworkParams p = c.network_params();
    const IntegrationConfig ic = c.integration(kNetworkDefaults);
    const RecallDemo demo = recall_demo(p, ic, c.seed);
    for (const auto& w : demo.warnings) std::cerr << "warning: " << w << "\n";

    const fs::path dir = c.output_dir.value_or("recall_demo");
    write_csv(dir / "relative_states.csv", relative_state_table(demo));
    write_csv(dir / "hypercolumn1_state.csv", hypercolumn_state_table(demo));
    write_csv(dir / "hypercolumn1_output_adaptation.csv", hypercolumn_output_table(demo));

    const AlternationSummary alt = check_alternation(demo, 0.5 * ic.t_end);
    const nlohmann::json report = {
        {"n_hypercolumns", p.n_hypercolumns()},
        {"omega", p.omega()},
        {"g_a", p.g_a()},
        {"tau", p.tau()},
        {"kappa", p.kappa()},
        {"seed", c.seed},
        {"dt", ic.dt},
        {"t_end", ic.t_end},
        {"record_stride", ic.record_stride},
        {"corollary", to_json(demo.corollary)},
        {"warnings", demo.warnings},
        {"final_sync_error", demo.sync_error.back()},
        {"alternation",
         {{"periods", alt.periods}, {"alternating_periods", alt.alternating_periods}, {"mean_period", alt.mean_period}}}};
    write_report_json(report, dir / "recall_report.json");

    std::cout << "final sync error " << format_double(demo.sync_error.back()) << "\n"
              << "hypercolumn 1: " << alt.alternating_periods << "/" << alt.periods
              << " periods alternate, mean period " << format_double(alt.mean_period) << "\n"
              << "datasets written to " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-recall dynamics of a two-minicolumn modular attractor network"};
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&);
    };
    const std::vector<Command> commands = {
        {"sync-check", "Synchronization bounds and the three coupling conditions", run_sync_check},
        {"simulate", "Integrate the full network and write its trajectory CSV", run_simulate},
        {"reduce", "Integrate the reduced (d, e) system and write its trajectory CSV", run_reduce},
        {"equilibria", "List equilibria of the reduced system with eigenvalues", run_equilibria},
        {"classify", "Classify the attractor regime at one kappa", run_classify},
        {"sweep", "Classify regimes over a kappa grid", run_sweep},
        {"recall-demo", "Synchronized recall run with figure datasets", run_recall_demo},
    };

    std::vector<Overrides> overrides(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        subs.push_back(app.add_subcommand(commands[i].name, commands[i].help));
        add_config_options(subs.back(), overrides[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            return commands[i].run(resolve(overrides[i]));
        } catch (const std::logic_error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return 1;
}
