#include "wmrecall/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <system_error>

namespace wmrecall {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError(key, "cannot parse '" + text + "' as a number");
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    std::string v = trim(text);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key, "cannot parse '" + text + "' as a boolean");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"n_hypercolumns", [](RunConfig& c, auto& k, auto& v) { c.n_hypercolumns = parse_number<int>(k, v); }},
        {"omega", [](RunConfig& c, auto& k, auto& v) { c.omega = parse_number<double>(k, v); }},
        {"g_a", [](RunConfig& c, auto& k, auto& v) { c.g_a = parse_number<double>(k, v); }},
        {"tau", [](RunConfig& c, auto& k, auto& v) { c.tau = parse_number<double>(k, v); }},
        {"kappa", [](RunConfig& c, auto& k, auto& v) { c.kappa = parse_number<double>(k, v); }},
        {"dt", [](RunConfig& c, auto& k, auto& v) { c.dt = parse_number<double>(k, v); }},
        {"t_end", [](RunConfig& c, auto& k, auto& v) { c.t_end = parse_number<double>(k, v); }},
        {"record_stride", [](RunConfig& c, auto& k, auto& v) { c.record_stride = parse_number<int>(k, v); }},
        {"d0", [](RunConfig& c, auto& k, auto& v) { c.d0 = parse_number<double>(k, v); }},
        {"e0", [](RunConfig& c, auto& k, auto& v) { c.e0 = parse_number<double>(k, v); }},
        {"trial_count", [](RunConfig& c, auto& k, auto& v) { c.trial_count = parse_number<int>(k, v); }},
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"kappa_min", [](RunConfig& c, auto& k, auto& v) { c.kappa_min = parse_number<double>(k, v); }},
        {"kappa_max", [](RunConfig& c, auto& k, auto& v) { c.kappa_max = parse_number<double>(k, v); }},
        {"kappa_step", [](RunConfig& c, auto& k, auto& v) { c.kappa_step = parse_number<double>(k, v); }},
        {"horizon", [](RunConfig& c, auto& k, auto& v) { c.horizon = parse_number<double>(k, v); }},
        {"refine", [](RunConfig& c, auto& k, auto& v) { c.refine = parse_bool(k, v); }},
        {"refine_width", [](RunConfig& c, auto& k, auto& v) { c.refine_width = parse_number<double>(k, v); }},
        {"threads", [](RunConfig& c, auto& k, auto& v) { c.threads = parse_number<unsigned>(k, v); }},
        {"output", [](RunConfig& c, auto&, auto& v) { c.output = trim(v); }},
        {"report", [](RunConfig& c, auto&, auto& v) { c.report = trim(v); }},
        {"output_dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = trim(v); }},
    };
    return table;
}

void require(bool ok, const std::string& field, const std::string& problem) {
    if (!ok) throw ConfigError(field, problem);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

nlohmann::json complex_json(const std::complex<double>& z) { return {{"re", z.real()}, {"im", z.imag()}}; }

nlohmann::json eigen_json(const EigenPair& ev) { return nlohmann::json::array({complex_json(ev[0]), complex_json(ev[1])}); }

}  // namespace

NetworkParams RunConfig::network_params() const {
    validate(*this);
    return NetworkParams(n_hypercolumns, omega, g_a, tau);
}

ReducedParams RunConfig::reduced_params() const {
    validate(*this);
    return ReducedParams(effective_kappa(), g_a, tau);
}

IntegrationConfig RunConfig::integration(const IntegrationConfig& defaults) const {
    IntegrationConfig c{dt.value_or(defaults.dt), t_end.value_or(defaults.t_end),
                        record_stride.value_or(defaults.record_stride)};
    require(c.dt > 0.0 && std::isfinite(c.dt), "dt", "must be a finite positive number");
    require(std::isfinite(c.t_end) && c.t_end > 0.0, "t_end", "must be a finite positive number");
    require(c.t_end >= c.dt, "t_end", "must be >= dt");
    require(c.record_stride >= 1, "record_stride", "must be >= 1");
    return c;
}

SweepConfig RunConfig::sweep() const {
    validate(*this);
    SweepConfig s;
    s.kappa_min = kappa_min;
    s.kappa_max = kappa_max;
    s.step = kappa_step;
    s.g_a = g_a;
    s.tau = tau;
    s.trial_count = trial_count;
    s.seed = seed;
    s.threads = threads;
    s.detection.horizon = horizon;
    if (dt) s.detection.dt = *dt;
    return s;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, _] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    for (const auto& [name, set] : setters()) {
        if (name == key) {
            set(config, key, value);
            return;
        }
    }
    throw ConfigError(key, "unknown configuration key");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value', got '" + line + "'");
        set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

void validate(const RunConfig& c) {
    require(c.n_hypercolumns >= 2, "n_hypercolumns", "must be >= 2");
    require(c.omega > 0.0 && std::isfinite(c.omega), "omega", "must be a finite positive number");
    require(c.g_a > 0.0 && std::isfinite(c.g_a), "g_a", "must be a finite positive number");
    require(c.tau > 1.0 && std::isfinite(c.tau), "tau", "must be finite and > 1");
    if (c.kappa) require(std::isfinite(*c.kappa), "kappa", "must be finite");
    if (c.dt) require(*c.dt > 0.0 && std::isfinite(*c.dt), "dt", "must be a finite positive number");
    if (c.t_end) require(*c.t_end > 0.0 && std::isfinite(*c.t_end), "t_end", "must be a finite positive number");
    if (c.dt && c.t_end) require(*c.t_end >= *c.dt, "t_end", "must be >= dt");
    if (c.record_stride) require(*c.record_stride >= 1, "record_stride", "must be >= 1");
    require(std::isfinite(c.d0), "d0", "must be finite");
    require(std::isfinite(c.e0), "e0", "must be finite");
    require(c.trial_count >= 8, "trial_count", "must be >= 8");
    require(std::isfinite(c.kappa_min), "kappa_min", "must be finite");
    require(std::isfinite(c.kappa_max) && c.kappa_max >= c.kappa_min, "kappa_max", "must be finite and >= kappa_min");
    require(c.kappa_step > 0.0 && std::isfinite(c.kappa_step), "kappa_step", "must be a finite positive number");
    require(c.horizon > 0.0 && std::isfinite(c.horizon), "horizon", "must be a finite positive number");
    require(c.refine_width > 0.0, "refine_width", "must be > 0");
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw IoError("cannot format number");
    return std::string(buf.data(), ptr);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out = open_for_write(path);
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw IoError("csv row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("'" + path.string() + "' is empty");
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) table.header.push_back(trim(cell));
    }
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::istringstream rs(line);
        std::string cell;
        while (std::getline(rs, cell, ',')) {
            const std::string v = trim(cell);
            double x = 0.0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc() || ptr != v.data() + v.size()) throw IoError("bad csv value '" + cell + "'");
            row.push_back(x);
        }
        if (row.size() != table.header.size()) throw IoError("csv row width does not match header");
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable trajectory_table(const NetworkTrajectory& traj) {
    CsvTable t;
    t.header.push_back("t");
    const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size() / 4;
    for (Eigen::Index i = 1; i <= n; ++i) {
        const std::string h = std::to_string(i);
        for (const char* var : {"s", "a"})
            for (int j = 1; j <= 2; ++j) t.header.push_back(std::string(var) + "_" + h + "_" + std::to_string(j));
    }
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row{traj.times[k]};
        row.insert(row.end(), traj.states[k].data(), traj.states[k].data() + traj.states[k].size());
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable trajectory_table(const ReducedTrajectory& traj) {
    CsvTable t{{"t", "d", "e"}, {}};
    for (std::size_t k = 0; k < traj.size(); ++k) t.rows.push_back({traj.times[k], traj.states[k](0), traj.states[k](1)});
    return t;
}

void write_trajectory_csv(const NetworkTrajectory& traj, const std::filesystem::path& path) {
    write_csv(path, trajectory_table(traj));
}

void write_trajectory_csv(const ReducedTrajectory& traj, const std::filesystem::path& path) {
    write_csv(path, trajectory_table(traj));
}

CsvTable relative_state_table(const RecallDemo& demo) {
    const auto& traj = demo.trajectory;
    CsvTable t;
    t.header.push_back("t");
    const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size() / 4;
    for (Eigen::Index l = 2; l <= n; ++l) t.header.push_back("D_1_" + std::to_string(l));
    for (Eigen::Index l = 2; l <= n; ++l) t.header.push_back("E_1_" + std::to_string(l));
    t.header.push_back("sync_error");
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& x = traj.states[k];
        std::vector<double> row{traj.times[k]};
        for (Eigen::Index l = 1; l < n; ++l) row.push_back(x(0) - x(4 * l));
        for (Eigen::Index l = 1; l < n; ++l) row.push_back(x(2) - x(4 * l + 2));
        row.push_back(demo.sync_error[k]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable hypercolumn_state_table(const RecallDemo& demo, int hypercolumn) {
    const std::string h = std::to_string(hypercolumn + 1);
    CsvTable t{{"t", "s_" + h + "_1", "s_" + h + "_2"}, {}};
    for (std::size_t k = 0; k < demo.trajectory.size(); ++k) {
        const auto& x = demo.trajectory.states[k];
        t.rows.push_back({demo.trajectory.times[k], x(4 * hypercolumn), x(4 * hypercolumn + 1)});
    }
    return t;
}

CsvTable hypercolumn_output_table(const RecallDemo& demo, int hypercolumn) {
    const std::string h = std::to_string(hypercolumn + 1);
    CsvTable t{{"t", "o_" + h + "_1", "o_" + h + "_2", "a_" + h + "_1", "a_" + h + "_2"}, {}};
    for (std::size_t k = 0; k < demo.trajectory.size(); ++k) {
        const auto& x = demo.trajectory.states[k];
        const auto& o = demo.outputs[k];
        t.rows.push_back({demo.trajectory.times[k], o(hypercolumn, 0), o(hypercolumn, 1), x(4 * hypercolumn + 2),
                          x(4 * hypercolumn + 3)});
    }
    return t;
}

nlohmann::json to_json(const SyncBounds& b) { return {{"omega_min", b.omega_min}, {"omega_max", b.omega_max}}; }

nlohmann::json to_json(const CorollaryReport& r) {
    return {{"n_hypercolumns", r.n_hypercolumns},
            {"omega", r.omega},
            {"kappa", r.kappa},
            {"bounds", to_json(r.bounds)},
            {"sync_condition", r.sync_condition},
            {"omega_unique_max", r.omega_unique_max},
            {"unique_equilibrium_condition", r.unique_equilibrium_condition},
            {"omega_cycle_min", r.omega_cycle_min},
            {"ga_condition", r.ga_condition},
            {"omega_cycle_condition", r.omega_cycle_condition},
            {"limit_cycle_condition", r.limit_cycle_condition},
            {"all_satisfied", r.all_satisfied()}};
}

nlohmann::json to_json(const Equilibrium& eq) {
    return {{"d_star", eq.d_star},
            {"e_star", eq.e_star},
            {"eigenvalues", eigen_json(eq.eigenvalues)},
            {"stable", eq.stable},
            {"stability", to_string(eq.stability)},
            {"degenerate", eq.degenerate},
            {"residual", eq.residual}};
}

nlohmann::json to_json(const HopfReport& r) {
    return {{"kappa_star", r.kappa_star},
            {"condition_ga", r.condition_ga},
            {"eigenvalues_at_star", eigen_json(r.eigenvalues_at_star)},
            {"beta", r.beta},
            {"transversality", r.transversality},
            {"cubic_coefficient", r.cubic_coefficient ? nlohmann::json(*r.cubic_coefficient) : nlohmann::json()}};
}

nlohmann::json to_json(const LimitCycle& c) {
    return {{"amplitude_d", c.amplitude_d}, {"period", c.period}, {"period_spread", c.period_spread}};
}

nlohmann::json to_json(const TrialSummary& t) {
    return {{"initial", {{"d", t.initial.d}, {"e", t.initial.e}}},
            {"outcome", to_string(t.outcome)},
            {"cycle", t.cycle ? to_json(*t.cycle) : nlohmann::json()},
            {"final_state", {{"d", t.final_state.d}, {"e", t.final_state.e}}}};
}

nlohmann::json to_json(const RegimeReport& r) {
    nlohmann::json eqs = nlohmann::json::array();
    for (const auto& eq : r.equilibria) eqs.push_back(to_json(eq));
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& t : r.evidence) evidence.push_back(to_json(t));
    return {{"kappa", r.kappa},
            {"g_a", r.g_a},
            {"tau", r.tau},
            {"regime", to_string(r.regime)},
            {"equilibria", eqs},
            {"limit_cycle", r.limit_cycle ? to_json(*r.limit_cycle) : nlohmann::json()},
            {"evidence", evidence}};
}

nlohmann::json to_json(const Transition& t) {
    return {{"kappa_low", t.kappa_low}, {"kappa_high", t.kappa_high}, {"from", to_string(t.from)}, {"to", to_string(t.to)}};
}

nlohmann::json to_json(const SweepResult& r) {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& g : r.grid) grid.push_back({{"kappa", g.kappa}, {"report", to_json(g)}});
    nlohmann::json transitions = nlohmann::json::array();
    for (const auto& t : r.transitions) transitions.push_back(to_json(t));
    return {{"g_a", r.g_a}, {"tau", r.tau}, {"grid", grid}, {"transitions", transitions}};
}

void write_report_json(const nlohmann::json& report, const std::filesystem::path& path) {
    std::ofstream out = open_for_write(path);
    out << report.dump(2) << '\n';
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace wmrecall
