#pragma once

// Run configuration (flat key = value files plus flag overrides), CSV trajectory files and
// JSON report serialization.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wmrecall/analysis.hpp"
#include "wmrecall/classify.hpp"
#include "wmrecall/errors.hpp"
#include "wmrecall/integrator.hpp"

namespace wmrecall {

/// A configuration value that violates a constraint; the message names the field.
class ConfigError : public ContractError {
public:
    ConfigError(const std::string& field, const std::string& problem)
        : ContractError("field '" + field + "': " + problem), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // model
    int n_hypercolumns = 12;
    double omega = 1.8;
    double g_a = 97.0;
    double tau = 54.0;
    std::optional<double> kappa;  // reduced-system commands; defaults to (N - 1) omega

    // integration; unset values take per-command defaults
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<int> record_stride;
    double d0 = 0.1;
    double e0 = 0.0;

    // classification
    int trial_count = 16;
    std::uint64_t seed = 1;
    double kappa_min = 2.0;
    double kappa_max = 15.0;
    double kappa_step = 0.25;
    double horizon = 500.0;
    bool refine = false;
    double refine_width = 1e-3;
    unsigned threads = 0;

    // outputs
    std::optional<std::string> output;
    std::optional<std::string> report;
    std::optional<std::string> output_dir;

    double effective_kappa() const { return kappa.value_or(static_cast<double>(n_hypercolumns - 1) * omega); }
    NetworkParams network_params() const;
    ReducedParams reduced_params() const;
    IntegrationConfig integration(const IntegrationConfig& defaults) const;
    SweepConfig sweep() const;
};

/// Every accepted key, in the order they are documented.
const std::vector<std::string>& config_keys();

/// Assigns one key from its text form; throws ConfigError on unknown keys or unparsable values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Parses `key = value` lines; '#' starts a comment.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Field-level checks shared by all commands.
void validate(const RunConfig& config);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Columns t, s_1_1, s_1_2, a_1_1, a_1_2, s_2_1, ...
CsvTable trajectory_table(const NetworkTrajectory& traj);
/// Columns t, d, e
CsvTable trajectory_table(const ReducedTrajectory& traj);

void write_trajectory_csv(const NetworkTrajectory& traj, const std::filesystem::path& path);
void write_trajectory_csv(const ReducedTrajectory& traj, const std::filesystem::path& path);

/// Relative states to hypercolumn 1: t, D_1_2..D_1_N, E_1_2..E_1_N (first minicolumn), sync_error.
CsvTable relative_state_table(const RecallDemo& demo);
/// t, s_1_1, s_1_2 of one hypercolumn.
CsvTable hypercolumn_state_table(const RecallDemo& demo, int hypercolumn = 0);
/// t, o_1_1, o_1_2, a_1_1, a_1_2 of one hypercolumn.
CsvTable hypercolumn_output_table(const RecallDemo& demo, int hypercolumn = 0);

nlohmann::json to_json(const SyncBounds& b);
nlohmann::json to_json(const CorollaryReport& r);
nlohmann::json to_json(const Equilibrium& eq);
nlohmann::json to_json(const HopfReport& r);
nlohmann::json to_json(const LimitCycle& c);
nlohmann::json to_json(const TrialSummary& t);
nlohmann::json to_json(const RegimeReport& r);
nlohmann::json to_json(const Transition& t);
nlohmann::json to_json(const SweepResult& r);

/// Writes `report` as indented JSON with a trailing newline.
void write_report_json(const nlohmann::json& report, const std::filesystem::path& path);

}  // namespace wmrecall
