#pragma once

#include "dpmimo/mc.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpmimo {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Impairment {
    double chi = 0.0;
    double xi = 0.0;
    double csi_error = 0.0;
};

struct SystemConfig {
    Scenario scenario;
    PowerAllocation power;
    std::vector<double> snr_db;
    std::vector<Impairment> impairments;
    std::vector<RateSet> rate_sets;
    std::vector<Scheme> schemes;
    bool outage = true;
    bool ergodic = false;
    bool analytic = true;
    bool mc = true;
    std::int64_t trials_outage = 100000;
    std::int64_t trials_ergodic = 20000;
    std::uint64_t seed = 1;
    // Fully resolved JSON, enough to re-run bit-identically.
    nlohmann::json resolved;
};

nlohmann::json default_config_json();
const std::vector<std::string>& preset_names();
// Patch applied on top of the defaults; throws config_error for unknown names.
nlohmann::json preset_patch(const std::string& name);

// "a.b=value": value parsed as JSON, else taken as a string.
void apply_override(nlohmann::json& cfg, const std::string& assignment);

// Merges `patch` over the defaults, validates, checks feasibility.
SystemConfig load_config(const nlohmann::json& patch);
SystemConfig load_config_text(const std::string& text);
SystemConfig load_config_file(const std::string& path);

struct ResultRow {
    std::string scheme;
    int group = 1;
    std::string user;
    double snr_db = 0.0;
    double chi = 0.0;
    double xi = 0.0;
    double csi_error = 0.0;
    std::string metric;
    std::string source; // analytic | mc
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

std::vector<ResultRow> analytic_rows(const SystemConfig& cfg, const PreparedScenario& ps);
std::vector<ResultRow> run_experiment(const SystemConfig& cfg, int workers);

void emit_csv(std::ostream& os, const SystemConfig& cfg, const std::vector<ResultRow>& rows);
void emit_json(std::ostream& os, const SystemConfig& cfg, const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_json_rows(const nlohmann::json& doc);

// Shortest round-trip decimal form.
std::string format_double(double v);

} // namespace dpmimo
