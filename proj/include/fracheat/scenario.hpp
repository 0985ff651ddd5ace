#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "fracheat/grid.hpp"

namespace fracheat {

enum class HorizonMode { fixed, minimal_time };

// Initial data and target are amplitudes of cos(pi x / 2).
struct ScenarioConfig {
    std::optional<std::string> case_preset;
    double s = 0.8;
    int n_x = 20;
    int n_t = 300;
    Interval omega{-0.3, 0.8};
    HorizonMode horizon_mode = HorizonMode::fixed;
    double T = 0.9;
    std::pair<double, double> bracket{0.1, 4.0};
    double tol_T = 1e-3;
    bool nonneg_control = true;
    bool nonneg_state = true;
    double z0_amplitude = 2.0;
    double zhat0_amplitude = 0.05;
    double uhat = 0.2;
    double nu = 0.2;  // defaults to uhat
    std::string output_dir = "fracheat_out";
    bool emit_plots = false;
    std::uint64_t seed = 42;
    int threads = 1;
};

// Explicit fields win over the preset, the preset wins over the defaults.
// Throws ConfigError naming the offending field.
ScenarioConfig parse_config(const std::string& text);
nlohmann::json resolved_json(const ScenarioConfig& cfg);

struct ScenarioResult {
    nlohmann::json summary;
    bool feasible = false;
};

// Writes trajectory.csv, control.csv, summary.json (and plot scripts when
// requested) into cfg.output_dir. Library errors propagate.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

// 0 ok, 2 configuration, 3 solver, 4 I/O.
int exit_code_for(const std::exception& e);
nlohmann::json error_record(const std::exception& e);

}  // namespace fracheat
