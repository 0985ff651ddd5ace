#include "fracheat/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <numbers>
#include <set>

#include "fracheat/assembly.hpp"
#include "fracheat/control.hpp"
#include "fracheat/error.hpp"
#include "fracheat/io.hpp"
#include "fracheat/observability.hpp"
#include "fracheat/spectral.hpp"

namespace fracheat {

using nlohmann::json;

namespace {

double get_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    return v.get<double>();
}

long long get_integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
    return v.get<long long>();
}

bool get_bool(const json& v, const std::string& field) {
    if (!v.is_boolean()) throw ConfigError(field, "expected true or false");
    return v.get<bool>();
}

std::pair<double, double> get_pair(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(field, "expected an array of two numbers");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown field");
    }
}

void apply_preset(ScenarioConfig& cfg, const std::string& name) {
    cfg.s = 0.8;
    cfg.n_x = 20;
    cfg.omega = {-0.3, 0.8};
    if (name == "case1") {
        cfg.n_t = 300;
        cfg.z0_amplitude = 2.0;
        cfg.zhat0_amplitude = 0.05;
        cfg.uhat = 0.2;
        cfg.T = 0.9;
        cfg.bracket = {0.1, 4.0};
    } else if (name == "case2") {
        cfg.n_t = 100;
        cfg.z0_amplitude = 0.5;
        cfg.zhat0_amplitude = 6.0;
        cfg.uhat = 1.0;
        cfg.T = 0.4;
        cfg.bracket = {0.05, 1.0};
    } else {
        throw ConfigError("case_preset", "expected \"case1\" or \"case2\", got \"" + name + "\"");
    }
    cfg.nu = cfg.uhat;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("", "configuration must be a JSON object");
    reject_unknown(root,
                   {"case_preset", "s", "n_x", "n_t", "omega", "horizon", "constraints", "z0_amplitude",
                    "zhat0_amplitude", "uhat", "nu", "output_dir", "emit_plots", "seed", "threads"},
                   "");

    ScenarioConfig cfg;
    if (root.contains("case_preset")) {
        if (!root["case_preset"].is_string()) throw ConfigError("case_preset", "expected a string");
        cfg.case_preset = root["case_preset"].get<std::string>();
        apply_preset(cfg, *cfg.case_preset);
    }

    if (root.contains("s")) {
        cfg.s = get_number(root["s"], "s");
        if (!(cfg.s >= kMinOrder && cfg.s <= kMaxOrder)) throw ConfigError("s", "must lie in [0.01, 0.99]");
    }
    if (root.contains("n_x")) {
        const long long v = get_integer(root["n_x"], "n_x");
        if (v < 2 || v > 4000) throw ConfigError("n_x", "must be in [2, 4000]");
        cfg.n_x = static_cast<int>(v);
    }
    if (root.contains("n_t")) {
        const long long v = get_integer(root["n_t"], "n_t");
        if (v < 1 || v > 1000000) throw ConfigError("n_t", "must be in [1, 1000000]");
        cfg.n_t = static_cast<int>(v);
    }
    if (root.contains("omega")) {
        const auto [lo, hi] = get_pair(root["omega"], "omega");
        if (!(lo > -1.0 && hi < 1.0 && lo < hi)) throw ConfigError("omega", "must be an interval strictly inside (-1, 1)");
        cfg.omega = {lo, hi};
    }
    if (root.contains("horizon")) {
        const json& h = root["horizon"];
        if (!h.is_object()) throw ConfigError("horizon", "expected an object");
        reject_unknown(h, {"mode", "T", "bracket", "tol"}, "horizon.");
        if (h.contains("mode")) {
            if (!h["mode"].is_string()) throw ConfigError("horizon.mode", "expected a string");
            const std::string mode = h["mode"].get<std::string>();
            if (mode == "fixed") {
                cfg.horizon_mode = HorizonMode::fixed;
            } else if (mode == "minimal_time") {
                cfg.horizon_mode = HorizonMode::minimal_time;
            } else {
                throw ConfigError("horizon.mode", "expected \"fixed\" or \"minimal_time\"");
            }
        }
        if (h.contains("T")) {
            cfg.T = get_number(h["T"], "horizon.T");
            if (!(cfg.T > 0.0)) throw ConfigError("horizon.T", "must be positive");
        }
        if (h.contains("bracket")) {
            cfg.bracket = get_pair(h["bracket"], "horizon.bracket");
            if (!(cfg.bracket.first > 0.0 && cfg.bracket.second > cfg.bracket.first)) {
                throw ConfigError("horizon.bracket", "must satisfy 0 < lo < hi");
            }
        }
        if (h.contains("tol")) {
            cfg.tol_T = get_number(h["tol"], "horizon.tol");
            if (!(cfg.tol_T > 0.0)) throw ConfigError("horizon.tol", "must be positive");
        }
    }
    if (root.contains("constraints")) {
        const json& c = root["constraints"];
        if (!c.is_object()) throw ConfigError("constraints", "expected an object");
        reject_unknown(c, {"nonneg_control", "nonneg_state"}, "constraints.");
        if (c.contains("nonneg_control")) cfg.nonneg_control = get_bool(c["nonneg_control"], "constraints.nonneg_control");
        if (c.contains("nonneg_state")) cfg.nonneg_state = get_bool(c["nonneg_state"], "constraints.nonneg_state");
    }
    if (root.contains("z0_amplitude")) cfg.z0_amplitude = get_number(root["z0_amplitude"], "z0_amplitude");
    if (root.contains("zhat0_amplitude")) {
        cfg.zhat0_amplitude = get_number(root["zhat0_amplitude"], "zhat0_amplitude");
        if (!(cfg.zhat0_amplitude > 0.0)) throw ConfigError("zhat0_amplitude", "target initial datum must be positive");
    }
    if (root.contains("uhat")) {
        cfg.uhat = get_number(root["uhat"], "uhat");
        if (!(cfg.uhat >= 0.0)) throw ConfigError("uhat", "must be nonnegative");
        cfg.nu = cfg.uhat;
    }
    if (root.contains("nu")) {
        cfg.nu = get_number(root["nu"], "nu");
        if (!(cfg.nu >= 0.0)) throw ConfigError("nu", "must be nonnegative");
    }
    if (root.contains("output_dir")) {
        if (!root["output_dir"].is_string()) throw ConfigError("output_dir", "expected a string");
        cfg.output_dir = root["output_dir"].get<std::string>();
    }
    if (root.contains("emit_plots")) cfg.emit_plots = get_bool(root["emit_plots"], "emit_plots");
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("threads")) {
        const long long v = get_integer(root["threads"], "threads");
        if (v < 1 || v > 256) throw ConfigError("threads", "must be in [1, 256]");
        cfg.threads = static_cast<int>(v);
    }
    return cfg;
}

json resolved_json(const ScenarioConfig& cfg) {
    json j;
    j["case_preset"] = cfg.case_preset ? json(*cfg.case_preset) : json(nullptr);
    j["s"] = cfg.s;
    j["n_x"] = cfg.n_x;
    j["n_t"] = cfg.n_t;
    j["omega"] = {cfg.omega.lo, cfg.omega.hi};
    j["horizon"] = {{"mode", cfg.horizon_mode == HorizonMode::fixed ? "fixed" : "minimal_time"},
                    {"T", cfg.T},
                    {"bracket", {cfg.bracket.first, cfg.bracket.second}},
                    {"tol", cfg.tol_T}};
    j["constraints"] = {{"nonneg_control", cfg.nonneg_control}, {"nonneg_state", cfg.nonneg_state}};
    j["z0_amplitude"] = cfg.z0_amplitude;
    j["zhat0_amplitude"] = cfg.zhat0_amplitude;
    j["uhat"] = cfg.uhat;
    j["nu"] = cfg.nu;
    j["output_dir"] = cfg.output_dir;
    j["emit_plots"] = cfg.emit_plots;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    return j;
}

namespace {

constexpr const char* kStatePlot = R"(import csv
import collections
import matplotlib.pyplot as plt

rows = collections.defaultdict(list)
with open("trajectory.csv") as f:
    for r in csv.DictReader(f):
        rows[float(r["t"])].append((float(r["x"]), float(r["z"])))
times = sorted(rows)
fig, ax = plt.subplots()
for t in times[:: max(1, len(times) // 8)] + [times[-1]]:
    xs, zs = zip(*sorted(rows[t]))
    ax.plot(xs, zs, label=f"t = {t:.3f}")
ax.set_xlabel("x")
ax.set_ylabel("z")
ax.legend()
fig.savefig("state_evolution.png", dpi=150)
)";

constexpr const char* kControlPlot = R"(import csv
import numpy as np
import matplotlib.pyplot as plt

data = np.array([[float(r["t"]), float(r["x"]), float(r["u"])] for r in csv.DictReader(open("control.csv"))])
ts = np.unique(data[:, 0])
xs = np.unique(data[:, 1])
grid = data[:, 2].reshape(len(ts), len(xs))
fig, ax = plt.subplots()
mesh = ax.pcolormesh(xs, ts, grid, shading="nearest")
fig.colorbar(mesh, ax=ax, label="u")
ax.set_xlabel("x")
ax.set_ylabel("t")
fig.savefig("control_heatmap.png", dpi=150)
)";

constexpr const char* kImpulsePlot = R"(import json
import matplotlib.pyplot as plt

summary = json.load(open("summary.json"))
top = summary["atomicity"]["top_impulses"] if summary.get("atomicity") else []
fig, ax = plt.subplots()
if top:
    ax.scatter([p["x"] for p in top], [p["t"] for p in top], s=[2000 * p["mass"] / top[0]["mass"] for p in top])
ax.set_xlabel("x")
ax.set_ylabel("t")
ax.set_title("largest control impulses")
fig.savefig("impulse_map.png", dpi=150)
)";

// Observability constant specialised to the data at hand: with v the
// minimal-norm unconstrained control steering z0 onto the free run of zhat0,
// ||v||_inf^2 = e^{-lambda_1 T} C(T) ||z0 - zhat0||^2 holds with equality, so
// the sufficient-time test becomes ||v||_inf < nu, which guarantees that
// uhat + v is an admissible nonnegative control.
double data_constant(const ControlProblem& problem, double lambda_1, double T, int n_t) {
    const double dist = problem.norm(problem.z0 - problem.zhat0);
    if (dist == 0.0) return 0.0;
    ControlProblem difference = problem;
    difference.uhat = 0.0;
    difference.nonneg_control = false;
    difference.nonneg_state = false;
    try {
        const UnconstrainedOutcome v = solve_unconstrained_Linf(difference, T, n_t, 1e-3);
        return v.u_inf * v.u_inf * std::exp(lambda_1 * T) / (dist * dist);
    } catch (const SolverError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();

    AssemblyOptions aopts;
    aopts.threads = cfg.threads;
    auto op = std::make_shared<const DiscreteOperator>(Grid(cfg.n_x), cfg.s, aopts);
    const Grid& grid = op->grid();

    const SpectralBasis basis = eigendecompose(*op, op->dofs());
    GapReport gaps;
    if (basis.k_max >= 3) gaps = gap_statistics(basis);
    const double beta_hat = l1_lower_bound(basis, cfg.omega);

    auto cos_profile = [&](double amp) {
        return grid.interpolate([amp](double x) { return amp * std::cos(std::numbers::pi * x / 2.0); });
    };
    ControlProblem problem;
    problem.op = op;
    problem.z0 = cos_profile(cfg.z0_amplitude);
    problem.zhat0 = cos_profile(cfg.zhat0_amplitude);
    problem.uhat = cfg.uhat;
    problem.omega = cfg.omega;
    problem.nonneg_control = cfg.nonneg_control;
    problem.nonneg_state = cfg.nonneg_state;
    problem.nu = cfg.nu;
    problem.validate();

    json summary;
    summary["resolved_config"] = resolved_json(cfg);
    summary["seed"] = cfg.seed;
    const int k_report = std::min(10, basis.k_max);
    summary["lambda"] = std::vector<double>(basis.eigenvalues.data(), basis.eigenvalues.data() + k_report);
    summary["min_gap"] = basis.k_max >= 3 ? json(gaps.min_gap) : json(nullptr);
    summary["beta_hat"] = beta_hat;

    FixedTimeOutcome outcome;
    double horizon = cfg.T;
    if (cfg.horizon_mode == HorizonMode::fixed) {
        outcome = solve_constrained_fixed_time(problem, cfg.T, cfg.n_t);
        summary["final_residual"] = outcome.final_residual;
        summary["eps_target"] = outcome.eps_target;
        summary["T"] = cfg.T;
        summary["method"] = outcome.method;
        summary["T_min_estimate"] = nullptr;
        summary["minimal_time"] = nullptr;
    } else {
        MinimalTimeReport report = minimal_time_search(problem, cfg.bracket, cfg.tol_T, cfg.n_t);
        horizon = report.T_hi;
        outcome = report.best;
        summary["T_min_estimate"] = report.T_min_estimate;
        summary["minimal_time"] = minimal_time_json(report);
        summary["final_residual"] = outcome.final_residual;
        summary["eps_target"] = outcome.eps_target;
        summary["T"] = horizon;
        summary["method"] = outcome.method;
    }
    summary["feasible"] = outcome.feasible;
    const double dt = horizon / cfg.n_t;
    if (outcome.control.values.size() == 0 || outcome.control.values.minCoeff() >= -1e-8) {
        summary["atomicity"] = atomicity_json(impulse_analysis(outcome.control, dt, grid.h(), 0.01));
    } else {
        summary["atomicity"] = nullptr;
    }

    if (cfg.nu > 0.0) {
        const double lambda_1 = basis.eigenvalues[0];
        try {
            summary["sufficient_time_bound"] = sufficient_time_bound(
                problem, lambda_1, [&](double T) { return data_constant(problem, lambda_1, T, cfg.n_t); },
                HorizonGrid{0.05, 20.0, 60});
        } catch (const SolverError&) {
            summary["sufficient_time_bound"] = nullptr;
        }
    } else {
        summary["sufficient_time_bound"] = nullptr;
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output_dir + ": " + ec.message());
    const std::filesystem::path dir(cfg.output_dir);
    write_trajectory_csv(outcome.trajectory, grid, (dir / "trajectory.csv").string());
    write_control_csv(outcome.control, dt, (dir / "control.csv").string());
    if (cfg.emit_plots) {
        write_text((dir / "plot_state.py").string(), kStatePlot);
        write_text((dir / "plot_control.py").string(), kControlPlot);
        write_text((dir / "plot_impulses.py").string(), kImpulsePlot);
    }

    summary["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text((dir / "summary.json").string(), summary.dump(2) + "\n");

    ScenarioResult result;
    result.summary = summary;
    result.feasible = outcome.feasible;
    return result;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const IoError*>(&e)) return 4;
    if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const CflError*>(&e)) return 3;
    if (dynamic_cast<const RangeError*>(&e) || dynamic_cast<const SizingError*>(&e)) return 2;
    return 3;
}

json error_record(const std::exception& e) {
    json j;
    std::string type = "error";
    if (dynamic_cast<const ConfigError*>(&e)) type = "config";
    else if (dynamic_cast<const IoError*>(&e)) type = "io";
    else if (dynamic_cast<const BracketError*>(&e)) type = "bracket";
    else if (dynamic_cast<const QuadratureError*>(&e)) type = "quadrature";
    else if (dynamic_cast<const SolverError*>(&e)) type = "solver";
    else if (dynamic_cast<const CflError*>(&e)) type = "cfl";
    else if (dynamic_cast<const RangeError*>(&e)) type = "range";
    else if (dynamic_cast<const SizingError*>(&e)) type = "sizing";
    j["error"] = {{"type", type}, {"message", e.what()}};
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) j["error"]["field"] = ce->field();
    j["exit_code"] = exit_code_for(e);
    return j;
}

}  // namespace fracheat
