#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracheat/assembly.hpp"
#include "fracheat/error.hpp"
#include "fracheat/io.hpp"
#include "fracheat/observability.hpp"
#include "fracheat/scenario.hpp"
#include "fracheat/spectral.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fracheat::IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int report_failure(const std::exception& e, const std::string& output_dir) {
    const nlohmann::json record = fracheat::error_record(e);
    std::cerr << record.dump(2) << '\n';
    if (!output_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(output_dir, ec);
        std::ofstream out(std::filesystem::path(output_dir) / "error.json");
        if (out) out << record.dump(2) << '\n';
    }
    return fracheat::exit_code_for(e);
}

int cmd_run(const std::string& config_path, int threads, long long seed) {
    std::string output_dir;
    try {
        fracheat::ScenarioConfig cfg = fracheat::parse_config(read_file(config_path));
        if (threads > 0) cfg.threads = threads;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (const char* env = std::getenv("FRACHEAT_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
        output_dir = cfg.output_dir;
        const fracheat::ScenarioResult result = fracheat::run_scenario(cfg);
        const auto& s = result.summary;
        std::cout << "feasible: " << (result.feasible ? "true" : "false") << '\n';
        if (!s["T_min_estimate"].is_null()) std::cout << "T_min_estimate: " << s["T_min_estimate"].get<double>() << '\n';
        std::cout << "final_residual: " << s["final_residual"].get<double>() << " (eps_target "
                  << s["eps_target"].get<double>() << ")\n";
        std::cout << "output: " << cfg.output_dir << '\n';
        return 0;
    } catch (const std::exception& e) {
        return report_failure(e, output_dir);
    }
}

int cmd_spectrum(double s, int n_x) {
    try {
        if (!(s >= fracheat::kMinOrder && s <= fracheat::kMaxOrder)) throw fracheat::RangeError("s must lie in [0.01, 0.99]");
        const fracheat::DiscreteOperator op(fracheat::build_grid(n_x), s);
        const fracheat::SpectralBasis basis = fracheat::eigendecompose(op, op.dofs());
        fracheat::GapReport gaps;
        if (basis.k_max >= 3) gaps = fracheat::gap_statistics(basis);
        const double beta = fracheat::l1_lower_bound(basis, {-0.3, 0.8});
        std::cout << fracheat::spectral_report_json(basis, gaps, beta).dump(2) << '\n';
        return 0;
    } catch (const std::exception& e) {
        return report_failure(e, "");
    }
}

int cmd_obs_curve(double s, double tmin, double tmax, int points, int K, const std::string& shift, long long seed) {
    try {
        if (!(tmin > 0.0 && tmax > tmin)) throw fracheat::RangeError("need 0 < tmin < tmax");
        if (points < 2) throw fracheat::SizingError("need at least two horizons");
        const auto law = shift == "minus" ? fracheat::PhaseShift::minus : fracheat::PhaseShift::plus;
        const Eigen::VectorXd mu = fracheat::law_exponents(s, K, law);
        std::vector<double> T_list;
        for (int i = 0; i < points; ++i) {
            T_list.push_back(tmin * std::pow(tmax / tmin, static_cast<double>(i) / (points - 1)));
        }
        fracheat::EstimatorOptions opts;
        if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
        fracheat::write_curve_csv(fracheat::blowup_curve(mu, T_list, K, opts), std::cout);
        return 0;
    } catch (const std::exception& e) {
        return report_failure(e, "");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracheat: controlled fractional heat equation solver"};
    app.require_subcommand(1);

    std::string config_path;
    int threads = 0;
    long long seed = -1;
    auto* run = app.add_subcommand("run", "run a scenario from a JSON config");
    run->add_option("--config", config_path, "scenario config")->required();
    run->add_option("--threads", threads, "assembly threads")->check(CLI::Range(1, 256));
    run->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);

    double s = 0.8;
    int n_x = 20;
    auto* spectrum = app.add_subcommand("spectrum", "discrete eigenvalues and gap statistics as JSON");
    spectrum->add_option("--s", s, "fractional order")->required();
    spectrum->add_option("--nx", n_x, "number of subintervals")->required();

    double tmin = 0.05, tmax = 4.0;
    int points = 12, K = 8;
    std::string shift = "plus";
    auto* curve = app.add_subcommand("obs-curve", "observability constant lower bounds versus T as CSV");
    curve->add_option("--s", s, "fractional order")->required();
    curve->add_option("--tmin", tmin, "smallest horizon")->required();
    curve->add_option("--tmax", tmax, "largest horizon")->required();
    curve->add_option("--points", points, "number of horizons (geometric spacing)");
    curve->add_option("--K", K, "number of exponentials");
    curve->add_option("--shift", shift, "phase of the eigenvalue law")->check(CLI::IsMember({"plus", "minus"}));
    curve->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*run) return cmd_run(config_path, threads, seed);
    if (*spectrum) return cmd_spectrum(s, n_x);
    return cmd_obs_curve(s, tmin, tmax, points, K, shift, seed);
}
