#include "fracheat/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fracheat/error.hpp"

namespace fracheat {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

void close_or_throw(std::ofstream& out, const std::string& path) {
    out.close();
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
    auto out = open_or_throw(path);
    out << text;
    close_or_throw(out, path);
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    auto out = open_or_throw(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    close_or_throw(out, path);
}

void write_trajectory_csv(const Trajectory& traj, const Grid& grid, const std::string& path) {
    auto out = open_or_throw(path);
    out << "t,x,z\n";
    const auto& nodes = grid.nodes();
    for (Eigen::Index j = 0; j < traj.states.rows(); ++j) {
        const std::string t = format_double(traj.times[j]);
        for (std::size_t node = 0; node < nodes.size(); ++node) {
            const bool boundary = node == 0 || node + 1 == nodes.size();
            const double z = boundary ? 0.0 : traj.states(j, static_cast<Eigen::Index>(node) - 1);
            out << t << ',' << format_double(nodes[node]) << ',' << format_double(z) << '\n';
        }
    }
    close_or_throw(out, path);
}

void write_control_csv(const ControlField& control, double dt, const std::string& path) {
    auto out = open_or_throw(path);
    out << "t,x,u\n";
    for (Eigen::Index j = 0; j < control.values.cols(); ++j) {
        const std::string t = format_double(static_cast<double>(j) * dt);
        for (std::size_t r = 0; r < control.x.size(); ++r) {
            out << t << ',' << format_double(control.x[r]) << ','
                << format_double(control.values(static_cast<Eigen::Index>(r), j)) << '\n';
        }
    }
    close_or_throw(out, path);
}

void write_curve_csv(const BlowupCurve& curve, std::ostream& out) {
    out << "T,C_lower,slope_fit\n";
    for (std::size_t i = 0; i < curve.T.size(); ++i) {
        out << format_double(curve.T[i]) << ',' << format_double(curve.C_lower[i]) << ','
            << format_double(curve.slope_fit) << '\n';
    }
}

nlohmann::json spectral_report_json(const SpectralBasis& basis, const GapReport& gaps, double beta_hat) {
    nlohmann::json j;
    j["s"] = basis.s;
    j["n_x"] = basis.grid.n_x();
    j["eigenvalues"] = std::vector<double>(basis.eigenvalues.data(), basis.eigenvalues.data() + basis.eigenvalues.size());
    j["min_gap"] = gaps.min_gap;
    j["partial_sums"] = gaps.partial_sums;
    j["beta_hat"] = beta_hat;
    return j;
}

nlohmann::json estimate_json(const ObservabilityEstimate& est) {
    nlohmann::json j;
    j["T"] = est.T;
    j["lower_bound_C"] = est.lower_bound_C;
    j["witness_coeffs"] =
        std::vector<double>(est.witness_coeffs.data(), est.witness_coeffs.data() + est.witness_coeffs.size());
    j["strategy_log"] = est.strategy_log;
    return j;
}

nlohmann::json atomicity_json(const AtomicityReport& report) {
    nlohmann::json j;
    j["total_mass"] = report.total_mass;
    j["active_cell_fraction"] = report.active_cell_fraction;
    nlohmann::json top = nlohmann::json::array();
    for (const auto& imp : report.top_impulses) top.push_back({{"x", imp.x}, {"t", imp.t}, {"mass", imp.mass}});
    j["top_impulses"] = top;
    return j;
}

nlohmann::json minimal_time_json(const MinimalTimeReport& report) {
    nlohmann::json j;
    j["T_lo"] = report.T_lo;
    j["T_hi"] = report.T_hi;
    j["T_min_estimate"] = report.T_min_estimate;
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& h : report.history) hist.push_back({{"T", h.T}, {"feasible", h.feasible}, {"residual", h.residual}});
    j["history"] = hist;
    j["atomicity"] = atomicity_json(report.atomicity);
    return j;
}

}  // namespace fracheat
