#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "fracheat/control.hpp"
#include "fracheat/dynamics.hpp"
#include "fracheat/observability.hpp"
#include "fracheat/spectral.hpp"

namespace fracheat {

// 17 significant digits, round-trip safe.
std::string format_double(double v);

// Long format "t,x,z", boundary nodes included (always zero).
void write_trajectory_csv(const Trajectory& traj, const Grid& grid, const std::string& path);
// Long format "t,x,u" over the support nodes, t = start of the time cell.
void write_control_csv(const ControlField& control, double dt, const std::string& path);
void write_curve_csv(const BlowupCurve& curve, std::ostream& out);

nlohmann::json spectral_report_json(const SpectralBasis& basis, const GapReport& gaps, double beta_hat);
nlohmann::json estimate_json(const ObservabilityEstimate& est);
nlohmann::json atomicity_json(const AtomicityReport& report);
nlohmann::json minimal_time_json(const MinimalTimeReport& report);

// Throws IoError when the file cannot be written.
void write_text(const std::string& path, const std::string& text);

}  // namespace fracheat
