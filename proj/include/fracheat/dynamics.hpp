#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fracheat/assembly.hpp"
#include "fracheat/grid.hpp"
#include "fracheat/spectral.hpp"

namespace fracheat {

enum class TimeScheme { explicit_euler, implicit_euler };
enum class MassKind { lumped, consistent };

struct SimulationOptions {
    TimeScheme scheme = TimeScheme::implicit_euler;
    // Only read by the implicit scheme; explicit Euler always lumps.
    MassKind mass = MassKind::lumped;
};

// Row j of `states` holds the interior nodal values at t_j = j T / n_t.
struct Trajectory {
    Eigen::VectorXd times;
    Eigen::MatrixXd states;
    double min_value = 0.0;

    int n_t() const { return static_cast<int>(times.size()) - 1; }
    double horizon() const { return times[times.size() - 1]; }
    Eigen::VectorXd final_state() const { return states.row(states.rows() - 1).transpose(); }
};

// Piecewise constant in time on right-open cells [t_j, t_{j+1}), supported
// on the interior DOFs strictly inside omega. values(r, j) belongs to DOF
// support[r] and cell j.
struct ControlField {
    Interval omega;
    std::vector<int> support;
    std::vector<double> x;  // coordinates of the support DOFs
    Eigen::MatrixXd values;

    static ControlField zero(const Grid& grid, const Interval& omega, int n_t);
    static ControlField constant(const Grid& grid, const Interval& omega, int n_t, double value);

    int n_t() const { return static_cast<int>(values.cols()); }
    std::vector<bool> support_mask(int dofs) const;
    // Zero extension of cell j to all interior DOFs.
    Eigen::VectorXd expand(int j, int dofs) const;
};

// (M + dt K) solves for a fixed step, shared by the forward and adjoint
// sweeps of the control solvers.
class ImplicitStepper {
public:
    ImplicitStepper(const DiscreteOperator& op, double dt, MassKind mass);

    double dt() const { return dt_; }
    const Eigen::MatrixXd& mass() const { return mass_; }
    Eigen::VectorXd apply_mass(const Eigen::VectorXd& v) const { return mass_ * v; }
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return factor_.solve(rhs); }
    Eigen::MatrixXd solve_block(const Eigen::MatrixXd& rhs) const { return factor_.solve(rhs); }
    // z_{j+1} = (M + dt K)^{-1} M (z_j + dt u_j).
    Eigen::VectorXd step(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const;

private:
    double dt_;
    Eigen::MatrixXd mass_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
};

// Throws SizingError for n_t < 1 or mismatched sizes, RangeError for T <= 0
// and CflError when explicit Euler violates dt * lambda_max <= 2.
Trajectory simulate(const DiscreteOperator& op, const Eigen::VectorXd& z0, const ControlField& control,
                    double T, int n_t, const SimulationOptions& opts = {});

// Mode coefficients of a piecewise-constant source: coeffs(k, j) on cell
// [j dt, (j+1) dt).
struct ModalSource {
    Eigen::MatrixXd coeffs;
    double dt = 1.0;
};

// z_k(t) = z_k^0 e^{-lambda_k t} + \int_0^t e^{-lambda_k (t - tau)} u_k(tau) dtau,
// with the cell integrals in closed form. Returns mode coefficients.
Eigen::VectorXd duhamel_spectral(const SpectralBasis& basis, const Eigen::VectorXd& z0_coeffs,
                                 const ModalSource& source, double t);

// Projects a control field onto the modes: phi_k^T M E u_j (consistent mass).
ModalSource project_control(const SpectralBasis& basis, const DiscreteOperator& op,
                            const ControlField& control, double dt);

// Constant source uhat on omega. Throws RangeError if zhat0 has a
// nonpositive interior entry or uhat < 0.
Trajectory generate_target_trajectory(const DiscreteOperator& op, const Eigen::VectorXd& zhat0, double uhat,
                                      const Interval& omega, double T, int n_t,
                                      const SimulationOptions& opts = {});

struct PositivityReport {
    double min_value = 0.0;
    std::optional<std::pair<int, int>> first_violation;  // (time index, DOF index)
};

PositivityReport positivity_check(const Trajectory& traj, double tol);

}  // namespace fracheat
