#include "fracheat/dynamics.hpp"

#include <cmath>
#include <string>

#include "fracheat/error.hpp"

namespace fracheat {

ControlField ControlField::zero(const Grid& grid, const Interval& omega, int n_t) {
    if (n_t < 1) throw SizingError("control needs n_t >= 1 time cells");
    ControlField c;
    c.omega = omega;
    c.support = grid.dofs_in(omega);
    for (int i : c.support) c.x.push_back(grid.x(i));
    c.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c.support.size()), n_t);
    return c;
}

ControlField ControlField::constant(const Grid& grid, const Interval& omega, int n_t, double value) {
    ControlField c = zero(grid, omega, n_t);
    c.values.setConstant(value);
    return c;
}

std::vector<bool> ControlField::support_mask(int dofs) const {
    std::vector<bool> mask(static_cast<std::size_t>(dofs), false);
    for (int i : support) mask[static_cast<std::size_t>(i)] = true;
    return mask;
}

Eigen::VectorXd ControlField::expand(int j, int dofs) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dofs);
    for (std::size_t r = 0; r < support.size(); ++r) u[support[r]] = values(static_cast<Eigen::Index>(r), j);
    return u;
}

ImplicitStepper::ImplicitStepper(const DiscreteOperator& op, double dt, MassKind mass) : dt_(dt) {
    mass_ = mass == MassKind::lumped ? op.lumped_mass_matrix() : op.mass();
    factor_.compute(mass_ + dt * op.stiffness());
    if (factor_.info() != Eigen::Success) {
        throw SolverError("Cholesky factorization of M + dt K failed (dt = " + std::to_string(dt) + ")");
    }
}

Eigen::VectorXd ImplicitStepper::step(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const {
    return factor_.solve(mass_ * (z + dt_ * u));
}

Trajectory simulate(const DiscreteOperator& op, const Eigen::VectorXd& z0, const ControlField& control,
                    double T, int n_t, const SimulationOptions& opts) {
    const int n = op.dofs();
    if (n_t < 1) throw SizingError("n_t must be >= 1, got " + std::to_string(n_t));
    if (!(T > 0.0)) throw RangeError("horizon T must be positive");
    if (z0.size() != n) {
        throw SizingError("initial datum has " + std::to_string(z0.size()) + " entries, expected " +
                          std::to_string(n));
    }
    if (control.n_t() != n_t) {
        throw SizingError("control has " + std::to_string(control.n_t()) + " time cells, expected " +
                          std::to_string(n_t));
    }
    const double dt = T / n_t;

    Trajectory traj;
    traj.times.resize(n_t + 1);
    for (int j = 0; j <= n_t; ++j) traj.times[j] = T * j / n_t;
    traj.times[n_t] = T;
    traj.states.resize(n_t + 1, n);
    traj.states.row(0) = z0.transpose();

    if (opts.scheme == TimeScheme::explicit_euler) {
        const double lambda_max = op.max_lumped_eigenvalue();
        if (dt * lambda_max > 2.0) {
            const int admissible = static_cast<int>(std::ceil(T * lambda_max / 2.0));
            throw CflError("explicit Euler unstable: dt * lambda_max = " + std::to_string(dt * lambda_max) +
                               " > 2; use n_t >= " + std::to_string(admissible),
                           admissible);
        }
        const Eigen::VectorXd inv_mass = op.lumped_mass().cwiseInverse();
        Eigen::VectorXd z = z0;
        for (int j = 0; j < n_t; ++j) {
            const Eigen::VectorXd u = control.expand(j, n);
            z += dt * (u - inv_mass.cwiseProduct(op.stiffness() * z));
            traj.states.row(j + 1) = z.transpose();
        }
    } else {
        const ImplicitStepper stepper(op, dt, opts.mass);
        Eigen::VectorXd z = z0;
        for (int j = 0; j < n_t; ++j) {
            z = stepper.step(z, control.expand(j, n));
            traj.states.row(j + 1) = z.transpose();
        }
    }
    traj.min_value = traj.states.minCoeff();
    return traj;
}

Eigen::VectorXd duhamel_spectral(const SpectralBasis& basis, const Eigen::VectorXd& z0_coeffs,
                                 const ModalSource& source, double t) {
    if (t < 0.0) throw RangeError("Duhamel time must be nonnegative");
    const int k_max = static_cast<int>(basis.eigenvalues.size());
    if (z0_coeffs.size() != k_max) throw SizingError("initial coefficients do not match the basis size");
    const bool has_source = source.coeffs.size() > 0;
    if (has_source && source.coeffs.rows() != k_max) {
        throw SizingError("source coefficients do not match the basis size");
    }

    Eigen::VectorXd out(k_max);
    for (int k = 0; k < k_max; ++k) {
        const double lambda = basis.eigenvalues[k];
        double z = z0_coeffs[k] * std::exp(-lambda * t);
        if (has_source) {
            for (Eigen::Index j = 0; j < source.coeffs.cols(); ++j) {
                const double a = static_cast<double>(j) * source.dt;
                if (a >= t) break;
                const double b = std::min(t, a + source.dt);
                // \int_a^b e^{-lambda (t - tau)} dtau
                const double integral = std::exp(-lambda * (t - b)) * -std::expm1(-lambda * (b - a)) / lambda;
                z += source.coeffs(k, j) * integral;
            }
        }
        out[k] = z;
    }
    return out;
}

ModalSource project_control(const SpectralBasis& basis, const DiscreteOperator& op, const ControlField& control,
                            double dt) {
    ModalSource src;
    src.dt = dt;
    src.coeffs.resize(basis.eigenvectors.cols(), control.n_t());
    const Eigen::MatrixXd weights = basis.eigenvectors.transpose() * op.mass();
    for (int j = 0; j < control.n_t(); ++j) src.coeffs.col(j) = weights * control.expand(j, op.dofs());
    return src;
}

Trajectory generate_target_trajectory(const DiscreteOperator& op, const Eigen::VectorXd& zhat0, double uhat,
                                      const Interval& omega, double T, int n_t, const SimulationOptions& opts) {
    if (zhat0.size() != op.dofs()) throw SizingError("target initial datum has the wrong size");
    for (Eigen::Index i = 0; i < zhat0.size(); ++i) {
        if (!(zhat0[i] > 0.0)) {
            throw RangeError("target initial datum must be positive at every interior node (node " +
                             std::to_string(i) + " is " + std::to_string(zhat0[i]) + ")");
        }
    }
    if (!(uhat >= 0.0)) throw RangeError("target source uhat must be nonnegative");
    return simulate(op, zhat0, ControlField::constant(op.grid(), omega, n_t, uhat), T, n_t, opts);
}

PositivityReport positivity_check(const Trajectory& traj, double tol) {
    PositivityReport report;
    report.min_value = traj.states.size() > 0 ? traj.states.minCoeff() : 0.0;
    for (Eigen::Index j = 0; j < traj.states.rows() && !report.first_violation; ++j) {
        for (Eigen::Index i = 0; i < traj.states.cols(); ++i) {
            if (traj.states(j, i) < -tol) {
                report.first_violation = std::make_pair(static_cast<int>(j), static_cast<int>(i));
                break;
            }
        }
    }
    return report;
}

}  // namespace fracheat
