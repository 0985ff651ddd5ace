#pragma once

#include <memory>

#include <Eigen/Core>

#include "fracheat/grid.hpp"

namespace fracheat {

// Orders admitted by the operator assembly. Outside this window the Gamma
// factors in c_s degrade the conditioning of the stiffness matrix.
inline constexpr double kMinOrder = 0.01;
inline constexpr double kMaxOrder = 0.99;

// c_s = 2^{2s} s Gamma(s + 1/2) / (sqrt(pi) Gamma(1 - s)), the constant for
// which the singular-integral definition has Fourier symbol |xi|^{2s}.
// Throws RangeError unless 0 < s < 1.
double normalization_constant(double s);

struct AssemblyOptions {
    int near_order = 8;   // Gauss points for the desingularized touching-element integrals
    int far_order = 5;    // tensor Gauss points per direction for separated elements
    int threads = 1;
    // Near-field integrals are re-evaluated at twice the order; a relative
    // discrepancy above this throws QuadratureError.
    double near_tolerance = 1e-8;
};

// Stiffness matrix of the Dirichlet fractional Laplacian on P1 hat functions:
// A_ij = c_s/2 \int\int_{R x R} (psi_i(x)-psi_i(y))(psi_j(x)-psi_j(y)) / |x-y|^{1+2s}.
// Throws RangeError for s outside [kMinOrder, kMaxOrder].
Eigen::MatrixXd assemble_stiffness(const Grid& grid, double s, const AssemblyOptions& opts = {});

// Consistent P1 mass (tridiagonal 2h/3, h/6) or its row-sum lumping (h I).
Eigen::MatrixXd assemble_mass(const Grid& grid, bool lumped);

// Immutable bundle of the discretized operator.
class DiscreteOperator {
public:
    DiscreteOperator(Grid grid, double s, const AssemblyOptions& opts = {});

    const Grid& grid() const { return grid_; }
    double s() const { return s_; }
    double c_s() const { return c_s_; }
    int dofs() const { return grid_.dofs(); }

    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    const Eigen::MatrixXd& mass() const { return mass_; }
    // Diagonal of the lumped mass.
    const Eigen::VectorXd& lumped_mass() const { return lumped_; }
    Eigen::MatrixXd lumped_mass_matrix() const { return lumped_.asDiagonal(); }

    // Largest eigenvalue of (stiffness, lumped mass); the explicit Euler
    // stability limit is dt <= 2 / max_lumped_eigenvalue().
    double max_lumped_eigenvalue() const;

    // Discrete L2 norm sqrt(v^T M v) with the consistent mass.
    double l2_norm(const Eigen::VectorXd& v) const;

private:
    Grid grid_;
    double s_;
    double c_s_;
    Eigen::MatrixXd stiffness_;
    Eigen::MatrixXd mass_;
    Eigen::VectorXd lumped_;
    double max_lumped_eig_;
};

// Dense CSV, row-major, 17 significant digits.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

}  // namespace fracheat
