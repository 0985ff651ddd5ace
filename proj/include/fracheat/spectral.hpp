#pragma once

#include <vector>

#include <Eigen/Core>

#include "fracheat/assembly.hpp"
#include "fracheat/grid.hpp"

namespace fracheat {

// Discrete eigenpairs of K phi = lambda M phi (consistent mass), ascending,
// M-orthonormal columns. phi_1 is oriented nonnegative; every other column
// is oriented so that its first entry of significant size is positive.
struct SpectralBasis {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    int k_max = 0;
    double s = 0.0;
    Grid grid{2};

    // Eigenvalues kept for asymptotic comparisons: the lowest 80%.
    int resolved_count() const;
    // Coefficients phi_k^T M v for k < k_max.
    Eigen::VectorXd project(const Eigen::MatrixXd& mass, const Eigen::VectorXd& v) const;
};

// Dense symmetric-definite solve. Throws SizingError if k_max is not in
// [1, dofs], SolverError if the reduction of M fails.
SpectralBasis eigendecompose(const DiscreteOperator& op, int k_max);

struct GapReport {
    double min_gap = 0.0;            // min (lambda_{k+1} - lambda_k) over the resolved range
    int resolved_count = 0;
    std::vector<double> partial_sums;  // partial_sums[K-1] = sum_{k<=K} 1/lambda_k
};

// Requires k_max >= 3 (SizingError otherwise).
GapReport gap_statistics(const SpectralBasis& basis);

// (S_50 - S_10) / (S_80 - S_40) for 1-based partial sums S_K; the series
// "flattens" when the ratio is at least 2. Needs 80 partial sums.
double flattening_ratio(const std::vector<double>& partial_sums);
bool partial_sums_flatten(const std::vector<double>& partial_sums);

// Trapezoid rule for \int_omega |v| of the P1 function with nodal values
// v on the interior DOFs (zero at +-1). omega may touch the boundary.
double l1_norm_on(const Grid& grid, const Eigen::VectorXd& v, const Interval& omega);

// min over the resolved range of \int_omega |phi_k|.
double l1_lower_bound(const SpectralBasis& basis, const Interval& omega);

enum class PhaseShift { plus, minus };

// (k pi/2 +- (1-s) pi/4)^{2s}. The minus branch is the large-k law of the
// Dirichlet eigenvalues; the plus branch is offered for comparison.
double eigenvalue_law(int k, double s, PhaseShift shift);

// ---- half-line quasi-eigenfunctions ------------------------------------

// C^1 cutoff: 0 below -1/3, 1 above 1/3, two quadratic pieces in between.
double q_profile(double x);

// Density whose Laplace transform is the correction term G of the
// half-line eigenfunction; the inner log-integral has a removable 0/0 at
// r = 1/y. Throws RangeError for y <= 0 or s outside (0, 1).
double gamma_density(double y, double s);

// G(xi) = \int_0^infty exp(-xi y) gamma(y) dy. Throws QuadratureError with
// the offending y-range when the nested quadrature misses its tolerance.
double G_transform(double xi, double s);

// Half-line eigenfunction profile sin(z + (1-s) pi/4) - G(z) for z > 0, 0 otherwise.
double half_line_profile(double z, double s);

// mu_k = k pi/2 - (1-s) pi/4.
double half_line_frequency(int k, double s);

struct QuasiEigenfunction {
    int k = 0;
    double mu_k = 0.0;
    Eigen::VectorXd values;  // all grid nodes, boundary nodes included (exactly zero)
    double residual_norm = 0.0;
    // Same residual restricted to nodes with 1 - |x| >= 0.1. The full sup is
    // dominated by the P1 boundary layer, which grows like h^{-s}.
    double bulk_residual_norm = 0.0;
};

// varrho_k(x) = q(-x) F(mu_k (1+x)) + (-1)^{k+1} q(x) F(mu_k (1-x)).
// residual_norm = max_i |(M_L^{-1} K varrho)_i - mu_k^{2s} varrho_i|.
// Throws SizingError unless n_x >= 8k.
QuasiEigenfunction quasi_eigenfunction(int k, const DiscreteOperator& op);

}  // namespace fracheat
