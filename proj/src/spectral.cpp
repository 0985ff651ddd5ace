#include "fracheat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "fracheat/error.hpp"

namespace fracheat {

int SpectralBasis::resolved_count() const {
    return std::max(1, static_cast<int>(std::floor(0.8 * k_max)));
}

Eigen::VectorXd SpectralBasis::project(const Eigen::MatrixXd& mass, const Eigen::VectorXd& v) const {
    return eigenvectors.transpose() * (mass * v);
}

SpectralBasis eigendecompose(const DiscreteOperator& op, int k_max) {
    const int n = op.dofs();
    if (k_max < 1 || k_max > n) {
        throw SizingError("k_max must be in [1, " + std::to_string(n) + "], got " +
                          std::to_string(k_max));
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        op.stiffness(), op.mass(), Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success) {
        throw SolverError("generalized eigensolve failed (Cholesky reduction of the mass matrix, n = " +
                          std::to_string(n) + ")");
    }

    SpectralBasis basis;
    basis.k_max = k_max;
    basis.s = op.s();
    basis.grid = op.grid();
    basis.eigenvalues = solver.eigenvalues().head(k_max);
    basis.eigenvectors = solver.eigenvectors().leftCols(k_max);

    for (int k = 0; k < k_max; ++k) {
        auto col = basis.eigenvectors.col(k);
        double sign = 1.0;
        if (k == 0) {
            sign = col.sum() >= 0.0 ? 1.0 : -1.0;
        } else {
            const double scale = col.cwiseAbs().maxCoeff();
            for (int i = 0; i < n; ++i) {
                if (std::abs(col[i]) > 1e-6 * scale) {
                    sign = col[i] > 0.0 ? 1.0 : -1.0;
                    break;
                }
            }
        }
        col *= sign;
    }
    return basis;
}

GapReport gap_statistics(const SpectralBasis& basis) {
    if (basis.k_max < 3) {
        throw SizingError("gap statistics need at least 3 eigenvalues");
    }
    GapReport report;
    report.resolved_count = std::max(2, basis.resolved_count());
    report.min_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < report.resolved_count; ++k) {
        report.min_gap = std::min(report.min_gap, basis.eigenvalues[k + 1] - basis.eigenvalues[k]);
    }
    double acc = 0.0;
    report.partial_sums.reserve(static_cast<std::size_t>(basis.k_max));
    for (int k = 0; k < basis.k_max; ++k) {
        acc += 1.0 / basis.eigenvalues[k];
        report.partial_sums.push_back(acc);
    }
    return report;
}

double flattening_ratio(const std::vector<double>& partial_sums) {
    if (partial_sums.size() < 80) {
        throw SizingError("flattening test needs 80 partial sums, got " +
                          std::to_string(partial_sums.size()));
    }
    auto S = [&](int K) { return partial_sums[static_cast<std::size_t>(K - 1)]; };
    return (S(50) - S(10)) / (S(80) - S(40));
}

bool partial_sums_flatten(const std::vector<double>& partial_sums) {
    return flattening_ratio(partial_sums) >= 2.0;
}

double l1_norm_on(const Grid& grid, const Eigen::VectorXd& v, const Interval& omega) {
    if (!(omega.lo < omega.hi) || omega.lo < -1.0 || omega.hi > 1.0) {
        throw RangeError("L1 window must be a nonempty subinterval of [-1, 1]");
    }
    const auto& nodes = grid.nodes();
    const int n_x = grid.n_x();
    auto value = [&](int node) { return (node == 0 || node == n_x) ? 0.0 : v[node - 1]; };
    // P1 interpolation at an arbitrary point
    auto eval = [&](double x) {
        const int e = std::clamp(static_cast<int>(std::floor((x + 1.0) / grid.h())), 0, n_x - 1);
        const double t = (x - nodes[static_cast<std::size_t>(e)]) / grid.h();
        return (1.0 - t) * value(e) + t * value(e + 1);
    };

    double total = 0.0;
    double x_prev = omega.lo;
    double f_prev = std::abs(eval(omega.lo));
    for (int node = 0; node <= n_x; ++node) {
        const double x = nodes[static_cast<std::size_t>(node)];
        if (x <= omega.lo || x >= omega.hi) continue;
        const double f = std::abs(value(node));
        total += 0.5 * (x - x_prev) * (f + f_prev);
        x_prev = x;
        f_prev = f;
    }
    const double f_end = std::abs(eval(omega.hi));
    total += 0.5 * (omega.hi - x_prev) * (f_end + f_prev);
    return total;
}

double l1_lower_bound(const SpectralBasis& basis, const Interval& omega) {
    const int resolved = basis.resolved_count();
    double beta = std::numeric_limits<double>::infinity();
    for (int k = 0; k < resolved; ++k) {
        beta = std::min(beta, l1_norm_on(basis.grid, basis.eigenvectors.col(k), omega));
    }
    return beta;
}

double eigenvalue_law(int k, double s, PhaseShift shift) {
    const double phase = (1.0 - s) * std::numbers::pi / 4.0;
    const double base = k * std::numbers::pi / 2.0 + (shift == PhaseShift::plus ? phase : -phase);
    return std::pow(base, 2.0 * s);
}

}  // namespace fracheat
