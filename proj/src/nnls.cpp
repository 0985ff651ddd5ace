#include "fracheat/nnls.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/QR>

namespace fracheat {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const std::vector<int>& passive) {
    Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(passive.size()));
    for (std::size_t q = 0; q < passive.size(); ++q) sub.col(static_cast<Eigen::Index>(q)) = A.col(passive[q]);
    return sub.colPivHouseholderQr().solve(b);
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter, double tol) {
    const Eigen::Index n = A.cols();
    if (max_iter <= 0) max_iter = static_cast<int>(3 * n) + 30;
    if (tol <= 0.0) {
        tol = 10.0 * std::numeric_limits<double>::epsilon() * A.cwiseAbs().maxCoeff() *
              std::max(A.rows(), A.cols()) * std::max(1.0, b.cwiseAbs().maxCoeff());
    }

    NnlsResult out;
    out.x = Eigen::VectorXd::Zero(n);
    std::vector<char> in_passive(static_cast<std::size_t>(n), 0);
    std::vector<int> passive;

    Eigen::VectorXd w = A.transpose() * (b - A * out.x);
    while (out.iterations < max_iter) {
        Eigen::Index t = -1;
        double w_max = tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!in_passive[static_cast<std::size_t>(j)] && w[j] > w_max) {
                w_max = w[j];
                t = j;
            }
        }
        if (t < 0) {
            out.converged = true;
            break;
        }
        in_passive[static_cast<std::size_t>(t)] = 1;
        passive.push_back(static_cast<int>(t));

        // inner loop: keep the passive solution feasible
        while (true) {
            ++out.iterations;
            const Eigen::VectorXd z = solve_passive(A, b, passive);
            bool all_positive = true;
            for (Eigen::Index q = 0; q < z.size(); ++q) all_positive = all_positive && z[q] > 0.0;
            if (all_positive) {
                for (std::size_t q = 0; q < passive.size(); ++q) out.x[passive[q]] = z[static_cast<Eigen::Index>(q)];
                break;
            }
            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t q = 0; q < passive.size(); ++q) {
                const double zq = z[static_cast<Eigen::Index>(q)];
                if (zq <= 0.0) {
                    const double xq = out.x[passive[q]];
                    alpha = std::min(alpha, xq / (xq - zq));
                }
            }
            for (std::size_t q = 0; q < passive.size(); ++q) {
                const int j = passive[q];
                out.x[j] += alpha * (z[static_cast<Eigen::Index>(q)] - out.x[j]);
            }
            std::vector<int> kept;
            for (int j : passive) {
                if (out.x[j] > tol) {
                    kept.push_back(j);
                } else {
                    out.x[j] = 0.0;
                    in_passive[static_cast<std::size_t>(j)] = 0;
                }
            }
            passive.swap(kept);
            if (out.iterations >= max_iter) break;
        }
        w = A.transpose() * (b - A * out.x);
    }
    out.residual = (A * out.x - b).norm();
    return out;
}

}  // namespace fracheat
