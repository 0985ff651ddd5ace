#pragma once

#include <Eigen/Core>

namespace fracheat {

struct NnlsResult {
    Eigen::VectorXd x;
    double residual = 0.0;  // ||A x - b||
    int iterations = 0;
    bool converged = false;
};

// Lawson-Hanson active set method for min ||A x - b|| subject to x >= 0.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter = 0, double tol = 0.0);

}  // namespace fracheat
