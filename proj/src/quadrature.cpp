#include "fracheat/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include <Eigen/Eigenvalues>

#include "fracheat/error.hpp"

namespace fracheat::quad {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
// Legendre recurrence, weights 2 v_0^2 on [-1, 1].
Rule build(int order) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    Rule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    for (int k = 0; k < order; ++k) {
        const double v0 = eig.eigenvectors()(0, k);
        rule.nodes[static_cast<std::size_t>(k)] = 0.5 * (eig.eigenvalues()[k] + 1.0);
        rule.weights[static_cast<std::size_t>(k)] = v0 * v0;  // 2 v0^2 / 2
    }
    return rule;
}

}  // namespace

const Rule& gauss_legendre_unit(int order) {
    if (order < 1 || order > 64) {
        throw SizingError("Gauss-Legendre order must be in [1, 64], got " + std::to_string(order));
    }
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build(order)).first;
    return it->second;
}

}  // namespace fracheat::quad
