#include "fracheat/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fracheat/error.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat {

double normalization_constant(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw RangeError("fractional order s must lie in (0, 1), got " + std::to_string(s));
    }
    return std::pow(2.0, 2.0 * s) * s * std::tgamma(s + 0.5) /
           (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - s));
}

namespace {

using Mat = Eigen::MatrixXd;

// Touching elements [x_e, x_{e+1}] and [x_{e+1}, x_{e+2}]. With
// x = x_{e+1} - u, y = x_{e+1} + v the hat differences are homogeneous of
// degree one in (u, v); the polar-type split u = rho, v = rho*eta (and the
// mirrored triangle) integrates rho exactly and leaves a smooth eta integral.
// Returns the 3x3 local matrix on nodes (e, e+1, e+2), without c_s.
Mat touching_block(double h, double s, int order) {
    const auto& rule = quad::gauss_legendre_unit(order);
    Mat local = Mat::Zero(3, 3);
    Eigen::Vector3d d;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double eta = rule.nodes[q];
        const double w = rule.weights[q] * std::pow(1.0 + eta, -1.0 - 2.0 * s);
        // triangle u >= v: (u, v) = rho (1, eta)
        d << 1.0, eta - 1.0, -eta;
        local.noalias() += w * d * d.transpose();
        // triangle v > u: (u, v) = rho (eta, 1)
        d << eta, 1.0 - eta, -1.0;
        local.noalias() += w * d * d.transpose();
    }
    // radial factor: \int_0^h rho^{2-2s} d rho, and the 1/h^2 of the hat slopes
    local *= std::pow(h, 3.0 - 2.0 * s) / (3.0 - 2.0 * s) / (h * h);
    return local;
}

// Separated elements e < f - 1, tensor Gauss. Local nodes (e, e+1, f, f+1).
void separated_block(const Grid& grid, int e, int f, double s, const quad::Rule& rule,
                     Eigen::Matrix4d& local) {
    const double h = grid.h();
    const double xe = grid.nodes()[static_cast<std::size_t>(e)];
    const double xf = grid.nodes()[static_cast<std::size_t>(f)];
    local.setZero();
    Eigen::Vector4d d;
    for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
        const double xi = rule.nodes[a];
        const double x = xe + h * xi;
        for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
            const double yi = rule.nodes[b];
            const double y = xf + h * yi;
            const double w = rule.weights[a] * rule.weights[b] * std::pow(y - x, -1.0 - 2.0 * s);
            d << 1.0 - xi, xi, -(1.0 - yi), -yi;
            local.noalias() += w * d * d.transpose();
        }
    }
    local *= h * h;
}

// \int_{T_e} N_a N_b w(x) dx with w(x) = ((1+x)^{-2s} + (1-x)^{-2s}) / (2s),
// the closed-form exterior integral \int_{R \ (-1,1)} |x-y|^{-1-2s} dy.
// On the two boundary elements only the interior node's diagonal entry is
// needed and the singular part is integrated exactly.
Eigen::Matrix2d exterior_block(const Grid& grid, int e, double s, const quad::Rule& rule) {
    const double h = grid.h();
    const int n_x = grid.n_x();
    const double xe = grid.nodes()[static_cast<std::size_t>(e)];
    Eigen::Matrix2d local = Eigen::Matrix2d::Zero();
    const bool left_edge = (e == 0);
    const bool right_edge = (e == n_x - 1);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double xi = rule.nodes[q];
        const double x = xe + h * xi;
        double w = 0.0;
        if (!left_edge) w += std::pow(1.0 + x, -2.0 * s);
        if (!right_edge) w += std::pow(1.0 - x, -2.0 * s);
        const Eigen::Vector2d n(1.0 - xi, xi);
        local.noalias() += rule.weights[q] * h * w * n * n.transpose();
    }
    // N^2 = t^2 / h^2 against t^{-2s} on [0, h]
    const double exact = std::pow(h, 1.0 - 2.0 * s) / (3.0 - 2.0 * s);
    if (left_edge) local(1, 1) += exact;
    if (right_edge) local(0, 0) += exact;
    return local / (2.0 * s);
}

}  // namespace

Eigen::MatrixXd assemble_stiffness(const Grid& grid, double s, const AssemblyOptions& opts) {
    if (!(s >= kMinOrder && s <= kMaxOrder)) {
        throw RangeError("fractional order s must lie in [0.01, 0.99], got " + std::to_string(s));
    }
    const double cs = normalization_constant(s);
    const double h = grid.h();
    const int n_x = grid.n_x();
    const int n_nodes = n_x + 1;

    const Mat touching = touching_block(h, s, opts.near_order);
    {
        const Mat refined = touching_block(h, s, 2 * opts.near_order);
        const double err = (refined - touching).cwiseAbs().maxCoeff() / refined.cwiseAbs().maxCoeff();
        if (!(err <= opts.near_tolerance)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3e", err);
            throw QuadratureError(std::string("near-field quadrature did not converge: relative change ") +
                                  buf + " between orders " +
                                  std::to_string(opts.near_order) + " and " +
                                  std::to_string(2 * opts.near_order));
        }
    }
    // \int\int_{T x T} |x-y|^{1-2s}
    const double self_integral = 2.0 * std::pow(h, 3.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));

    Mat full = Mat::Zero(n_nodes, n_nodes);

    // Self and touching pairs. Each ordered pair (e, f), f != e, appears
    // twice in the double sum, which cancels the 1/2 in front of c_s.
    for (int e = 0; e < n_x; ++e) {
        Eigen::Matrix2d self;
        self << 1.0, -1.0, -1.0, 1.0;
        full.block<2, 2>(e, e) += 0.5 * cs * self_integral / (h * h) * self;
        if (e + 1 < n_x) full.block<3, 3>(e, e) += cs * touching;
    }

    const auto& far_rule = quad::gauss_legendre_unit(opts.far_order);
    const int n_threads = std::max(1, opts.threads);
    std::vector<Mat> partial(static_cast<std::size_t>(n_threads), Mat::Zero(n_nodes, n_nodes));
    auto worker = [&](int tid) {
        Mat& acc = partial[static_cast<std::size_t>(tid)];
        Eigen::Matrix4d local;
        for (int e = tid; e < n_x; e += n_threads) {
            for (int f = e + 2; f < n_x; ++f) {
                separated_block(grid, e, f, s, far_rule, local);
                const int ids[4] = {e, e + 1, f, f + 1};
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) acc(ids[a], ids[b]) += cs * local(a, b);
            }
        }
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
    }
    for (const auto& p : partial) full += p;

    const auto& ext_rule = quad::gauss_legendre_unit(opts.near_order);
    for (int e = 0; e < n_x; ++e) {
        full.block<2, 2>(e, e) += cs * exterior_block(grid, e, s, ext_rule);
    }

    Mat interior = full.block(1, 1, n_x - 1, n_x - 1);
    // exact symmetrization of round-off
    return 0.5 * (interior + interior.transpose());
}

Eigen::MatrixXd assemble_mass(const Grid& grid, bool lumped) {
    const int n = grid.dofs();
    const double h = grid.h();
    Mat m = Mat::Zero(n, n);
    if (lumped) {
        m.diagonal().setConstant(h);
        return m;
    }
    for (int i = 0; i < n; ++i) {
        m(i, i) = 2.0 * h / 3.0;
        if (i + 1 < n) {
            m(i, i + 1) = h / 6.0;
            m(i + 1, i) = h / 6.0;
        }
    }
    return m;
}

DiscreteOperator::DiscreteOperator(Grid grid, double s, const AssemblyOptions& opts)
    : grid_(std::move(grid)),
      s_(s),
      c_s_(0.0),
      stiffness_(assemble_stiffness(grid_, s, opts)),
      mass_(assemble_mass(grid_, false)),
      lumped_(assemble_mass(grid_, true).diagonal()),
      max_lumped_eig_(0.0) {
    c_s_ = normalization_constant(s);
    const Eigen::VectorXd inv_sqrt = lumped_.cwiseSqrt().cwiseInverse();
    const Mat scaled = inv_sqrt.asDiagonal() * stiffness_ * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> eig(scaled, Eigen::EigenvaluesOnly);
    max_lumped_eig_ = eig.eigenvalues().maxCoeff();
}

double DiscreteOperator::max_lumped_eigenvalue() const { return max_lumped_eig_; }

double DiscreteOperator::l2_norm(const Eigen::VectorXd& v) const {
    return std::sqrt(std::max(0.0, v.dot(mass_ * v)));
}

}  // namespace fracheat
