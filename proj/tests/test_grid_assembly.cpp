#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "fracheat/assembly.hpp"
#include "fracheat/error.hpp"
#include "fracheat/grid.hpp"

using namespace fracheat;

namespace {

// Hat functions on a uniform grid of R give a Toeplitz stiffness; the
// entries follow from the Fourier symbol in closed form (any s != 1/2).
double toeplitz_entry(int k, double s, double h) {
    const double p = 3.0 - 2.0 * s;
    auto w = [p](int m) { return std::pow(std::abs(static_cast<double>(m)), p); };
    const double C = 1.0 / (2.0 * std::tgamma(4.0 - 2.0 * s) * std::cos(std::numbers::pi * s));
    return C * std::pow(h, 1.0 - 2.0 * s) * (6.0 * w(k) - 4.0 * w(k - 1) - 4.0 * w(k + 1) + w(k - 2) + w(k + 2));
}

}  // namespace

TEST_CASE("grid nodes, dofs and control support") {
    const Grid g(10);
    CHECK(g.dofs() == 9);
    CHECK(g.h() == doctest::Approx(0.2));
    CHECK(g.nodes().front() == -1.0);
    CHECK(g.nodes().back() == doctest::Approx(1.0));
    CHECK(g.x(0) == doctest::Approx(-0.8));

    const auto inside = g.dofs_in({-0.3, 0.8});
    // interior nodes -0.2 .. 0.6 lie strictly inside; 0.8 is excluded
    REQUIRE(inside.size() == 5);
    CHECK(g.x(inside.front()) == doctest::Approx(-0.2));
    CHECK(g.x(inside.back()) == doctest::Approx(0.6));

    CHECK_THROWS_AS(build_grid(1), SizingError);
    CHECK_THROWS_AS(require_inside_domain({-1.2, 0.5}, "omega"), RangeError);
    CHECK_THROWS_AS(require_inside_domain({0.5, 0.2}, "omega"), RangeError);
    CHECK_NOTHROW(require_inside_domain({-0.3, 0.8}, "omega"));
}

TEST_CASE("normalization constant against high-precision values") {
    CHECK(normalization_constant(0.25) == doctest::Approx(0.199471140200716339).epsilon(1e-13));
    CHECK(normalization_constant(0.5) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-13));
    CHECK(normalization_constant(0.8) == doctest::Approx(0.267479690930975041).epsilon(1e-13));
    CHECK(normalization_constant(0.99) == doctest::Approx(0.0196325966875817824).epsilon(1e-12));
    CHECK_THROWS_AS(normalization_constant(0.0), RangeError);
    CHECK_THROWS_AS(normalization_constant(1.0), RangeError);
}

TEST_CASE("stiffness matches the closed-form Toeplitz entries") {
    for (double s : {0.2, 0.35, 0.65, 0.8, 0.95}) {
        for (int n_x : {8, 20}) {
            const Grid g(n_x);
            const Eigen::MatrixXd A = assemble_stiffness(g, s);
            for (int i = 0; i < g.dofs(); ++i) {
                for (int j = 0; j < g.dofs(); ++j) {
                    const double ref = toeplitz_entry(std::abs(i - j), s, g.h());
                    INFO("s = " << s << " n_x = " << n_x << " (" << i << "," << j << ")");
                    CHECK(A(i, j) == doctest::Approx(ref).epsilon(1e-7).scale(std::abs(toeplitz_entry(0, s, g.h()))));
                }
            }
        }
    }
}

TEST_CASE("stiffness at s = 1/2 is symmetric Toeplitz and positive definite") {
    const Grid g(16);
    const Eigen::MatrixXd A = assemble_stiffness(g, 0.5);
    CHECK((A - A.transpose()).norm() < 1e-14 * A.norm());
    for (int d = 0; d < g.dofs(); ++d) {
        for (int i = 0; i + d < g.dofs(); ++i) CHECK(A(i, i + d) == doctest::Approx(A(0, d)).epsilon(1e-7));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    // off-diagonal entries are negative: M-matrix structure
    for (int d = 1; d < g.dofs(); ++d) CHECK(A(0, d) < 0.0);
}

TEST_CASE("row sums are positive (exterior condition)") {
    for (double s : {0.3, 0.8}) {
        const Eigen::MatrixXd A = assemble_stiffness(Grid(20), s);
        CHECK(A.rowwise().sum().minCoeff() > 0.0);
    }
}

TEST_CASE("threaded assembly agrees to round-off") {
    AssemblyOptions one, four;
    four.threads = 4;
    const Grid g(30);
    const Eigen::MatrixXd a = assemble_stiffness(g, 0.7, one);
    const Eigen::MatrixXd b = assemble_stiffness(g, 0.7, four);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-14 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("mass matrices") {
    const Grid g(10);
    const Eigen::MatrixXd Mc = assemble_mass(g, false);
    const Eigen::MatrixXd Ml = assemble_mass(g, true);
    CHECK(Mc(3, 3) == doctest::Approx(2.0 * g.h() / 3.0));
    CHECK(Mc(3, 4) == doctest::Approx(g.h() / 6.0));
    CHECK(Mc(3, 5) == 0.0);
    CHECK(Ml(4, 4) == doctest::Approx(g.h()));
    CHECK(Ml(4, 5) == 0.0);
    // integral of the constant 1 over (-1 + h, 1 - h) hats: both masses agree on interior rows
    CHECK(Mc.row(4).sum() == doctest::Approx(Ml.row(4).sum()));
}

TEST_CASE("discrete operator bundle") {
    const DiscreteOperator op(Grid(12), 0.6);
    CHECK(op.dofs() == 11);
    CHECK(op.c_s() == doctest::Approx(normalization_constant(0.6)));
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(op.dofs());
    CHECK(op.l2_norm(one) == doctest::Approx(std::sqrt(one.dot(op.mass() * one))));
    // largest generalized eigenvalue with the lumped mass
    const Eigen::VectorXd m = op.lumped_mass().cwiseSqrt().cwiseInverse();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.asDiagonal() * op.stiffness() * m.asDiagonal());
    CHECK(op.max_lumped_eigenvalue() == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
    CHECK_THROWS_AS(DiscreteOperator(Grid(12), 0.005), RangeError);
    CHECK_THROWS_AS(DiscreteOperator(Grid(12), 0.995), RangeError);
}
