#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracheat/assembly.hpp"
#include "fracheat/error.hpp"
#include "fracheat/spectral.hpp"

using namespace fracheat;

// Reference values below come from an independent mpmath evaluation of the
// double integral (adaptive tanh-sinh, 30 digits).

TEST_CASE("cutoff profile") {
    CHECK(q_profile(-0.5) == 0.0);
    CHECK(q_profile(0.5) == 1.0);
    CHECK(q_profile(0.0) == doctest::Approx(0.5));
    for (double x : {0.05, 0.1, 0.2, 0.3, 1.0 / 3.0}) CHECK(q_profile(x) + q_profile(-x) == doctest::Approx(1.0));
    // C^1 at the junctions
    const double e = 1e-7;
    for (double x0 : {-1.0 / 3.0, 0.0, 1.0 / 3.0}) {
        const double left = (q_profile(x0) - q_profile(x0 - e)) / e;
        const double right = (q_profile(x0 + e) - q_profile(x0)) / e;
        CHECK(left == doctest::Approx(right).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("gamma density at s = 0.8") {
    CHECK(gamma_density(1e-3, 0.8) == doctest::Approx(2.6511e-6).epsilon(1e-3));
    CHECK(gamma_density(1.0, 0.8) == doctest::Approx(0.0392115).epsilon(1e-5));
    CHECK(gamma_density(1e3, 0.8) == doctest::Approx(6.65927e-7).epsilon(1e-5));
    CHECK_THROWS_AS(gamma_density(0.0, 0.8), RangeError);
    CHECK_THROWS_AS(gamma_density(1.0, 1.0), RangeError);
}

TEST_CASE("gamma density is finite and positive across the removable point") {
    for (double y : {0.3, 0.999999, 1.0, 1.000001, 2.0, 17.0}) {
        const double g = gamma_density(y, 0.65);
        CHECK(std::isfinite(g));
        CHECK(g > 0.0);
    }
    CHECK(gamma_density(1.0 - 1e-7, 0.65) == doctest::Approx(gamma_density(1.0 + 1e-7, 0.65)).epsilon(1e-5));
}

TEST_CASE("Laplace transform G at s = 0.8") {
    CHECK(G_transform(0.5, 0.8) == doctest::Approx(0.04527541994).epsilon(1e-8));
    CHECK(G_transform(1.0, 0.8) == doctest::Approx(0.02430775815).epsilon(1e-8));
    CHECK(G_transform(5.0, 0.8) == doctest::Approx(0.002087962246).epsilon(1e-8));
    CHECK(G_transform(10.0, 0.8) == doctest::Approx(4.689351955e-4).epsilon(1e-8));
    CHECK(G_transform(20.0, 0.8) == doctest::Approx(8.931344449e-5).epsilon(1e-7));
    CHECK(G_transform(50.0, 0.8) == doctest::Approx(8.852356873e-6).epsilon(1e-7));
}

TEST_CASE("Laplace transform G at s = 1/2 decays like xi^-2") {
    CHECK(G_transform(5.0, 0.5) * 25.0 == doctest::Approx(0.15173).epsilon(1e-4));
    CHECK(G_transform(10.0, 0.5) * 100.0 == doctest::Approx(0.18289).epsilon(1e-4));
    CHECK(G_transform(50.0, 0.5) * 2500.0 == doctest::Approx(0.21341).epsilon(1e-4));
}

TEST_CASE("G is positive and decreasing") {
    double prev = INFINITY;
    for (double xi = 0.1; xi < 60.0; xi *= 1.7) {
        const double g = G_transform(xi, 0.3);
        CHECK(g > 0.0);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("half-line profile vanishes at the boundary") {
    for (double s : {0.3, 0.5, 0.8}) {
        // F(z) ~ c z^s at the boundary
        CHECK(half_line_profile(1e-6, s) / half_line_profile(1e-8, s) == doctest::Approx(std::pow(100.0, s)).epsilon(0.02));
        CHECK(std::abs(half_line_profile(1e-8, s)) < 5e-3);
        CHECK(half_line_profile(-0.5, s) == 0.0);
        // far from the boundary the correction is negligible
        const double z = 40.0;
        CHECK(half_line_profile(z, s) == doctest::Approx(std::sin(z + (1 - s) * std::numbers::pi / 4)).epsilon(1e-3).scale(1.0));
    }
}

TEST_CASE("half-line frequencies") {
    CHECK(half_line_frequency(1, 0.8) == doctest::Approx(std::numbers::pi / 2 - 0.05 * std::numbers::pi));
    CHECK(half_line_frequency(4, 0.5) == doctest::Approx(2 * std::numbers::pi - std::numbers::pi / 8));
}

TEST_CASE("quasi-eigenfunctions: parity, boundary values, interior residual") {
    const DiscreteOperator op(Grid(100), 0.8);
    for (int k : {1, 2}) {
        const QuasiEigenfunction q = quasi_eigenfunction(k, op);
        const auto n = q.values.size();
        CHECK(q.values[0] == 0.0);
        CHECK(q.values[n - 1] == 0.0);
        const double parity = k % 2 ? 1.0 : -1.0;
        for (Eigen::Index i = 0; i < n; ++i) CHECK(q.values[i] == doctest::Approx(parity * q.values[n - 1 - i]).scale(1.0));
        CHECK(q.bulk_residual_norm <= q.residual_norm);
        CHECK(q.mu_k == doctest::Approx(half_line_frequency(k, 0.8)));
    }
    CHECK_THROWS_AS(quasi_eigenfunction(13, op), SizingError);
}

TEST_CASE("quasi-eigenfunction bulk residual shrinks under refinement at k = 4") {
    double prev = INFINITY;
    for (int n_x : {100, 200, 400}) {
        const QuasiEigenfunction q = quasi_eigenfunction(4, DiscreteOperator(Grid(n_x), 0.8));
        CHECK(q.bulk_residual_norm < prev);
        prev = q.bulk_residual_norm;
    }
}
