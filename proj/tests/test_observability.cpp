#include <doctest.h>

#include <cmath>

#include "fracheat/error.hpp"
#include "fracheat/observability.hpp"

using namespace fracheat;

namespace {

ExponentialSum make_sum(std::initializer_list<double> c, std::initializer_list<double> mu, double T) {
    ExponentialSum es;
    es.c = Eigen::Map<const Eigen::VectorXd>(c.begin(), static_cast<Eigen::Index>(c.size()));
    es.mu = Eigen::Map<const Eigen::VectorXd>(mu.begin(), static_cast<Eigen::Index>(mu.size()));
    es.T = T;
    return es;
}

}  // namespace

TEST_CASE("L1 norm of a single exponential") {
    const ExponentialSum es = make_sum({2.0}, {3.0}, 1.5);
    CHECK(l1_norm_exp_sum(es) == doctest::Approx(2.0 * (1.0 - std::exp(-4.5)) / 3.0).epsilon(1e-13));
}

TEST_CASE("L1 norm across a sign change") {
    // e^{-t} - 2 e^{-2t} changes sign at log 2
    const ExponentialSum es = make_sum({1.0, -2.0}, {1.0, 2.0}, 3.0);
    CHECK(l1_norm_exp_sum(es) == doctest::Approx(0.5 - std::exp(-3.0) + std::exp(-6.0)).epsilon(1e-12));
    CHECK(l1_norm_exp_sum(es, 64) == doctest::Approx(l1_norm_exp_sum(es, 1024)).epsilon(1e-12));
    CHECK_THROWS_AS(l1_norm_exp_sum(es, 32), SizingError);
}

TEST_CASE("observability ratio is scale invariant and exact for one mode") {
    const double mu = 2.3, T = 0.7;
    const ExponentialSum one = make_sum({1.0}, {mu}, T);
    CHECK(observability_ratio(one) == doctest::Approx(mu / (std::exp(mu * T) - 1.0)).epsilon(1e-12));
    const ExponentialSum a = make_sum({1.0, -0.4, 0.2}, {1.0, 4.0, 9.0}, T);
    ExponentialSum b = a;
    b.c *= -7.5;
    CHECK(observability_ratio(a) == doctest::Approx(observability_ratio(b)).epsilon(1e-12));
}

TEST_CASE("estimator dominates every single mode and grows with K") {
    const Eigen::VectorXd mu = law_exponents(0.8, 8, PhaseShift::plus);
    EstimatorOptions opts;
    opts.random_draws = 40;
    opts.ascent_sweeps = 4;
    const double T = 0.3;
    double prev = 0.0;
    for (int K = 1; K <= 8; ++K) {
        const ObservabilityEstimate est = estimate_observability_constant(mu, T, K, opts);
        CHECK(est.lower_bound_C >= prev);
        prev = est.lower_bound_C;
        for (int k = 0; k < K; ++k) CHECK(est.lower_bound_C >= mu[k] / (std::exp(mu[k] * T) - 1.0) * (1 - 1e-12));
        REQUIRE(est.witness_coeffs.size() == K);
        ExponentialSum w;
        w.c = est.witness_coeffs;
        w.mu = mu.head(K);
        w.T = T;
        CHECK(observability_ratio(w) == doctest::Approx(est.lower_bound_C).epsilon(1e-10));
        CHECK_FALSE(est.strategy_log.empty());
    }
}

TEST_CASE("estimator is deterministic for a fixed seed") {
    const Eigen::VectorXd mu = law_exponents(0.6, 6, PhaseShift::minus);
    EstimatorOptions opts;
    opts.random_draws = 30;
    const auto a = estimate_observability_constant(mu, 0.5, 6, opts);
    const auto b = estimate_observability_constant(mu, 0.5, 6, opts);
    CHECK(a.lower_bound_C == b.lower_bound_C);
    CHECK((a.witness_coeffs - b.witness_coeffs).norm() == 0.0);
}

TEST_CASE("estimator input validation") {
    Eigen::VectorXd bad(3);
    bad << 1.0, 0.5, 2.0;
    CHECK_THROWS_AS(estimate_observability_constant(bad, 1.0, 3), RangeError);
    CHECK_THROWS_AS(estimate_observability_constant(law_exponents(0.8, 3, PhaseShift::plus), 1.0, 4), SizingError);
}

TEST_CASE("blow-up curve is a running maximum toward small horizons") {
    const Eigen::VectorXd mu = law_exponents(0.8, 6, PhaseShift::plus);
    EstimatorOptions opts;
    opts.random_draws = 20;
    opts.ascent_sweeps = 2;
    const std::vector<double> Ts{0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
    const BlowupCurve c = blowup_curve(mu, Ts, 6, opts);
    REQUIRE(c.C_lower.size() == Ts.size());
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        CHECK(c.C_lower[i] >= c.raw[i]);
        if (i) CHECK(c.C_lower[i] <= c.C_lower[i - 1]);
    }
    CHECK(c.C_lower.front() > 10.0 * c.C_lower[4]);
    CHECK(c.slope_fit > 0.0);
}

TEST_CASE("exponent law and audit") {
    const Eigen::VectorXd mu = law_exponents(0.8, 5, PhaseShift::plus);
    for (int k = 1; k <= 5; ++k) CHECK(mu[k - 1] == doctest::Approx(eigenvalue_law(k, 0.8, PhaseShift::plus)));
    const SequenceAudit a = audit_exponents(mu);
    CHECK(a.increasing);
    CHECK(a.min_gap == doctest::Approx(mu[1] - mu[0]));
    CHECK(a.reciprocal_sum == doctest::Approx(mu.cwiseInverse().sum()));
}

TEST_CASE("adjoint observability ratio of a single eigenmode") {
    const DiscreteOperator op(Grid(30), 0.8);
    const SpectralBasis b = eigendecompose(op, 4);
    const Interval omega{-0.3, 0.8};
    const double T = 0.6;
    for (int k = 0; k < 4; ++k) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(4);
        a[k] = 1.0;
        const double l = b.eigenvalues[k];
        const double denom = (1.0 - std::exp(-l * T)) / l * l1_norm_on(op.grid(), b.eigenvectors.col(k), omega);
        CHECK(adjoint_observability_ratio(b, omega, T, a, 2000) ==
              doctest::Approx(std::exp(-2.0 * l * T) / (denom * denom)).epsilon(1e-3));
    }
    CHECK_THROWS_AS(adjoint_observability_ratio(b, omega, T, Eigen::VectorXd::Zero(4), 100), SolverError);
}
