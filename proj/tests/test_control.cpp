#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include <Eigen/QR>

#include "fracheat/control.hpp"
#include "fracheat/error.hpp"
#include "fracheat/nnls.hpp"

using namespace fracheat;

namespace {

ControlProblem make_problem(int n_x, double s, double z0_amp, double zhat_amp, double uhat) {
    ControlProblem p;
    p.op = std::make_shared<const DiscreteOperator>(Grid(n_x), s);
    auto cosine = [&](double a) { return p.op->grid().interpolate([a](double x) { return a * std::cos(std::numbers::pi * x / 2); }); };
    p.z0 = cosine(z0_amp);
    p.zhat0 = cosine(zhat_amp);
    p.uhat = uhat;
    p.omega = {-0.3, 0.8};
    p.nu = uhat;
    return p;
}

ControlProblem case1(int n_x = 20) { return make_problem(n_x, 0.8, 2.0, 0.05, 0.2); }
ControlProblem case2(int n_x = 20) { return make_problem(n_x, 0.8, 0.5, 6.0, 1.0); }

Eigen::MatrixXd random_like(const Eigen::MatrixXd& shape, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd m(shape.rows(), shape.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    return m;
}

}  // namespace

TEST_CASE("projection is idempotent") {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd u = random_like(Eigen::MatrixXd(7, 9), rng);
    const Eigen::MatrixXd once = project_nonnegative(u);
    CHECK(once.minCoeff() >= 0.0);
    CHECK((project_nonnegative(once) - once).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < u.size(); ++i) CHECK(once.data()[i] == std::max(u.data()[i], 0.0));
}

TEST_CASE("problem validation") {
    ControlProblem p = case1(12);
    CHECK_NOTHROW(p.validate());
    p.omega = {-1.1, 0.5};
    CHECK_THROWS_AS(p.validate(), RangeError);
    p = case1(12);
    p.omega = {0.01, 0.02};  // no DOF inside
    CHECK_THROWS(p.validate());
    p = case1(12);
    p.z0 = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(p.validate(), SizingError);
}

TEST_CASE("primal adjoint gradient matches central differences") {
    std::mt19937_64 rng(2);
    const ControlProblem p = case1(12);
    const PrimalObjective f(p, 0.5, 30);
    const Eigen::MatrixXd u = random_like(f.layout().values, rng);
    for (double rho : {0.0, 10.0}) {
        Eigen::MatrixXd g;
        f.evaluate(u, rho, &g);
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::MatrixXd d = random_like(u, rng);
            const double h = 1e-6;
            const double fd = (f.evaluate(u + h * d, rho) - f.evaluate(u - h * d, rho)) / (2 * h);
            const double ad = (g.array() * d.array()).sum();
            CHECK(std::abs(ad - fd) <= 1e-5 * std::max(std::abs(ad), std::abs(fd)));
        }
    }
}

TEST_CASE("dual gradient matches central differences") {
    std::mt19937_64 rng(3);
    const ControlProblem p = case1(12);
    const DualObjective J(p, 0.5, 30, 1e-2);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXd pT(p.op->dofs());
    for (Eigen::Index i = 0; i < pT.size(); ++i) pT[i] = n(rng);
    Eigen::VectorXd g;
    J.evaluate(pT, &g);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd d(pT.size());
        for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = n(rng);
        const double h = 1e-6;
        const double fd = (J.evaluate(pT + h * d) - J.evaluate(pT - h * d)) / (2 * h);
        const double ad = g.dot(d);
        CHECK(std::abs(ad - fd) <= 1e-5 * std::max(std::abs(ad), std::abs(fd)));
    }
}

TEST_CASE("reachability matrix reproduces the forward solve") {
    std::mt19937_64 rng(4);
    const ControlProblem p = case2(10);
    const PrimalObjective f(p, 0.3, 12);
    const Eigen::MatrixXd u = random_like(f.layout().values, rng);
    const Eigen::MatrixXd R = f.reachability_matrix();
    const Eigen::VectorXd via_matrix = f.free_final() + R * Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
    CHECK((f.trajectory(u).final_state() - via_matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("nonnegative least squares against exhaustive enumeration") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd A(8, 5);
        Eigen::VectorXd b(8);
        for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = n(rng);
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = n(rng);
        double best = INFINITY;
        for (int mask = 0; mask < 32; ++mask) {
            std::vector<int> cols;
            for (int j = 0; j < 5; ++j) if (mask >> j & 1) cols.push_back(j);
            Eigen::VectorXd x = Eigen::VectorXd::Zero(5);
            if (!cols.empty()) {
                Eigen::MatrixXd As(8, static_cast<Eigen::Index>(cols.size()));
                for (std::size_t c = 0; c < cols.size(); ++c) As.col(static_cast<Eigen::Index>(c)) = A.col(cols[c]);
                const Eigen::VectorXd xs = As.colPivHouseholderQr().solve(b);
                if (xs.minCoeff() < 0.0) continue;
                for (std::size_t c = 0; c < cols.size(); ++c) x[cols[c]] = xs[static_cast<Eigen::Index>(c)];
            }
            best = std::min(best, (A * x - b).norm());
        }
        const NnlsResult r = nnls(A, b);
        CHECK(r.converged);
        CHECK(r.x.minCoeff() >= 0.0);
        CHECK(r.residual == doctest::Approx(best).epsilon(1e-10));
        CHECK(r.residual == doctest::Approx((A * r.x - b).norm()).epsilon(1e-12));
    }
}

TEST_CASE("unconstrained control scales with the data") {
    const ControlProblem p = case2(12);
    ControlProblem q = p;
    q.z0 *= 2.0;
    q.zhat0 *= 2.0;
    q.uhat *= 2.0;
    const UnconstrainedOutcome a = solve_unconstrained_Linf(p, 0.4, 40, 1e-3);
    const UnconstrainedOutcome b = solve_unconstrained_Linf(q, 0.4, 40, 1e-3);
    CHECK(b.u_inf == doctest::Approx(2.0 * a.u_inf).epsilon(0.01));
    CHECK((b.control.values - 2.0 * a.control.values).norm() <= 0.01 * 2.0 * a.control.values.norm());
}

TEST_CASE("unconstrained dual solve reaches the target with a bang-bang control") {
    const ControlProblem p = case1(16);
    const UnconstrainedOutcome r = solve_unconstrained_Linf(p, 0.9, 60, 1e-4);
    CHECK(r.final_residual <= r.eps_target);
    CHECK(std::abs(r.u_inf - r.p_l1) <= 0.05 * r.u_inf);
    // most of the mass sits at +-||u||_inf
    const Eigen::ArrayXXd mag = r.control.values.array().abs();
    CHECK((mag > 0.9 * r.u_inf).cast<double>().mean() > 0.5);
}

TEST_CASE("constrained solver: short and long horizons of the second case") {
    const ControlProblem p = case2();
    const FixedTimeOutcome bad = solve_constrained_fixed_time(p, 0.15, 100);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.final_residual > 10.0 * bad.eps_target);
    const FixedTimeOutcome good = solve_constrained_fixed_time(p, 0.4, 100);
    CHECK(good.feasible);
    CHECK(good.final_residual <= good.eps_target);
    CHECK(good.min_control >= -1e-8);
    CHECK(good.min_state >= -1e-8);
    CHECK(good.control.values.minCoeff() >= 0.0);
}

TEST_CASE("impulse analysis on a synthetic spike") {
    const Grid g(10);
    ControlField u = ControlField::zero(g, {-0.3, 0.8}, 20);
    u.values(2, 7) = 4.0;
    u.values(0, 1) = 0.01;  // below threshold 0.01 * max
    const AtomicityReport rep = impulse_analysis(u, 0.05, g.h(), 0.01);
    CHECK(rep.total_mass == doctest::Approx((4.0 + 0.01) * 0.05 * g.h()));
    CHECK(rep.active_cell_fraction == doctest::Approx(1.0 / static_cast<double>(u.values.size())));
    REQUIRE(rep.top_impulses.size() >= 1);
    CHECK(rep.top_impulses.front().x == doctest::Approx(u.x[2]));
    CHECK(rep.top_impulses.front().t == doctest::Approx(7 * 0.05));
    CHECK(rep.top_impulses.front().mass == doctest::Approx(4.0 * 0.05 * g.h()));
    u.values(1, 1) = -1.0;
    CHECK_THROWS_AS(impulse_analysis(u, 0.05, g.h(), 0.01), RangeError);
    CHECK_THROWS_AS(impulse_analysis(ControlField::zero(g, {-0.3, 0.8}, 2), 0.05, g.h(), 1.5), RangeError);
}

TEST_CASE("minimal time search rejects a bracket that does not straddle") {
    const ControlProblem p = case2();
    CHECK_THROWS_AS(minimal_time_search(p, {0.05, 0.1}, 1e-2, 100), BracketError);
    CHECK_THROWS_AS(minimal_time_search(p, {0.5, 0.4}, 1e-2, 100), RangeError);
}

TEST_CASE("minimal time search brackets the feasibility boundary") {
    const ControlProblem p = case2(12);
    const MinimalTimeReport r = minimal_time_search(p, {0.05, 1.0}, 5e-3, 40);
    CHECK(r.T_hi - r.T_lo <= 5e-3);
    CHECK(r.best.feasible);
    bool saw_lo = false, saw_hi = false;
    for (const ProbeRecord& h : r.history) {
        if (h.T == r.T_lo) saw_lo = !h.feasible;
        if (h.T == r.T_hi) saw_hi = h.feasible;
        // feasibility is monotone in the probed horizons
        for (const ProbeRecord& k : r.history) if (h.feasible && k.T > h.T) CHECK(k.feasible);
    }
    CHECK(saw_hi);
    CHECK((saw_lo || r.T_lo == 0.05));
    CHECK(r.T_min_estimate >= r.T_lo);
    CHECK(r.T_min_estimate <= r.T_hi);
}

TEST_CASE("sufficient time bound trivial cases") {
    ControlProblem p = case1(12);
    auto C = [](double T) { return 1.0 / T; };
    p.nu = 1e9;
    CHECK(sufficient_time_bound(p, 1.7, C, {0.05, 20.0, 60}) == doctest::Approx(0.05));
    p.nu = 0.2;
    p.zhat0 = p.z0;
    CHECK(sufficient_time_bound(p, 1.7, C, {0.05, 20.0, 60}) == doctest::Approx(0.05));
    p.nu = 0.0;
    CHECK_THROWS_AS(sufficient_time_bound(p, 1.7, C, {}), RangeError);
    p = case1(12);
    p.nu = 1e-12;
    CHECK_THROWS_AS(sufficient_time_bound(p, 1.7, [](double) { return 1e6; }, {0.05, 1.0, 10}), SolverError);
}
