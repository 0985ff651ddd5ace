#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracheat/grid.hpp"
#include "fracheat/spectral.hpp"

namespace fracheat {

// F(t) = sum_k c_k exp(-mu_k t) on (0, T).
struct ExponentialSum {
    Eigen::VectorXd c;
    Eigen::VectorXd mu;
    double T = 1.0;

    double operator()(double t) const;
};

// \int_0^T |F| dt. F is sampled on n_quad uniform cells; sign changes are
// bracketed and refined by root finding, and every smooth piece gets a
// 10-point Gauss rule. Throws SizingError for n_quad < 64 and SolverError if
// more than K - 1 sign changes show up (impossible for a Chebyshev system,
// so it signals round-off trouble).
double l1_norm_exp_sum(const ExponentialSum& es, int n_quad = 256);

// (sum |c_k| e^{-mu_k T}) / ||F||_{L1(0,T)}
double observability_ratio(const ExponentialSum& es, int n_quad = 256);

struct ObservabilityEstimate {
    double T = 0.0;
    double lower_bound_C = 0.0;
    Eigen::VectorXd witness_coeffs;
    std::vector<std::string> strategy_log;
};

struct EstimatorOptions {
    int random_draws = 200;
    int ascent_sweeps = 12;
    int n_quad = 256;
    std::uint64_t seed = 42;
};

// Best lower bound for the L1 observability constant over single modes,
// alternating geometric profiles, seeded random draws and coordinate ascent.
// Every witness tried for K - 1 modes is also tried for K, so the bound is
// nondecreasing in K. Throws SizingError if K exceeds mu.size() and
// RangeError unless mu is positive and strictly increasing.
ObservabilityEstimate estimate_observability_constant(const Eigen::VectorXd& mu, double T, int K,
                                                      const EstimatorOptions& opts = {});

struct BlowupCurve {
    std::vector<double> T;        // as supplied
    std::vector<double> raw;      // per-horizon estimates
    std::vector<double> C_lower;  // running maximum toward small T
    double slope_fit = 0.0;       // least-squares slope of log C_lower against 1/T, three smallest T
};

BlowupCurve blowup_curve(const Eigen::VectorXd& mu, const std::vector<double>& T_list, int K,
                         const EstimatorOptions& opts = {});

// mu_k sequence from the eigenvalue law, k = 1..K.
Eigen::VectorXd law_exponents(double s, int K, PhaseShift shift);

struct SequenceAudit {
    double min_gap = 0.0;
    double reciprocal_sum = 0.0;
    bool increasing = false;
};
SequenceAudit audit_exponents(const Eigen::VectorXd& mu);

// (sum a_k^2 e^{-2 lambda_k T}) / (\int_0^T \int_omega |sum a_k phi_k e^{-lambda_k t}|)^2
// with the time trapezoid on n_t cells and the nodal trapezoid on omega.
double adjoint_observability_ratio(const SpectralBasis& basis, const Interval& omega, double T,
                                   const Eigen::VectorXd& a, int n_t);

}  // namespace fracheat
