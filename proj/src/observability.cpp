#include "fracheat/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "fracheat/error.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat {

double ExponentialSum::operator()(double t) const {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k) sum += c[k] * std::exp(-mu[k] * t);
    return sum;
}

namespace {

double gauss_abs(const ExponentialSum& es, double a, double b) {
    const auto& rule = quad::gauss_legendre_unit(10);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) sum += rule.weights[q] * std::abs(es(a + (b - a) * rule.nodes[q]));
    return (b - a) * sum;
}

double find_root(const ExponentialSum& es, double a, double b) {
    boost::uintmax_t max_iter = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    const auto r = boost::math::tools::toms748_solve([&](double t) { return es(t); }, a, b, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

void check_exponents(const Eigen::VectorXd& mu) {
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
        if (!(mu[k] > 0.0)) throw RangeError("exponents must be positive");
        if (k > 0 && !(mu[k] > mu[k - 1])) throw RangeError("exponents must be strictly increasing");
    }
}

}  // namespace

double l1_norm_exp_sum(const ExponentialSum& es, int n_quad) {
    if (n_quad < 64) throw SizingError("l1_norm_exp_sum needs n_quad >= 64, got " + std::to_string(n_quad));
    if (es.c.size() != es.mu.size() || es.c.size() == 0) throw SizingError("coefficient and exponent counts differ");
    if (!(es.T > 0.0)) throw RangeError("horizon T must be positive");

    const double dt = es.T / n_quad;
    const int K = static_cast<int>(es.c.size());
    int sign_changes = 0;
    double total = 0.0;
    double a = 0.0;
    double fa = es(0.0);
    for (int j = 1; j <= n_quad; ++j) {
        const double b = j == n_quad ? es.T : j * dt;
        const double fb = es(b);
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
            if (++sign_changes > K - 1) {
                throw SolverError("found " + std::to_string(sign_changes) + " sign changes of an exponential sum with " +
                                  std::to_string(K) + " terms");
            }
            const double r = find_root(es, a, b);
            total += gauss_abs(es, a, r) + gauss_abs(es, r, b);
        } else {
            total += gauss_abs(es, a, b);
        }
        a = b;
        fa = fb;
    }
    return total;
}

double observability_ratio(const ExponentialSum& es, int n_quad) {
    double num = 0.0;
    for (Eigen::Index k = 0; k < es.c.size(); ++k) num += std::abs(es.c[k]) * std::exp(-es.mu[k] * es.T);
    const double den = l1_norm_exp_sum(es, n_quad);
    if (!(den > 0.0)) return 0.0;
    return num / den;
}

namespace {

struct Search {
    const Eigen::VectorXd& mu;
    double T;
    int n_quad;
    double best = 0.0;
    Eigen::VectorXd witness;

    double ratio(const Eigen::VectorXd& c) const {
        if (c.cwiseAbs().maxCoeff() == 0.0) return 0.0;
        ExponentialSum es{c, mu.head(c.size()), T};
        try {
            return observability_ratio(es, n_quad);
        } catch (const SolverError&) {
            return 0.0;  // round-off dominated candidate, skip it
        }
    }

    // Strict improvement only, so the first witness wins ties.
    bool offer(const Eigen::VectorXd& c) {
        const double r = ratio(c);
        if (r > best) {
            best = r;
            witness = c;
            return true;
        }
        return false;
    }
};

}  // namespace

ObservabilityEstimate estimate_observability_constant(const Eigen::VectorXd& mu, double T, int K,
                                                      const EstimatorOptions& opts) {
    if (K < 1 || K > mu.size()) {
        throw SizingError("K must be in [1, " + std::to_string(mu.size()) + "], got " + std::to_string(K));
    }
    if (!(T > 0.0)) throw RangeError("horizon T must be positive");
    const Eigen::VectorXd exps = mu.head(K);
    check_exponents(exps);

    ObservabilityEstimate est;
    est.T = T;
    Search search{exps, T, opts.n_quad, 0.0, Eigen::VectorXd::Zero(K)};
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    for (int m = 1; m <= K; ++m) {
        // previous best, padded
        if (m > 1) {
            Eigen::VectorXd padded = Eigen::VectorXd::Zero(m);
            padded.head(m - 1) = search.witness.head(m - 1);
            search.witness = padded;
        } else {
            search.witness = Eigen::VectorXd::Zero(1);
        }

        Eigen::VectorXd single = Eigen::VectorXd::Zero(m);
        single[m - 1] = 1.0;
        search.offer(single);

        for (double r : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
            Eigen::VectorXd geo(m);
            for (int k = 0; k < m; ++k) geo[k] = std::pow(-r, k);
            search.offer(geo);
        }

        for (int d = 0; d < opts.random_draws; ++d) {
            Eigen::VectorXd c(m);
            for (int k = 0; k < m; ++k) c[k] = normal(rng);
            const double l1 = l1_norm_exp_sum(ExponentialSum{c, exps.head(m), T}, opts.n_quad);
            if (l1 > 0.0) c /= l1;
            search.offer(c);
        }

        // coordinate ascent on the current best
        Eigen::VectorXd c = search.witness.head(m);
        double step = 0.5 * std::max(c.cwiseAbs().maxCoeff(), 1e-12);
        for (int sweep = 0; sweep < opts.ascent_sweeps; ++sweep) {
            bool moved = false;
            for (int k = 0; k < m; ++k) {
                for (double sign : {1.0, -1.0}) {
                    Eigen::VectorXd trial = c;
                    trial[k] += sign * step;
                    if (search.offer(trial)) {
                        c = trial;
                        moved = true;
                    }
                }
            }
            if (!moved) step *= 0.5;
        }
    }
    est.strategy_log = {"single_modes", "alternating_geometric", "random_draws:" + std::to_string(opts.random_draws),
                        "coordinate_ascent:" + std::to_string(opts.ascent_sweeps)};
    est.witness_coeffs = search.witness;
    est.lower_bound_C = search.best;
    return est;
}

BlowupCurve blowup_curve(const Eigen::VectorXd& mu, const std::vector<double>& T_list, int K,
                         const EstimatorOptions& opts) {
    BlowupCurve curve;
    curve.T = T_list;
    for (double T : T_list) {
        if (!(T > 0.0)) throw RangeError("blow-up curve horizons must be positive");
        curve.raw.push_back(estimate_observability_constant(mu, T, K, opts).lower_bound_C);
    }
    const std::size_t n = T_list.size();
    curve.C_lower.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double env = curve.raw[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (T_list[j] >= T_list[i]) env = std::max(env, curve.raw[j]);
        }
        curve.C_lower[i] = env;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return T_list[a] < T_list[b]; });
    const std::size_t m = std::min<std::size_t>(3, n);
    if (m >= 2) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t q = 0; q < m; ++q) {
            const double x = 1.0 / T_list[order[q]];
            const double y = std::log(curve.C_lower[order[q]]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double denom = m * sxx - sx * sx;
        curve.slope_fit = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    }
    return curve;
}

Eigen::VectorXd law_exponents(double s, int K, PhaseShift shift) {
    Eigen::VectorXd mu(K);
    for (int k = 0; k < K; ++k) mu[k] = eigenvalue_law(k + 1, s, shift);
    return mu;
}

SequenceAudit audit_exponents(const Eigen::VectorXd& mu) {
    SequenceAudit audit;
    audit.increasing = true;
    audit.min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
        audit.reciprocal_sum += 1.0 / mu[k];
        if (k > 0) {
            audit.min_gap = std::min(audit.min_gap, mu[k] - mu[k - 1]);
            audit.increasing = audit.increasing && mu[k] > mu[k - 1];
        }
    }
    return audit;
}

double adjoint_observability_ratio(const SpectralBasis& basis, const Interval& omega, double T,
                                   const Eigen::VectorXd& a, int n_t) {
    if (a.size() != basis.eigenvalues.size()) throw SizingError("coefficient vector does not match the basis");
    if (n_t < 1) throw SizingError("n_t must be >= 1");
    if (!(T > 0.0)) throw RangeError("horizon T must be positive");

    double num = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) num += a[k] * a[k] * std::exp(-2.0 * basis.eigenvalues[k] * T);

    const double dt = T / n_t;
    double den = 0.0;
    for (int j = 0; j <= n_t; ++j) {
        const double t = j * dt;
        const Eigen::VectorXd weights = a.cwiseProduct((-basis.eigenvalues * t).array().exp().matrix());
        const double w = (j == 0 || j == n_t) ? 0.5 * dt : dt;
        den += w * l1_norm_on(basis.grid, basis.eigenvectors * weights, omega);
    }
    if (!(den > 0.0)) throw SolverError("adjoint observation vanishes on omega x (0, T)");
    return num / (den * den);
}

}  // namespace fracheat
