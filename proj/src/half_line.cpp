#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracheat/error.hpp"
#include "fracheat/spectral.hpp"

namespace fracheat {

namespace {

constexpr double kPi = std::numbers::pi;

void require_order(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw RangeError("fractional order s must lie in (0, 1), got " + std::to_string(s));
    }
}

boost::math::quadrature::tanh_sinh<double>& integrator() {
    thread_local boost::math::quadrature::tanh_sinh<double> instance(12);
    return instance;
}

// The two-argument overload skips boost's endpoint assertions; abscissae that
// round onto an endpoint are harmless for these integrable singularities.
template <typename F>
double integrate(F&& f, double a, double b, double* err, double* l1) {
    auto g = [&](double x, double) { return f(x); };
    return integrator().integrate(g, a, b, 1e-12, err, l1);
}

// log(expm1(a)) for a > 0 without overflow.
double log_expm1(double a) { return a > 30.0 ? a + std::log1p(-std::exp(-a)) : std::log(std::expm1(a)); }

// log((1 - t^{2s}) / (1 - t^2)) with t = exp(tau). Numerator and denominator
// share their sign, and the t = 1 singularity is removable (limit log s).
double log_ratio(double tau, double s) {
    if (tau == 0.0) return std::log(s);
    if (tau > 0.0) return log_expm1(2.0 * s * tau) - log_expm1(2.0 * tau);
    return std::log(std::expm1(2.0 * s * tau) / std::expm1(2.0 * tau));
}

// (1/pi) \int_0^infty (1+r^2)^{-1} log(...) dr. With r = exp(v - log y) the
// weight becomes 1/(2 cosh(v - log y)); the pieces are split at the
// removable point v = 0 and at the weight peak v = log y.
double inner_exponent(double y, double s) {
    const double shift = std::log(y);
    auto f = [&](double v) { return log_ratio(v, s) / (2.0 * std::cosh(v - shift)); };
    auto f_reflected = [&](double v) { return f(-v); };
    const double lo = std::min(0.0, shift);
    const double hi = std::max(0.0, shift);

    double total = 0.0;
    double err = 0.0, l1 = 0.0;
    auto check = [&](const char* piece) {
        if (!(err <= 1e-9 * std::max(1.0, l1))) {
            throw QuadratureError(std::string("inner log-integral did not converge (") + piece +
                                  ") at y = " + std::to_string(y));
        }
    };
    total += integrator().integrate(f, hi, std::numeric_limits<double>::infinity(), 1e-12, &err, &l1);
    check("upper tail");
    total += integrator().integrate(f_reflected, -lo, std::numeric_limits<double>::infinity(), 1e-12, &err, &l1);
    check("lower tail");
    if (hi > lo) {
        total += integrate(f, lo, hi, &err, &l1);
        check("middle");
    }
    return total / kPi;
}

}  // namespace

double q_profile(double x) {
    constexpr double third = 1.0 / 3.0;
    if (x <= -third) return 0.0;
    if (x <= 0.0) return 4.5 * (x + third) * (x + third);
    if (x <= third) return 1.0 - 4.5 * (x - third) * (x - third);
    return 1.0;
}

double gamma_density(double y, double s) {
    require_order(s);
    if (!(y > 0.0)) throw RangeError("gamma density needs y > 0");
    const double y2s = std::pow(y, 2.0 * s);
    const double denom = 2.0 * kPi * (1.0 + y2s * y2s - 2.0 * y2s * std::cos(s * kPi));
    return std::sqrt(4.0 * s) * std::sin(s * kPi) * y2s / denom * std::exp(inner_exponent(y, s));
}

double G_transform(double xi, double s) {
    require_order(s);
    if (!(xi > 0.0)) throw RangeError("G transform needs xi > 0");

    // Truncate where exp(-xi y) gamma(y) falls below 1e-12 of its peak.
    auto integrand = [&](double y) { return y > 0.0 ? std::exp(-xi * y) * gamma_density(y, s) : 0.0; };
    double peak = 0.0;
    for (double y = 1e-3 / xi; y < 50.0 / xi; y *= 1.5) peak = std::max(peak, integrand(y));
    double cut = 1.0 / xi;
    while (integrand(cut) > 1e-12 * peak) cut *= 1.5;

    double value = 0.0;
    double lo = 0.0;
    // pieces scaled to the decay length 1/xi
    for (double hi : {1.0 / xi, 4.0 / xi, 16.0 / xi, cut}) {
        if (hi <= lo) continue;
        double err = 0.0, l1 = 0.0;
        const double piece = integrate(integrand, lo, hi, &err, &l1);
        if (!(err <= 1e-9 * l1 + 1e-300)) {
            throw QuadratureError("Laplace integral of gamma did not converge on y in [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        value += piece;
        lo = hi;
    }
    return value;
}

double half_line_profile(double z, double s) {
    if (!(z > 0.0)) return 0.0;
    return std::sin(z + (1.0 - s) * kPi / 4.0) - G_transform(z, s);
}

double half_line_frequency(int k, double s) { return k * kPi / 2.0 - (1.0 - s) * kPi / 4.0; }

namespace {

// gamma sampled once on a uniform grid in v = log y; G(xi) is then a
// trapezoid sum, which converges geometrically for these analytic,
// exponentially decaying integrands.
class LaplaceTable {
public:
    LaplaceTable(double s, double xi_min) {
        const double v_lo = std::log(1e-10);
        const double v_hi = std::log(45.0 / xi_min);
        const int n = static_cast<int>(std::ceil((v_hi - v_lo) / kStep)) + 1;
        y_.resize(static_cast<std::size_t>(n));
        w_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double y = std::exp(v_lo + kStep * i);
            y_[static_cast<std::size_t>(i)] = y;
            w_[static_cast<std::size_t>(i)] = kStep * y * gamma_density(y, s);
        }
    }

    double operator()(double xi) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < y_.size(); ++i) sum += w_[i] * std::exp(-xi * y_[i]);
        return sum;
    }

private:
    static constexpr double kStep = 0.025;
    std::vector<double> y_;
    std::vector<double> w_;
};

}  // namespace

QuasiEigenfunction quasi_eigenfunction(int k, const DiscreteOperator& op) {
    if (k < 1) throw SizingError("quasi-eigenfunction index must be >= 1");
    const Grid& grid = op.grid();
    if (grid.n_x() < 8 * k) {
        throw SizingError("grid with n_x = " + std::to_string(grid.n_x()) +
                          " does not resolve mode " + std::to_string(k) + " (needs n_x >= 8k)");
    }
    const double s = op.s();
    QuasiEigenfunction out;
    out.k = k;
    out.mu_k = half_line_frequency(k, s);
    const double parity = (k % 2 == 1) ? 1.0 : -1.0;  // (-1)^{k+1}

    const auto& nodes = grid.nodes();
    const LaplaceTable G(s, out.mu_k * grid.h());
    auto F = [&](double z) { return z > 0.0 ? std::sin(z + (1.0 - s) * kPi / 4.0) - G(z) : 0.0; };
    out.values.resize(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double x = nodes[i];
        double v = 0.0;
        const double q_left = q_profile(-x);
        const double q_right = q_profile(x);
        if (q_left != 0.0) v += q_left * F(out.mu_k * (1.0 + x));
        if (q_right != 0.0) v += parity * q_right * F(out.mu_k * (1.0 - x));
        out.values[static_cast<Eigen::Index>(i)] = v;
    }
    out.values[0] = 0.0;
    out.values[out.values.size() - 1] = 0.0;

    const Eigen::VectorXd interior = out.values.segment(1, grid.dofs());
    const Eigen::VectorXd applied = (op.stiffness() * interior).cwiseQuotient(op.lumped_mass());
    const double target = std::pow(out.mu_k, 2.0 * s);
    const Eigen::VectorXd residual = (applied - target * interior).cwiseAbs();
    out.residual_norm = residual.maxCoeff();
    for (int i = 0; i < grid.dofs(); ++i) {
        if (1.0 - std::abs(grid.x(i)) >= 0.1 - 1e-12) out.bulk_residual_norm = std::max(out.bulk_residual_norm, residual[i]);
    }
    return out;
}

}  // namespace fracheat
