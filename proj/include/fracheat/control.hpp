#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fracheat/assembly.hpp"
#include "fracheat/dynamics.hpp"
#include "fracheat/grid.hpp"

namespace fracheat {

// Steer z0 onto the trajectory started at zhat0 with constant source uhat
// on omega. The target is regenerated for every horizon.
struct ControlProblem {
    std::shared_ptr<const DiscreteOperator> op;
    Eigen::VectorXd z0;
    Eigen::VectorXd zhat0;
    double uhat = 0.0;
    Interval omega;
    bool nonneg_control = true;
    bool nonneg_state = true;
    double nu = 0.0;
    MassKind mass = MassKind::lumped;

    // Throws RangeError / SizingError on inconsistent data.
    void validate() const;
    // zhat0 must be positive for generate_target_trajectory; a zero source
    // with zhat0 = z0 is accepted here as well (the degenerate problem).
    Trajectory target(double T, int n_t) const;
    Trajectory free_run(double T, int n_t) const;
    double norm(const Eigen::VectorXd& v) const;  // sqrt(v^T M v) in the problem's mass
};

// Reduced objective f(u) = 1/2 ||z_n(u) - zhat(T)||_M^2 + rho sum_{j>=1,i} min(z_ji, 0)^2
// with an adjoint gradient. u is laid out as ControlField::values.
class PrimalObjective {
public:
    PrimalObjective(const ControlProblem& problem, double T, int n_t);

    double evaluate(const Eigen::MatrixXd& u, double rho, Eigen::MatrixXd* grad = nullptr,
                    double* residual = nullptr) const;
    Trajectory trajectory(const Eigen::MatrixXd& u) const;
    double residual(const Eigen::MatrixXd& u) const;
    const Eigen::VectorXd& target_final() const { return target_final_; }
    int n_t() const { return n_t_; }
    double dt() const { return stepper_.dt(); }
    const ControlProblem& problem() const { return problem_; }
    const ControlField& layout() const { return layout_; }
    // Final states reached by unit controls: column j * support + r is the
    // response to a unit value on support DOF r during cell j, matching the
    // column-major storage of ControlField::values.
    Eigen::MatrixXd reachability_matrix() const;
    Eigen::VectorXd free_final() const;

private:
    const ControlProblem& problem_;
    int n_t_;
    ImplicitStepper stepper_;
    Eigen::VectorXd target_final_;
    ControlField layout_;
};

// Smoothed dual functional of the L-infinity problem,
// J(p) = 1/2 N(p)^2 + <z_free(T) - zhat(T), p>_M with N(p) = sum_j dt sum_{i in omega} m_i sqrt(p_ji^2 + eps^2)
// and p_j the backward adjoint from terminal data p.
class DualObjective {
public:
    DualObjective(const ControlProblem& problem, double T, int n_t, double eps);

    double evaluate(const Eigen::VectorXd& p_T, Eigen::VectorXd* grad = nullptr) const;
    // Adjoint on omega, one column per time cell.
    Eigen::MatrixXd adjoint_on_omega(const Eigen::VectorXd& p_T) const;
    double l1_norm(const Eigen::MatrixXd& p_omega) const;  // exact, no smoothing
    // sum_j (R^{n-j})^T D R^{n-j}, the L2 observation Gramian with D = diag(dt m_i) on omega.
    Eigen::MatrixXd gramian() const;
    double total_weight() const;
    double smoothed_l1(const Eigen::MatrixXd& p_omega) const;
    ControlField control(const Eigen::VectorXd& p_T) const;
    double eps() const { return eps_; }
    void set_eps(double eps) { eps_ = eps; }

private:
    const ControlProblem& problem_;
    int n_t_;
    double eps_;
    ImplicitStepper stepper_;
    Eigen::VectorXd weights_;  // dt m_i on the support
    ControlField layout_;
    Eigen::VectorXd rhs_;      // M (z_free(T) - zhat(T))
};

struct UnconstrainedOutcome {
    ControlField control;
    Eigen::VectorXd p_T;
    double p_l1 = 0.0;      // ||p||_{L1(omega x (0,T))}
    double u_inf = 0.0;     // max |u|
    double final_residual = 0.0;
    double eps_target = 0.0;
    int iterations = 0;
    double gradient_norm = 0.0;
};

// Minimizes the dual functional by BFGS with continuation in the smoothing
// parameter down to epsilon_smooth. Throws SolverError when the line search
// stagnates before the gradient is small.
UnconstrainedOutcome solve_unconstrained_Linf(const ControlProblem& problem, double T, int n_t,
                                              double epsilon_smooth);

struct FixedTimeOptions {
    double eps_target_rel = 1e-3;  // eps_target = eps_target_rel * ||zhat(T)||_M
    double eps_cons = 1e-8;
    int max_iter = 4000;
    // Exact nonnegative least squares on the reachability matrix when the
    // projected gradient iteration ends infeasible.
    bool certify = true;
};

struct FixedTimeOutcome {
    ControlField control;
    Trajectory trajectory;
    double T = 0.0;
    double final_residual = 0.0;
    double eps_target = 0.0;
    bool feasible = false;
    int iterations = 0;
    std::vector<double> objective_history;
    double min_control = 0.0;
    double min_state = 0.0;
    std::string method;
    std::string diagnostics;
};

// Projected Barzilai-Borwein gradient with a nonmonotone line search.
// Never throws on budget exhaustion; the outcome is marked infeasible.
FixedTimeOutcome solve_constrained_fixed_time(const ControlProblem& problem, double T, int n_t,
                                              const FixedTimeOptions& opts = {},
                                              const Eigen::MatrixXd* warm_start = nullptr);

// Elementwise max(u, 0).
Eigen::MatrixXd project_nonnegative(const Eigen::MatrixXd& u);

struct Impulse {
    double x = 0.0;
    double t = 0.0;
    double mass = 0.0;
};

struct AtomicityReport {
    double total_mass = 0.0;
    double active_cell_fraction = 0.0;
    std::vector<Impulse> top_impulses;
};

// Cell masses u dt dx; cells above threshold * max are active. Throws
// RangeError for entries below -eps_cons or threshold outside (0, 1).
AtomicityReport impulse_analysis(const ControlField& control, double dt, double dx, double threshold,
                                 double eps_cons = 1e-8);

struct ProbeRecord {
    double T = 0.0;
    bool feasible = false;
    double residual = 0.0;
};

struct MinimalTimeReport {
    double T_lo = 0.0;
    double T_hi = 0.0;
    double T_min_estimate = 0.0;
    std::vector<ProbeRecord> history;
    AtomicityReport atomicity;
    FixedTimeOutcome best;  // outcome at T_hi
};

struct MinimalTimeOptions {
    FixedTimeOptions fixed;
    int max_probes = 60;
    double atomicity_threshold = 0.01;
};

// Bisection on the horizon. Throws BracketError if the bracket does not
// straddle the feasibility boundary and SolverError if the probe budget
// runs out.
MinimalTimeReport minimal_time_search(const ControlProblem& problem, std::pair<double, double> T_bracket,
                                      double tol_T, int n_t, const MinimalTimeOptions& opts = {});

struct HorizonGrid {
    double T_min = 0.05;
    double T_max = 20.0;
    int points = 60;
};

// Smallest grid horizon with e^{-lambda_1 T} C(T) ||z0 - zhat0||_M^2 < nu^2.
// Throws RangeError for nu <= 0 and SolverError when the grid is exhausted.
double sufficient_time_bound(const ControlProblem& problem, double lambda_1,
                             const std::function<double(double)>& C_of_T, const HorizonGrid& grid = {});

}  // namespace fracheat
