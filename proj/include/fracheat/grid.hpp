#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace fracheat {

// Open interval (lo, hi); used for the control region and L1 windows.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const;  // strict, with a relative slack of 1e-12
};

// Uniform partition of [-1, 1] with n_x subintervals. Degrees of freedom
// are the n_x - 1 interior nodes; the exterior Dirichlet condition pins
// nodes 0 and n_x (and everything outside) to zero.
class Grid {
public:
    explicit Grid(int n_x);

    int n_x() const { return n_x_; }
    double h() const { return h_; }
    const std::vector<double>& nodes() const { return nodes_; }

    // Interior DOF count, n_x - 1.
    int dofs() const { return n_x_ - 1; }
    // Coordinate of interior DOF i (i = 0 .. dofs()-1), i.e. node i + 1.
    double x(int i) const { return nodes_[static_cast<std::size_t>(i) + 1]; }
    Eigen::VectorXd interior_nodes() const;

    // Interior DOFs strictly inside omega.
    std::vector<int> dofs_in(const Interval& omega) const;

    // Nodal interpolant of f on the interior DOFs.
    template <typename F>
    Eigen::VectorXd interpolate(F&& f) const {
        Eigen::VectorXd v(dofs());
        for (int i = 0; i < dofs(); ++i) v[i] = f(x(i));
        return v;
    }

private:
    int n_x_;
    double h_;
    std::vector<double> nodes_;
};

// Throws SizingError for n_x < 2.
Grid build_grid(int n_x);

// Validates that omega sits strictly inside (-1, 1) with positive length.
void require_inside_domain(const Interval& omega, const char* what);

}  // namespace fracheat
