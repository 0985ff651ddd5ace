#include "fracheat/grid.hpp"

#include <cmath>
#include <string>

#include "fracheat/error.hpp"

namespace fracheat {

bool Interval::contains(double x) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(hi - lo));
    return x > lo + slack && x < hi - slack;
}

Grid::Grid(int n_x) : n_x_(n_x), h_(0.0) {
    if (n_x < 2) {
        throw SizingError("grid needs n_x >= 2 subintervals, got " + std::to_string(n_x));
    }
    h_ = 2.0 / n_x;
    nodes_.resize(static_cast<std::size_t>(n_x) + 1);
    for (int i = 0; i <= n_x; ++i) nodes_[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / n_x;
    nodes_.front() = -1.0;
    nodes_.back() = 1.0;
}

Eigen::VectorXd Grid::interior_nodes() const {
    Eigen::VectorXd v(dofs());
    for (int i = 0; i < dofs(); ++i) v[i] = x(i);
    return v;
}

std::vector<int> Grid::dofs_in(const Interval& omega) const {
    std::vector<int> out;
    for (int i = 0; i < dofs(); ++i) {
        if (omega.contains(x(i))) out.push_back(i);
    }
    return out;
}

Grid build_grid(int n_x) { return Grid(n_x); }

void require_inside_domain(const Interval& omega, const char* what) {
    if (!(omega.lo < omega.hi)) {
        throw RangeError(std::string(what) + " must have positive length");
    }
    if (omega.lo < -1.0 || omega.hi > 1.0) {
        throw RangeError(std::string(what) + " must lie inside (-1, 1)");
    }
}

}  // namespace fracheat
