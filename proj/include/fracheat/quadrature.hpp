#pragma once

#include <vector>

namespace fracheat::quad {

// Gauss-Legendre rule mapped to [0, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Orders 1..64 (Golub-Welsch, cached). Throws SizingError otherwise.
const Rule& gauss_legendre_unit(int order);

}  // namespace fracheat::quad
