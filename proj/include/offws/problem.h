// Boundary value problem data: Dirichlet values g, Neumann flux h, source f,
// screening coefficient, and (for benchmarks) the analytic solution.

#pragma once

#include "geom.h"

#include <functional>

namespace offws {

template <int DIM>
struct Bvp {
    std::function<double(const Vec<DIM>&)> dirichlet;                     // g
    std::function<double(const Vec<DIM>&, const Vec<DIM>&)> neumann;      // h(p, outward n)
    std::function<double(const Vec<DIM>&)> source;                        // f, empty = zero
    double sigma = 0.0;

    // manufactured ground truth, when available
    std::function<double(const Vec<DIM>&)> solution;
    std::function<Vec<DIM>(const Vec<DIM>&)> solutionGradient;

    bool hasSource() const { return bool(source); }
    bool hasNeumannData() const { return bool(neumann); }

    double fluxAt(const Vec<DIM>& p, const Vec<DIM>& n) const {
        return neumann ? neumann(p, n) : 0.0;
    }
};

}  // namespace offws
