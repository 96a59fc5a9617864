#pragma once
#include <functional>
#include <vector>

namespace xdiff {

struct QuadratureRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre nodes/weights on (-1,1), Newton iteration on P_n.
QuadratureRule gauss_legendre(int n);

// Adaptive Simpson on [a,b] (a > b allowed, sign handled). Throws
// IterationError if the tolerance cannot be met within max_depth levels.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

}  // namespace xdiff
