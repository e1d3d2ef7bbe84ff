#pragma once

#include <vector>

namespace zdirac {

// Gauss-Legendre rule on [-1, 1] of runtime order (cached).
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int order);

// Breakpoints 0 = b_0 < ... < b_k = len, geometric toward 0 with ratio 1/2
// starting at h (or at len / 2^levels when h <= 0).
std::vector<double> graded_breakpoints(double len, double h, int max_levels);

}  // namespace zdirac
