#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace zdirac {

// Samples of a function on the uniform grid xi = j / N of T^d, row-major
// (first coordinate slowest).
struct GridSamples {
    int d = 2;
    int N = 0;
    std::vector<std::complex<double>> values;

    std::size_t size() const { return values.size(); }
};

GridSamples sample_grid(int d, int N, const std::function<std::complex<double>(const std::vector<double>&)>& f);

// B_1 = conj(b)/sqrt(r), B_2 = conj(a)/sqrt(r) (m = 0), set to 0 at the origin node.
std::array<GridSamples, 2> dirac_model_symbols(int N);

}  // namespace zdirac
