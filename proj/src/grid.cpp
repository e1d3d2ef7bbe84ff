#include "zdirac/grid.hpp"
#include "zdirac/errors.hpp"
#include "zdirac/fiber.hpp"

#include <cmath>

namespace zdirac {

GridSamples sample_grid(int d, int N, const std::function<std::complex<double>(const std::vector<double>&)>& f) {
    if (d < 1 || N < 1) throw InvalidSize("grid needs d >= 1 and N >= 1");
    GridSamples g;
    g.d = d;
    g.N = N;
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(N);
    g.values.resize(total);
    std::vector<double> xi(d);
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t r = k;
        for (int i = d - 1; i >= 0; --i) {
            xi[i] = static_cast<double>(r % N) / N;
            r /= N;
        }
        g.values[k] = f(xi);
    }
    return g;
}

std::array<GridSamples, 2> dirac_model_symbols(int N) {
    auto make = [N](bool first) {
        return sample_grid(2, N, [first](const std::vector<double>& x) -> std::complex<double> {
            const Torus xi(x[0], x[1]);
            const double r = r_m(xi, 0.0);
            if (r == 0.0) return 0.0;
            const auto c = first ? std::conj(symbol_b(xi)) : std::conj(symbol_a(xi));
            return c / std::sqrt(r);
        });
    };
    return {make(true), make(false)};
}

}  // namespace zdirac
