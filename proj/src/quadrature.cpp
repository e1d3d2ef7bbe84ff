#include "zdirac/quadrature.hpp"
#include "zdirac/errors.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace zdirac {

const GaussRule& gauss_legendre(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    if (order < 1 || order > 512) throw InvalidSize("Gauss-Legendre order out of range");
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    GaussRule r;
    // boost returns the nonnegative zeros in increasing order
    const auto zeros = boost::math::legendre_p_zeros<double>(order);
    for (double z : zeros) {
        const double dp = boost::math::legendre_p_prime(order, z);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x.push_back(z);
        r.w.push_back(w);
        if (z != 0.0) {
            r.x.push_back(-z);
            r.w.push_back(w);
        }
    }
    std::vector<int> idx(r.x.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return r.x[a] < r.x[b]; });
    GaussRule s;
    for (int i : idx) {
        s.x.push_back(r.x[i]);
        s.w.push_back(r.w[i]);
    }
    return cache.emplace(order, std::move(s)).first->second;
}

std::vector<double> graded_breakpoints(double len, double h, int max_levels) {
    std::vector<double> b{0.0};
    double start = h > 0.0 ? h : len;
    if (h <= 0.0)
        for (int i = 0; i < max_levels; ++i) start *= 0.5;
    start = std::max(start, len * std::ldexp(1.0, -max_levels));
    for (double t = start; t < len; t *= 2.0) b.push_back(t);
    b.push_back(len);
    return b;
}

}  // namespace zdirac
