#include "zdirac/fiber.hpp"
#include "zdirac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace zdirac {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

Torus reduce(const Torus& xi) {
    Torus out;
    for (int i = 0; i < 2; ++i) {
        double t = xi[i] - std::floor(xi[i]);
        out[i] = t >= 1.0 ? 0.0 : t;
    }
    return out;
}

cd symbol_a(const Torus& xi) { return cd(-1.0, 0.0) + std::polar(1.0, -2.0 * pi * reduce(xi)[0]); }
cd symbol_b(const Torus& xi) { return cd(-1.0, 0.0) + std::polar(1.0, -2.0 * pi * reduce(xi)[1]); }

double abs2_a(const Torus& xi) {
    double s = std::sin(pi * reduce(xi)[0]);
    return 4.0 * s * s;
}
double abs2_b(const Torus& xi) {
    double s = std::sin(pi * reduce(xi)[1]);
    return 4.0 * s * s;
}
double r_m(const Torus& xi, double m) { return m * m + abs2_a(xi) + abs2_b(xi); }

Eigen::Matrix3cd eval_symbol(const Torus& xi, double m) {
    const cd a = symbol_a(xi), b = symbol_b(xi);
    Eigen::Matrix3cd h;
    h << m, a, b,
         std::conj(a), -m, 0.0,
         std::conj(b), 0.0, -m;
    return h;
}

BandTriple band_values(const Torus& xi, double m) {
    const double s = std::sqrt(r_m(xi, m));
    return {-s, -m, s};
}

Eigen::Vector2d band_gradient(const Torus& xi0, double m) {
    const Torus xi = reduce(xi0);
    const double r = r_m(xi, m);
    if (m == 0.0 && xi[0] == 0.0 && xi[1] == 0.0)
        throw DiracPointError("z_+ is not differentiable at the Dirac point");
    const double c = 2.0 * pi / std::sqrt(r);
    return {c * std::sin(2.0 * pi * xi[0]), c * std::sin(2.0 * pi * xi[1])};
}

Eigen::Matrix2d band_hessian(const Torus& xi0, double m) {
    const Torus xi = reduce(xi0);
    const double r = r_m(xi, m);
    if (m == 0.0 && xi[0] == 0.0 && xi[1] == 0.0)
        throw DiracPointError("z_+ is not differentiable at the Dirac point");
    // z = sqrt(r), r_i = 4 pi sin(2 pi xi_i), r_ii = 8 pi^2 cos(2 pi xi_i)
    const double s = std::sqrt(r);
    Eigen::Vector2d g;
    Eigen::Vector2d h;
    for (int i = 0; i < 2; ++i) {
        g[i] = 4.0 * pi * std::sin(2.0 * pi * xi[i]);
        h[i] = 8.0 * pi * pi * std::cos(2.0 * pi * xi[i]);
    }
    Eigen::Matrix2d H = -g * g.transpose() / (4.0 * r * s);
    H(0, 0) += h[0] / (2.0 * s);
    H(1, 1) += h[1] / (2.0 * s);
    return H;
}

double characteristic_poly(const Torus& xi, double m, double z) {
    return (m - z) * (m + z) * (m + z) + (m + z) * (abs2_b(xi) + abs2_a(xi));
}

cd characteristic_poly(const Torus& xi, double m, cd z) {
    return (m - z) * (m + z) * (m + z) + (m + z) * (abs2_b(xi) + abs2_a(xi));
}

Eigen::Matrix3cd resolvent_fiber(const Torus& xi, double m, cd z, double tol) {
    const cd p = characteristic_poly(xi, m, z);
    if (std::abs(p) <= tol)
        throw SingularResolvent("resolvent pole: |p| = " + std::to_string(std::abs(p)), std::abs(p));
    const cd a = symbol_a(xi), b = symbol_b(xi);
    const cd q = m - z, w = -m - z;
    const double A = std::norm(a), B = std::norm(b);
    Eigen::Matrix3cd adj;
    adj << w * w, -a * w, -b * w,
           -std::conj(a) * w, q * w - B, std::conj(a) * b,
           -std::conj(b) * w, a * std::conj(b), q * w - A;
    return adj / p;
}

std::string to_string(ThresholdKind k) {
    switch (k) {
        case ThresholdKind::elliptic: return "elliptic";
        case ThresholdKind::hyperbolic: return "hyperbolic";
        case ThresholdKind::flat_band: return "flat_band";
        case ThresholdKind::dirac_point: return "dirac_point";
    }
    return "?";
}

namespace {

ThresholdKind kind_from_hessian(const Eigen::Matrix2d& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (ev[0] * ev[1] < 0.0) return ThresholdKind::hyperbolic;
    if (ev[0] * ev[1] > 0.0) return ThresholdKind::elliptic;
    throw DomainError("degenerate critical point");
}

}  // namespace

ThresholdSet classify_thresholds(double m) {
    if (!(m >= 0.0)) throw DomainError("mass must be nonnegative");
    ThresholdSet ts{m, {}};
    // z_+ has exactly four critical momenta; z_- mirrors them with the same signature.
    const Torus crit[4] = {{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}};
    for (const auto& xi : crit) {
        const double z = band_values(xi, m).z_plus;
        ThresholdKind kind;
        if (m == 0.0 && xi.isZero()) {
            ts.items.push_back({0.0, ThresholdKind::dirac_point});
            continue;
        }
        kind = kind_from_hessian(band_hessian(xi, m));
        bool dup = false;
        for (auto& t : ts.items)
            if (t.value == z) dup = true;
        if (dup) continue;  // (1/2,0) and (0,1/2) give the same value
        ts.items.push_back({z, kind});
        // the bottom of z_+ at xi = 0 sits at +m; its mirror -m is the flat band level
        if (xi.isZero())
            ts.items.push_back({-z, ThresholdKind::flat_band});
        else
            ts.items.push_back({-z, kind});
    }
    std::sort(ts.items.begin(), ts.items.end(), [](auto& a, auto& b) { return a.value < b.value; });
    return ts;
}

}  // namespace zdirac
