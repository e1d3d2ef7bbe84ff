#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace zdirac {

using Torus = Eigen::Vector2d;

// Reduce to the representative in [0,1)^2.
Torus reduce(const Torus& xi);

std::complex<double> symbol_a(const Torus& xi);  // -1 + e^{-2 pi i xi_1}
std::complex<double> symbol_b(const Torus& xi);  // -1 + e^{-2 pi i xi_2}
double abs2_a(const Torus& xi);                  // 4 sin^2(pi xi_1)
double abs2_b(const Torus& xi);
double r_m(const Torus& xi, double m);

Eigen::Matrix3cd eval_symbol(const Torus& xi, double m);

struct BandTriple {
    double z_minus, z_zero, z_plus;
};
BandTriple band_values(const Torus& xi, double m);

// Gradient of z_+ (z_- has the negated gradient).
Eigen::Vector2d band_gradient(const Torus& xi, double m);
// Hessian of z_+, closed form.
Eigen::Matrix2d band_hessian(const Torus& xi, double m);

double characteristic_poly(const Torus& xi, double m, double z);
std::complex<double> characteristic_poly(const Torus& xi, double m, std::complex<double> z);

Eigen::Matrix3cd resolvent_fiber(const Torus& xi, double m, std::complex<double> z, double tol = 1e-12);

enum class ThresholdKind { elliptic, hyperbolic, flat_band, dirac_point };
std::string to_string(ThresholdKind k);

struct Threshold {
    double value;
    ThresholdKind kind;
};
struct ThresholdSet {
    double m;
    std::vector<Threshold> items;  // ascending
};
ThresholdSet classify_thresholds(double m);

}  // namespace zdirac
