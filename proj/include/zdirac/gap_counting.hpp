#pragma once

#include "zdirac/inertia.hpp"
#include "zdirac/lattice.hpp"

#include <string>
#include <utility>
#include <vector>

namespace zdirac {

enum class OperatorTag { H0, Hplus, Hminus, ssf };
std::string to_string(OperatorTag t);
OperatorTag operator_tag_from_string(const std::string& s);

struct SeriesMeta {
    int L = 0;
    Boundary boundary = Boundary::open;
    double m = 0.0;
    double gamma = 0.0;
    double Gamma2 = 0.0;
    double Gamma3 = 0.0;
    int sign = +1;
    OperatorTag op = OperatorTag::Hplus;
};

struct CountingSeries {
    std::vector<double> lambda;
    std::vector<long> counts;
    SeriesMeta meta;
};

struct PowerLawFit {
    double exponent = 0.0;
    double constant = 0.0;
    double residual = 0.0;  // RMS of the log-log fit
    std::pair<double, double> window{0.0, 0.0};  // range of |lambda - ref| used
    int n_points = 0;
};

// Geometric grid lambda_j = ref + lambda0 * 2^{-j/2}, j = j_first..j_last.
std::vector<double> geometric_grid(double ref, double lambda0, int j_first, int j_last);

// Validity floors for fits near a threshold.
double momentum_floor(int L);
double localization_floor(int L, double Gamma_max, double gamma);

// Edge of the gap used for N^+ (excludes the band edge m itself).
inline constexpr double gap_edge_eps = 1e-8;

// N^+(lambda) = #{eigenvalues of H_sign in (lambda, m)}.
CountingSeries counting_series(const LatticeBox& box, double m, const Potential& V, int sign,
                               const std::vector<double>& lambda_grid);

// eta_L(lambda) = count(H_0, lambda) - count(H_sign, lambda), the finite
// volume spectral shift (nonnegative for sign = +1, V >= 0).
CountingSeries finite_volume_ssf(const LatticeBox& box, double m, const Potential& V, int sign,
                                 const std::vector<double>& lambda_grid);

// Least squares of ln N against ln|lambda - ref|; only points with
// |lambda - ref| in [lo, hi] are used (hi <= 0 means no upper limit).
PowerLawFit fit_power_law(const CountingSeries& series, double reference_point, double lo = 0.0, double hi = 0.0);

long flat_band_multiplicity(const LatticeBox& box, double m);

}  // namespace zdirac
