#include "zdirac/gap_counting.hpp"
#include "zdirac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace zdirac {

std::string to_string(OperatorTag t) {
    switch (t) {
        case OperatorTag::H0: return "H0";
        case OperatorTag::Hplus: return "Hplus";
        case OperatorTag::Hminus: return "Hminus";
        case OperatorTag::ssf: return "ssf";
    }
    return "?";
}

OperatorTag operator_tag_from_string(const std::string& s) {
    if (s == "H0") return OperatorTag::H0;
    if (s == "Hplus") return OperatorTag::Hplus;
    if (s == "Hminus") return OperatorTag::Hminus;
    if (s == "ssf") return OperatorTag::ssf;
    throw DomainError("unknown operator tag '" + s + "'");
}

std::vector<double> geometric_grid(double ref, double lambda0, int j_first, int j_last) {
    std::vector<double> g;
    for (int j = j_first; j <= j_last; ++j) g.push_back(ref + lambda0 * std::exp2(-0.5 * j));
    return g;
}

double momentum_floor(int L) {
    const double k = 2.0 * std::numbers::pi / L;
    return 8.0 * k * k;
}

double localization_floor(int L, double Gamma_max, double gamma) { return Gamma_max * std::pow(L / 4.0, -gamma); }

namespace {

SeriesMeta make_meta(const LatticeBox& box, double m, const Potential& V, int sign, OperatorTag op) {
    SeriesMeta meta;
    meta.L = box.L;
    meta.boundary = box.boundary;
    meta.m = m;
    meta.gamma = std::max(V.power[1].gamma, V.power[2].gamma);
    meta.Gamma2 = V.power[1].Gamma;
    meta.Gamma3 = V.power[2].Gamma;
    meta.sign = sign;
    meta.op = op;
    return meta;
}

}  // namespace

CountingSeries counting_series(const LatticeBox& box, double m, const Potential& V, int sign,
                               const std::vector<double>& lambda_grid) {
    const SparseSym H = assemble_hamiltonian(box, m, &V, sign);
    CountingSeries s;
    s.meta = make_meta(box, m, V, sign, sign > 0 ? OperatorTag::Hplus : OperatorTag::Hminus);
    const long top = inertia_count_nudged(H, m - gap_edge_eps);
    for (double lam : lambda_grid) {
        s.lambda.push_back(lam);
        s.counts.push_back(top - inertia_count_nudged(H, lam));
    }
    return s;
}

CountingSeries finite_volume_ssf(const LatticeBox& box, double m, const Potential& V, int sign,
                                 const std::vector<double>& lambda_grid) {
    const SparseSym H = assemble_hamiltonian(box, m, &V, sign);
    const SparseSym H0 = assemble_hamiltonian(box, m, nullptr, +1);
    CountingSeries s;
    s.meta = make_meta(box, m, V, sign, OperatorTag::ssf);
    for (double lam : lambda_grid) {
        s.lambda.push_back(lam);
        s.counts.push_back(inertia_count_nudged(H0, lam) - inertia_count_nudged(H, lam));
    }
    return s;
}

PowerLawFit fit_power_law(const CountingSeries& series, double ref, double lo, double hi) {
    if (series.lambda.size() != series.counts.size()) throw LengthMismatch("series lambda/count sizes differ");
    std::vector<double> x, y;
    double dmin = INFINITY, dmax = 0.0;
    for (size_t i = 0; i < series.lambda.size(); ++i) {
        const double d = std::abs(series.lambda[i] - ref);
        if (d < lo || (hi > 0.0 && d > hi) || d == 0.0) continue;
        if (series.counts[i] < 1)
            throw FitWindowError("count below 1 inside the fit window at lambda = " +
                                 std::to_string(series.lambda[i]));
        x.push_back(std::log(d));
        y.push_back(std::log(static_cast<double>(series.counts[i])));
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (x.size() < 5) throw FitWindowError("need at least 5 points in the fit window, got " + std::to_string(x.size()));
    if (dmax < 10.0 * dmin) throw FitWindowError("fit window spans less than one decade");
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        A(i, 0) = x[i];
        A(i, 1) = 1.0;
        b[i] = y[i];
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
    PowerLawFit fit;
    fit.exponent = -coef[0];
    fit.constant = std::exp(coef[1]);
    fit.residual = std::sqrt((A * coef - b).squaredNorm() / n);
    fit.window = {dmin, dmax};
    fit.n_points = n;
    return fit;
}

long flat_band_multiplicity(const LatticeBox& box, double m) {
    const SparseSym H0 = assemble_hamiltonian(box, m, nullptr, +1);
    return inertia_count_nudged(H0, -m + 1e-6) - inertia_count_nudged(H0, -m - 1e-6);
}

}  // namespace zdirac
