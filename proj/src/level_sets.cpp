#include "zdirac/level_sets.hpp"
#include "zdirac/errors.hpp"
#include "zdirac/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace zdirac {

namespace {

constexpr double pi = std::numbers::pi;

// Level set in the variables s_i = sin^2(pi xi_i): s_1 + s_2 = sp, with
// onem = 1 - sp passed separately so the hyperbolic level stays resolved.
// For sp < 1: s_1 = sp sin^2(t/2); for sp > 1: 1 - s_1 = (2 - sp) cos^2(t/2).
// Either way ds_1 / sqrt(s_1 s_2) (resp. of the complements) is dt and the
// coarea weight per quadrant reduces to dt / (16 pi^2 sqrt(remaining factors)).
template <class F>
void for_each_quadrant_node(double sp, double onem, int order, F&& f) {
    const auto& gl = gauss_legendre(order);
    const double width = 0.5 * std::sqrt(std::abs(onem));
    const auto half = graded_breakpoints(pi / 2.0, std::min(width, pi / 2.0), 60);
    std::vector<double> br = half;
    for (int i = static_cast<int>(half.size()) - 2; i >= 0; --i) br.push_back(pi - half[i]);
    const double norm = 1.0 / (16.0 * pi * pi);
    for (size_t p = 0; p + 1 < br.size(); ++p) {
        const double a = br[p], b = br[p + 1];
        const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (size_t k = 0; k < gl.x.size(); ++k) {
            const double t = mid + hw * gl.x[k];
            const double sn = std::sin(0.5 * t), cs = std::cos(0.5 * t);
            double s1, c1, s2, c2, w;
            if (onem > 0.0) {
                s1 = sp * sn * sn;
                c1 = onem + sp * cs * cs;
                s2 = sp * cs * cs;
                c2 = onem + sp * sn * sn;
                w = norm / std::sqrt(c1 * c2);
            } else {
                const double e = -onem, tt = 1.0 + onem;
                s1 = e + tt * sn * sn;
                c1 = tt * cs * cs;
                s2 = e + tt * cs * cs;
                c2 = tt * sn * sn;
                w = norm / std::sqrt(s1 * s2);
            }
            f(s1, c1, s2, c2, w * hw * gl.w[k]);
        }
    }
}

inline double xi_from_s(double s, double c) { return std::atan2(std::sqrt(s), std::sqrt(c)) / pi; }

inline double reflect(double x) { return x == 0.0 ? 0.0 : 1.0 - x; }

void check_level(double m, double u) {
    if (!(m >= 0.0)) throw DomainError("mass must be nonnegative");
    const double rho = u * u;
    // a few ulps of slack so that e.g. u = sqrt(5) counts as the threshold
    const double tol = 8.0 * std::numeric_limits<double>::epsilon() * (m * m + 8.0);
    if (!(rho > m * m + tol && rho < m * m + 8.0 - tol))
        throw ThresholdLevelError("level u^2 = " + std::to_string(rho) + " outside the open band (m^2, m^2+8)");
    if (std::abs(rho - (m * m + 4.0)) <= tol) throw ThresholdLevelError("level sits on the hyperbolic threshold m^2+4");
}

// Sum over the four quadrants of g(xi) * coarea weight at level sp.
double curve_sum(double sp, double onem, int order, const std::function<double(const Torus&)>& g) {
    double acc = 0.0;
    for_each_quadrant_node(sp, onem, order, [&](double s1, double c1, double s2, double c2, double w) {
        const double x1 = xi_from_s(s1, c1), x2 = xi_from_s(s2, c2);
        const double y1 = reflect(x1), y2 = reflect(x2);
        acc += w * (g(Torus(x1, x2)) + g(Torus(y1, x2)) + g(Torus(x1, y2)) + g(Torus(y1, y2)));
    });
    return acc;
}

double coarea_pass(const std::function<double(const Torus&)>& g, int rho_order, int curve_order, int levels,
                   int* n_levels) {
    // rho' = (rho - m^2)/4 in (0, 2); log singularity at rho' = 1.
    const auto& gl = gauss_legendre(rho_order);
    const auto near_end = graded_breakpoints(0.5, -1.0, 12);
    const auto near_mid = graded_breakpoints(0.5, -1.0, levels);
    // panels on (0,1) as pairs (lo, hi) in terms of distance to the nearest end
    struct Panel {
        double a, b;   // distance from the graded end
        bool toward_zero;
    };
    std::vector<Panel> panels;
    for (size_t i = 0; i + 1 < near_end.size(); ++i) panels.push_back({near_end[i], near_end[i + 1], true});
    for (size_t i = 0; i + 1 < near_mid.size(); ++i) panels.push_back({near_mid[i], near_mid[i + 1], false});
    double total = 0.0;
    int count = 0;
    for (int side = 0; side < 2; ++side) {
        // side 0: rho' in (0,1); side 1: rho' in (1,2) mirrored through rho' -> 2 - rho'
        for (const auto& p : panels) {
            const double hw = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
            for (size_t k = 0; k < gl.x.size(); ++k) {
                const double d = mid + hw * gl.x[k];
                double sp, onem;
                if (p.toward_zero) {
                    sp = side == 0 ? d : 2.0 - d;
                    onem = side == 0 ? 1.0 - d : d - 1.0;
                } else {
                    sp = side == 0 ? 1.0 - d : 1.0 + d;
                    onem = side == 0 ? d : -d;
                }
                // drho = 4 drho'
                total += 4.0 * hw * gl.w[k] * curve_sum(sp, onem, curve_order, g);
                ++count;
            }
        }
    }
    if (n_levels) *n_levels = count;
    return total;
}

}  // namespace

double LevelCurve::arc_length() const {
    double s = 0.0;
    for (double w : arc_weights) s += w;
    return s;
}

LevelCurve level_curve(double m, double u, int n_nodes) {
    check_level(m, u);
    if (n_nodes < 16) throw InvalidSize("level_curve needs at least 16 nodes per panel");
    LevelCurve c;
    c.m = m;
    c.rho = u * u;
    const double sp = (c.rho - m * m) / 4.0;
    const double onem = (m * m + 4.0 - c.rho) / 4.0;
    int per_quadrant = 0;
    for_each_quadrant_node(sp, onem, n_nodes, [&](double s1, double c1, double s2, double c2, double w) {
        const double x1 = xi_from_s(s1, c1), x2 = xi_from_s(s2, c2);
        const double grad = 8.0 * pi * std::sqrt(s1 * c1 + s2 * c2);
        const Torus q[4] = {{x1, x2}, {reflect(x1), x2}, {x1, reflect(x2)}, {reflect(x1), reflect(x2)}};
        for (const auto& xi : q) {
            c.nodes.push_back(xi);
            c.coarea_weights.push_back(w);
            c.arc_weights.push_back(w * grad);
        }
        ++per_quadrant;
    });
    c.nodes_per_quadrant = per_quadrant;
    return c;
}

double coarea_density(double m, double u, int n_nodes) {
    check_level(m, u);
    const double rho = u * u;
    const double sp = (rho - m * m) / 4.0;
    const double onem = (m * m + 4.0 - rho) / 4.0;
    double acc = 0.0;
    for_each_quadrant_node(sp, onem, n_nodes, [&](double, double, double, double, double w) { acc += w; });
    return 4.0 * acc;
}

CoareaResult coarea_integral(double m, const std::function<double(const Torus&)>& g, const QuadSpec& q) {
    if (!(m >= 0.0)) throw DomainError("mass must be nonnegative");
    // the level sets of r_m do not depend on m beyond the shift by m^2
    CoareaResult res;
    res.value = coarea_pass(g, q.order, q.order, q.levels, &res.n_levels);
    const double coarse = coarea_pass(g, std::max(4, q.order - 4), std::max(4, q.order - 4), q.levels, nullptr);
    res.refinement_delta = std::abs(res.value - coarse);
    return res;
}

double constant_C_integrand(const Torus& xi0, double gamma, double Gamma2, double Gamma3) {
    const Torus xi = reduce(xi0);
    const double A = abs2_a(xi), B = abs2_b(xi);
    const double p = 2.0 / gamma;
    if (A + B == 0.0) {
        // angular average of (Gamma2 sin^2 t + Gamma3 cos^2 t)^p
        const auto& gl = gauss_legendre(64);
        double acc = 0.0;
        for (size_t k = 0; k < gl.x.size(); ++k) {
            const double t = pi / 4.0 * (1.0 + gl.x[k]);
            const double s = std::sin(t), c = std::cos(t);
            acc += gl.w[k] * std::pow(Gamma2 * s * s + Gamma3 * c * c, p);
        }
        return acc / 2.0;  // (2/pi) * (pi/4) * sum
    }
    return std::pow((Gamma2 * B + Gamma3 * A) / (A + B), p);
}

double asymptotic_constant_C(double gamma, double Gamma2, double Gamma3, const QuadSpec& q) {
    if (!(gamma > 2.0)) throw OutOfValidityRange("the flat-band asymptotics require gamma > 2");
    if (!(Gamma2 >= 0.0 && Gamma3 >= 0.0)) throw DomainError("Gamma entries must be nonnegative");
    if (Gamma2 == 0.0 && Gamma3 == 0.0) return 0.0;
    // phi_i = pi xi_i; fold to [0, pi/2]^2 (four symmetric copies)
    const double p = 2.0 / gamma;
    const auto br = graded_breakpoints(pi / 2.0, -1.0, q.levels);
    const auto& gl = gauss_legendre(q.order);
    std::vector<double> x, w;
    for (size_t i = 0; i + 1 < br.size(); ++i) {
        const double hw = 0.5 * (br[i + 1] - br[i]), mid = 0.5 * (br[i + 1] + br[i]);
        for (size_t k = 0; k < gl.x.size(); ++k) {
            x.push_back(mid + hw * gl.x[k]);
            w.push_back(hw * gl.w[k]);
        }
    }
    std::vector<double> s2(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        const double s = std::sin(x[i]);
        s2[i] = s * s;
    }
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double row = 0.0;
        for (size_t j = 0; j < x.size(); ++j)
            row += w[j] * std::pow((Gamma2 * s2[j] + Gamma3 * s2[i]) / (s2[i] + s2[j]), p);
        acc += w[i] * row;
    }
    return pi * (4.0 / (pi * pi)) * acc;
}

std::pair<double, double> asymptotic_constant_CB(double gamma, int d, double c_plus, double c_minus,
                                                 const std::vector<GridSamples>& B, const std::vector<double>& Gamma) {
    if (B.size() != Gamma.size())
        throw LengthMismatch("got " + std::to_string(B.size()) + " symbols but " + std::to_string(Gamma.size()) +
                             " Gamma values");
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (B.empty()) return {0.0, 0.0};
    const auto n = B[0].size();
    for (const auto& b : B) {
        if (b.d != d || b.size() != n) throw LengthMismatch("symbol grids differ in shape");
        if (b.N < 64) throw ResolutionError("constant quadrature needs at least 64 points per dimension");
    }
    const double p = static_cast<double>(d) / gamma;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (size_t k = 0; k < B.size(); ++k) s += Gamma[k] * std::norm(B[k].values[j]);
        if (s > 0.0) acc += std::pow(s, p);
    }
    acc /= static_cast<double>(n);
    return {c_plus * acc, c_minus * acc};
}

}  // namespace zdirac
