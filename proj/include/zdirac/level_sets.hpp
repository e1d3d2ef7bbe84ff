#pragma once

#include "zdirac/fiber.hpp"
#include "zdirac/grid.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace zdirac {

struct QuadSpec {
    int order = 16;   // Gauss points per panel
    int levels = 40;  // geometric grading depth
};

// Closed level curve r_m = u^2, all four quadrants.
struct LevelCurve {
    double m = 0.0;
    double rho = 0.0;
    int nodes_per_quadrant = 0;
    std::vector<Torus> nodes;
    std::vector<double> coarea_weights;  // d(gamma) / |grad r|
    std::vector<double> arc_weights;     // d(gamma)

    double arc_length() const;
};

LevelCurve level_curve(double m, double u, int n_nodes = 16);

// R(u): integral of 1/|grad r_m| over r_m = u^2 (density in rho = u^2).
double coarea_density(double m, double u, int n_nodes = 16);

struct CoareaResult {
    double value = 0.0;
    double refinement_delta = 0.0;  // change against a coarser rule
    int n_levels = 0;
};
CoareaResult coarea_integral(double m, const std::function<double(const Torus&)>& g, const QuadSpec& q = {});

// Integrand ((Gamma2 |b|^2 + Gamma3 |a|^2) / r)^{2/gamma}; angular average at xi = 0.
double constant_C_integrand(const Torus& xi, double gamma, double Gamma2, double Gamma3);

double asymptotic_constant_C(double gamma, double Gamma2, double Gamma3, const QuadSpec& q = {12, 40});

// (c_+ I, c_- I) with I = mean over the grid of (sum_k Gamma_k |B_k|^2)^{d/gamma}.
std::pair<double, double> asymptotic_constant_CB(double gamma, int d, double c_plus, double c_minus,
                                                 const std::vector<GridSamples>& B, const std::vector<double>& Gamma);

}  // namespace zdirac
