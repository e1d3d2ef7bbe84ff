#pragma once

#include "zdirac/grid.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace zdirac {

using MultiIndex = std::vector<int>;

// Symbol on Z^d: Gamma <mu>^{-gamma}, or an explicit table (zero elsewhere).
struct DiscreteSymbol {
    enum class Family { power_decay, table };
    int d = 2;
    Family family = Family::power_decay;
    double Gamma = 1.0;
    double gamma = 4.0;
    double rho = 1.0;  // smoothness order in the symbol class
    std::map<MultiIndex, double> values;

    double operator()(const MultiIndex& mu) const;

    static DiscreteSymbol power(int d, double Gamma, double gamma);
    static DiscreteSymbol table(int d, std::map<MultiIndex, double> values);
};

struct SymbolClassReport {
    std::vector<MultiIndex> alphas;
    std::vector<double> C;         // sup over the full radius
    std::vector<double> C_half;    // sup over half the radius
    std::vector<bool> growing;     // C grows noticeably when the radius doubles
    bool bounded = true;
};

// Minimal C_alpha with |D^alpha v(mu)| <= C_alpha <mu>^{-gamma - rho|alpha|}
// on |mu|_inf <= radius, D_j the forward difference.
SymbolClassReport check_symbol_class(const DiscreteSymbol& v, double gamma, double rho, int alpha_max, int radius);

// Fourier coefficients on [-K, K]^d, normalized so that B == 1 gives a delta.
struct CoefficientTable {
    int d = 2;
    int K = 0;
    std::vector<std::complex<double>> c;  // row-major over [-K,K]^d

    std::complex<double> at(const MultiIndex& mu) const;
};

CoefficientTable fourier_coefficients(const GridSamples& B, int cutoff);

struct ToroidalComponent {
    GridSamples B;
    DiscreteSymbol v;
};

struct AssembleOptions {
    bool use_symmetry = true;  // swap symmetry mu1 <-> mu2 (d = 2)
    int panel = 256;           // alpha columns per rank-k update
};

// Truncation of Psi to [-M, M]^d, possibly as an orthogonal direct sum of
// symmetry sectors. Each block is Hermitian (lower triangle authoritative,
// mirrored on exit).
struct ToroidalOperator {
    int d = 2;
    int M = 0;
    long dim = 0;
    bool real = true;
    std::vector<Eigen::MatrixXd> real_blocks;
    std::vector<Eigen::MatrixXcd> complex_blocks;
    double tail_bound = 0.0;

    bool is_reduced() const { return real ? real_blocks.size() > 1 : complex_blocks.size() > 1; }
    // Full matrix in the momentum basis; only for unreduced operators.
    Eigen::MatrixXcd dense() const;
    double hermiticity_residual() const;
};

ToroidalOperator assemble_toroidal(const std::vector<ToroidalComponent>& components, int M,
                                   const AssembleOptions& opt = {});

// Partition of the unit cube into l = q^d subcubes; B[k][j] is the constant of
// component k on cube j (cube index row-major over (j_1, ..., j_d)).
ToroidalOperator assemble_toroidal_diag(int l, const std::vector<std::vector<std::complex<double>>>& B,
                                        const std::vector<DiscreteSymbol>& v, int M);

// All eigenvalues, descending.
std::vector<double> toroidal_spectrum(const ToroidalOperator& op);

std::pair<long, long> eigen_counting(const std::vector<double>& spectrum, double lambda);
std::pair<long, long> eigen_counting(const ToroidalOperator& op, double lambda);

// #{mu in Z^2 : <mu>^{-gamma} > lambda}.
long lattice_count_scalar(double gamma, double lambda);
inline constexpr double lattice_count_budget = 1e8;
// Smallest lambda whose enumeration stays inside the budget.
double smallest_feasible_lambda(double gamma);

struct WeakSchattenEstimate {
    double p = 0.0;
    double quasi_norm = 0.0;
    long argmax_n = 0;
    long n_used = 0;
};
WeakSchattenEstimate weak_schatten(const std::vector<double>& singular_values, double p);

struct WindowSpec {
    long top_count = 30;              // upper end: the top_count-th largest eigenvalue
    double saturation_fraction = 0.05;  // lower end: eigenvalue at this fraction of dim
    int n_points = 30;
};

struct CountingLawEntry {
    int M = 0;
    long dim = 0;
    std::vector<double> lambda;
    std::vector<long> n_plus;
    std::vector<double> scaled;
    double median = 0.0;
    double deviation = 0.0;  // |median - target| / target
    double seconds = 0.0;
};

struct CountingLawReport {
    double gamma = 0.0;
    int d = 2;
    double target_plus = 0.0;
    double target_minus = 0.0;
    std::vector<CountingLawEntry> entries;
    bool trend_nonincreasing = true;
};

CountingLawReport verify_counting_law(const std::vector<ToroidalComponent>& components, const std::vector<int>& M_list,
                                  const WindowSpec& window, double gamma, int d, double c_plus = 3.141592653589793,
                                  double c_minus = 0.0);

}  // namespace zdirac
