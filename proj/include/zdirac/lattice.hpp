#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zdirac {

enum class Boundary { periodic, open };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

// Finite truncation of Z^2. Vertex (x1, x2) has index x2*L + x1.
// Edges are stored once, oriented toward +delta_1 (horizontal) or +delta_2
// (vertical); matrix index of edge e is L^2 + e.
struct LatticeBox {
    int L = 0;
    Boundary boundary = Boundary::periodic;
    int n_vertices = 0;
    int n_edges = 0;
    std::vector<int> tail, head;
    std::vector<std::uint8_t> direction;  // 0: +delta_1, 1: +delta_2
    std::vector<int> h_edge, v_edge;      // edge leaving a vertex, -1 if absent

    int total_dim() const { return n_vertices + n_edges; }
    int vertex(int x1, int x2) const { return x2 * L + x1; }
    std::array<int, 2> coords(int v) const { return {v % L, v / L}; }
    std::array<int, 2> center() const { return {L / 2, L / 2}; }
};

LatticeBox build_lattice(int L, Boundary boundary);

// Real or complex cochains share the same index maps.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_coboundary(const LatticeBox& box,
                                                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f);
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_coboundary_adjoint(const LatticeBox& box,
                                                                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& g);

struct Cochain {
    Eigen::VectorXd vertex_values;
    Eigen::VectorXd edge_values;

    // Plain sums: the 1/2 weight and the two orientations cancel.
    double inner(const Cochain& o) const { return vertex_values.dot(o.vertex_values) + edge_values.dot(o.edge_values); }
    Eigen::VectorXd stacked() const;
};

// v_l(mu) = Gamma_l <mu>^{-gamma_l} plus optional table entries.
// Component 0 lives on vertices, 1 on horizontal edges (mu, mu+delta_1),
// 2 on vertical edges (mu, mu+delta_2).
struct Potential {
    enum class Family { power_decay, compact_support, custom };
    struct PowerLaw {
        double Gamma = 0.0;
        double gamma = 0.0;
    };

    Family family = Family::power_decay;
    std::array<PowerLaw, 3> power{};
    std::array<std::map<std::pair<int, int>, double>, 3> table{};

    double value(int component, int mu1, int mu2) const;

    // Gamma_2 = Gamma_3 decay on edges, single vertex value c1 at mu = 0.
    static Potential dirac_power(double gamma, double Gamma2, double Gamma3, double v1_center = 0.0);
    static Potential vertex_impulse(double c);
};

Potential load_potential_table(const std::string& path);

// Potential sampled on the box, centered at floor(L/2).
struct SampledPotential {
    Eigen::VectorXd vertex;  // length L^2
    Eigen::VectorXd edge;    // length E
};
SampledPotential sample_potential(const LatticeBox& box, const Potential& V);

using SparseSym = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

SparseSym assemble_hamiltonian(const LatticeBox& box, double m, const Potential* V = nullptr, int sign = +1);
SparseSym assemble_hamiltonian(const LatticeBox& box, double m, const SampledPotential& V, int sign);

Cochain loop_state(const LatticeBox& box, int x1, int x2);

double potential_trace_norm(const LatticeBox& box, const Potential& V);

}  // namespace zdirac
