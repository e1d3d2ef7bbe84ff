#include "zdirac/lattice.hpp"
#include "zdirac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

namespace zdirac {

std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "open"; }

Boundary boundary_from_string(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "open") return Boundary::open;
    throw DomainError("unknown boundary '" + s + "'");
}

LatticeBox build_lattice(int L, Boundary boundary) {
    if (L < 2) throw InvalidSize("lattice side must be >= 2, got " + std::to_string(L));
    LatticeBox box;
    box.L = L;
    box.boundary = boundary;
    box.n_vertices = L * L;
    box.h_edge.assign(box.n_vertices, -1);
    box.v_edge.assign(box.n_vertices, -1);
    const bool per = boundary == Boundary::periodic;
    const int E = per ? 2 * L * L : 2 * L * (L - 1);
    box.tail.reserve(E);
    box.head.reserve(E);
    box.direction.reserve(E);
    // per vertex: horizontal edge first, then vertical
    for (int x2 = 0; x2 < L; ++x2)
        for (int x1 = 0; x1 < L; ++x1) {
            const int v = box.vertex(x1, x2);
            if (per || x1 + 1 < L) {
                box.h_edge[v] = static_cast<int>(box.tail.size());
                box.tail.push_back(v);
                box.head.push_back(box.vertex((x1 + 1) % L, x2));
                box.direction.push_back(0);
            }
            if (per || x2 + 1 < L) {
                box.v_edge[v] = static_cast<int>(box.tail.size());
                box.tail.push_back(v);
                box.head.push_back(box.vertex(x1, (x2 + 1) % L));
                box.direction.push_back(1);
            }
        }
    box.n_edges = static_cast<int>(box.tail.size());
    return box;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_coboundary(const LatticeBox& box,
                                                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f) {
    if (f.size() != box.n_vertices)
        throw LengthMismatch("vertex vector has length " + std::to_string(f.size()) + ", expected " +
                             std::to_string(box.n_vertices));
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(box.n_edges);
    for (int e = 0; e < box.n_edges; ++e) out[e] = f[box.head[e]] - f[box.tail[e]];
    return out;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_coboundary_adjoint(const LatticeBox& box,
                                                                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& g) {
    if (g.size() != box.n_edges)
        throw LengthMismatch("edge vector has length " + std::to_string(g.size()) + ", expected " +
                             std::to_string(box.n_edges));
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(box.n_vertices);
    for (int e = 0; e < box.n_edges; ++e) {
        out[box.head[e]] += g[e];
        out[box.tail[e]] -= g[e];
    }
    return out;
}

template Eigen::VectorXd apply_coboundary<double>(const LatticeBox&, const Eigen::VectorXd&);
template Eigen::VectorXcd apply_coboundary<std::complex<double>>(const LatticeBox&, const Eigen::VectorXcd&);
template Eigen::VectorXd apply_coboundary_adjoint<double>(const LatticeBox&, const Eigen::VectorXd&);
template Eigen::VectorXcd apply_coboundary_adjoint<std::complex<double>>(const LatticeBox&, const Eigen::VectorXcd&);

Eigen::VectorXd Cochain::stacked() const {
    Eigen::VectorXd out(vertex_values.size() + edge_values.size());
    out << vertex_values, edge_values;
    return out;
}

double Potential::value(int component, int mu1, int mu2) const {
    const auto& p = power[component];
    double v = 0.0;
    if (p.Gamma != 0.0) v = p.Gamma * std::pow(1.0 + double(mu1) * mu1 + double(mu2) * mu2, -0.5 * p.gamma);
    const auto& t = table[component];
    if (!t.empty()) {
        auto it = t.find({mu1, mu2});
        if (it != t.end()) v += it->second;
    }
    return v;
}

Potential Potential::dirac_power(double gamma, double Gamma2, double Gamma3, double v1_center) {
    Potential V;
    V.family = Family::power_decay;
    V.power[1] = {Gamma2, gamma};
    V.power[2] = {Gamma3, gamma};
    if (v1_center != 0.0) V.table[0][{0, 0}] = v1_center;
    return V;
}

Potential Potential::vertex_impulse(double c) {
    Potential V;
    V.family = Family::compact_support;
    V.table[0][{0, 0}] = c;
    return V;
}

Potential load_potential_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open potential file " + path);
    Potential V;
    V.family = Potential::Family::custom;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string kind;
        if (!(ss >> kind)) continue;
        int mu1, mu2;
        double val;
        if (!(ss >> mu1 >> mu2 >> val))
            throw DomainError(path + ":" + std::to_string(lineno) + ": expected 'kind mu1 mu2 value'");
        int comp;
        if (kind == "v1") comp = 0;
        else if (kind == "v2") comp = 1;
        else if (kind == "v3") comp = 2;
        else throw DomainError(path + ":" + std::to_string(lineno) + ": unknown kind '" + kind + "'");
        if (!(val >= 0.0)) throw DomainError(path + ":" + std::to_string(lineno) + ": negative potential value");
        V.table[comp][{mu1, mu2}] += val;
    }
    return V;
}

SampledPotential sample_potential(const LatticeBox& box, const Potential& V) {
    SampledPotential s;
    s.vertex.resize(box.n_vertices);
    s.edge.resize(box.n_edges);
    const auto c = box.center();
    for (int v = 0; v < box.n_vertices; ++v) {
        auto x = box.coords(v);
        s.vertex[v] = V.value(0, x[0] - c[0], x[1] - c[1]);
    }
    for (int e = 0; e < box.n_edges; ++e) {
        auto x = box.coords(box.tail[e]);
        s.edge[e] = V.value(1 + box.direction[e], x[0] - c[0], x[1] - c[1]);
    }
    if ((s.vertex.array() < 0).any() || (s.edge.array() < 0).any() || !s.vertex.allFinite() || !s.edge.allFinite())
        throw DomainError("potential must be finite and nonnegative");
    return s;
}

SparseSym assemble_hamiltonian(const LatticeBox& box, double m, const SampledPotential& V, int sign) {
    if (!(m >= 0.0)) throw DomainError("mass must be nonnegative");
    if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
    const bool haveV = V.vertex.size() > 0;
    if (haveV && (V.vertex.size() != box.n_vertices || V.edge.size() != box.n_edges))
        throw LengthMismatch("sampled potential does not match the box");
    if (haveV && ((V.vertex.array() < 0).any() || (V.edge.array() < 0).any()))
        throw DomainError("potential must be nonnegative");

    const int nV = box.n_vertices;
    const int n = box.total_dim();
    // Column-wise fill in index order keeps the layout deterministic.
    std::vector<std::vector<std::pair<int, double>>> cols(n);
    for (int v = 0; v < nV; ++v) cols[v].push_back({v, m + (haveV ? sign * V.vertex[v] : 0.0)});
    for (int e = 0; e < box.n_edges; ++e) {
        const int j = nV + e;
        cols[j].push_back({box.tail[e], -1.0});
        cols[j].push_back({box.head[e], 1.0});
        cols[j].push_back({j, -m + (haveV ? sign * V.edge[e] : 0.0)});
        cols[box.tail[e]].push_back({j, -1.0});
        cols[box.head[e]].push_back({j, 1.0});
    }
    SparseSym H(n, n);
    Eigen::VectorXi nnz(n);
    for (int j = 0; j < n; ++j) nnz[j] = static_cast<int>(cols[j].size());
    H.reserve(nnz);
    for (int j = 0; j < n; ++j) {
        auto& c = cols[j];
        std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first < b.first; });
        for (auto& [i, val] : c) H.insert(i, j) = val;
    }
    H.makeCompressed();
    return H;
}

SparseSym assemble_hamiltonian(const LatticeBox& box, double m, const Potential* V, int sign) {
    SampledPotential s;
    if (V) s = sample_potential(box, *V);
    return assemble_hamiltonian(box, m, s, sign);
}

Cochain loop_state(const LatticeBox& box, int x1, int x2) {
    const int L = box.L;
    if (x1 < 0 || x2 < 0 || x1 >= L || x2 >= L) throw DomainError("plaquette corner outside the box");
    if (box.boundary == Boundary::open && (x1 + 1 >= L || x2 + 1 >= L))
        throw DomainError("plaquette crosses the open boundary");
    Cochain f;
    f.vertex_values = Eigen::VectorXd::Zero(box.n_vertices);
    f.edge_values = Eigen::VectorXd::Zero(box.n_edges);
    const int a = box.vertex(x1, x2);
    const int b = box.vertex((x1 + 1) % L, x2);
    const int c = box.vertex(x1, (x2 + 1) % L);
    // counterclockwise circulation around the plaquette
    f.edge_values[box.h_edge[a]] += 1.0;
    f.edge_values[box.v_edge[b]] += 1.0;
    f.edge_values[box.h_edge[c]] -= 1.0;
    f.edge_values[box.v_edge[a]] -= 1.0;
    return f;
}

double potential_trace_norm(const LatticeBox& box, const Potential& V) {
    auto s = sample_potential(box, V);
    return s.vertex.sum() + s.edge.sum();
}

}  // namespace zdirac
