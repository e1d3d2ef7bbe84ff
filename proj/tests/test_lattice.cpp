#include "doctest.h"
#include "oracles.hpp"

#include "zdirac/errors.hpp"
#include "zdirac/fiber.hpp"
#include "zdirac/lattice.hpp"

#include <cmath>
#include <random>

using namespace zdirac;

TEST_CASE("box sizes") {
    CHECK(build_lattice(4, Boundary::periodic).total_dim() == 48);
    auto open = build_lattice(4, Boundary::open);
    CHECK(open.total_dim() == 40);
    CHECK(open.n_edges == 24);
    CHECK_THROWS_AS(build_lattice(1, Boundary::periodic), InvalidSize);
    for (int L : {2, 3, 7}) {
        CHECK(build_lattice(L, Boundary::periodic).n_edges == 2 * L * L);
        CHECK(build_lattice(L, Boundary::open).n_edges == 2 * L * (L - 1));
    }
}

TEST_CASE("edges are oriented toward +delta") {
    for (auto bc : {Boundary::periodic, Boundary::open}) {
        auto box = build_lattice(5, bc);
        for (int e = 0; e < box.n_edges; ++e) {
            auto t = box.coords(box.tail[e]), h = box.coords(box.head[e]);
            int k = box.direction[e];
            CHECK(h[k] == (t[k] + 1) % 5);
            CHECK(h[1 - k] == t[1 - k]);
        }
    }
}

TEST_CASE("coboundary") {
    auto box = build_lattice(6, Boundary::periodic);
    Eigen::VectorXd c = Eigen::VectorXd::Constant(box.n_vertices, 3.7);
    CHECK(apply_coboundary(box, c).cwiseAbs().maxCoeff() == 0.0);

    // indicator of x0: +1 on edges entering, -1 on edges leaving
    const int x0 = box.vertex(2, 3);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(box.n_vertices);
    f[x0] = 1.0;
    auto df = apply_coboundary(box, f);
    for (int e = 0; e < box.n_edges; ++e) {
        auto t = box.coords(box.tail[e]);
        auto h = box.coords(box.head[e]);
        double want = 0.0;
        if (h[0] == 2 && h[1] == 3) want = 1.0;
        if (t[0] == 2 && t[1] == 3) want = -1.0;
        CHECK(df[e] == want);
    }
    CHECK((df.array() == 1.0).count() == 2);
    CHECK((df.array() == -1.0).count() == 2);

    CHECK_THROWS_AS(apply_coboundary(box, Eigen::VectorXd(3)), LengthMismatch);
    CHECK_THROWS_AS(apply_coboundary_adjoint(box, Eigen::VectorXd(3)), LengthMismatch);
}

TEST_CASE("adjointness and brute-force adjoint") {
    std::mt19937 rng(0);
    std::normal_distribution<double> nd;
    for (auto bc : {Boundary::periodic, Boundary::open})
        for (int L : {3, 8}) {
            auto box = build_lattice(L, bc);
            for (int trial = 0; trial < 10; ++trial) {
                Eigen::VectorXd f(box.n_vertices), g(box.n_edges);
                for (auto& x : f) x = nd(rng);
                for (auto& x : g) x = nd(rng);
                CHECK(std::abs(apply_coboundary(box, f).dot(g) - f.dot(apply_coboundary_adjoint(box, g))) <= 1e-13);

                // d*g(x) = -sum over oriented edges leaving x of g, with g(reversed) = -g
                auto dg = apply_coboundary_adjoint(box, g);
                for (int v = 0; v < box.n_vertices; ++v) {
                    auto x = box.coords(v);
                    double s = 0.0;
                    const int dx[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                    for (auto& dd : dx) {
                        int y1 = x[0] + dd[0], y2 = x[1] + dd[1];
                        if (bc == Boundary::periodic) {
                            y1 = (y1 + L) % L;
                            y2 = (y2 + L) % L;
                        } else if (y1 < 0 || y2 < 0 || y1 >= L || y2 >= L) {
                            continue;
                        }
                        // stored edge between x and y, with its stored orientation
                        for (int e = 0; e < box.n_edges; ++e) {
                            if (box.tail[e] == v && box.head[e] == box.vertex(y1, y2) &&
                                (dd[0] + dd[1] > 0 || L == 2))
                                s -= g[e];  // leaving along the stored orientation
                            else if (box.head[e] == v && box.tail[e] == box.vertex(y1, y2) &&
                                     (dd[0] + dd[1] < 0 || L == 2))
                                s += g[e];  // reversed edge carries -g
                        }
                    }
                    CHECK(std::abs(s - dg[v]) <= 1e-15 * 8);
                }
            }
        }
}

TEST_CASE("H0 spectrum at L=4, m=1 matches the fiber") {
    auto box = build_lattice(4, Boundary::periodic);
    auto H = assemble_hamiltonian(box, 1.0);
    auto ev = oracle::dense_eigenvalues(H);
    std::vector<double> want;
    for (int k1 = 0; k1 < 4; ++k1)
        for (int k2 = 0; k2 < 4; ++k2) {
            auto b = band_values(Torus(k1 / 4.0, k2 / 4.0), 1.0);
            want.insert(want.end(), {b.z_minus, b.z_zero, b.z_plus});
        }
    std::sort(want.begin(), want.end());
    REQUIRE(static_cast<long>(want.size()) == ev.size());
    for (long i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - want[i]) <= 1e-10);
}

TEST_CASE("H0 is exactly symmetric with at most five nonzeros per row") {
    for (auto bc : {Boundary::periodic, Boundary::open}) {
        auto box = build_lattice(5, bc);
        auto H = assemble_hamiltonian(box, 0.7);
        SparseSym Ht = H.transpose();
        CHECK((H - Ht).norm() == 0.0);
        for (int j = 0; j < H.cols(); ++j) CHECK(H.col(j).nonZeros() <= 5);
    }
}

TEST_CASE("m = 0 spectrum is symmetric and inside [-sqrt8, sqrt8]") {
    for (auto bc : {Boundary::periodic, Boundary::open}) {
        auto box = build_lattice(6, bc);
        auto ev = oracle::dense_eigenvalues(assemble_hamiltonian(box, 0.0));
        const long n = ev.size();
        for (long i = 0; i < n; ++i) {
            CHECK(std::abs(ev[i] + ev[n - 1 - i]) <= 1e-10);
            CHECK(std::abs(ev[i]) <= std::sqrt(8.0) + 1e-10);
        }
    }
}

TEST_CASE("H0 squared is block diagonal") {
    auto box = build_lattice(5, Boundary::periodic);
    const double m = 0.8;
    Eigen::MatrixXd H = Eigen::MatrixXd(assemble_hamiltonian(box, m));
    Eigen::MatrixXd H2 = H * H;
    const int nV = box.n_vertices;
    CHECK(H2.topRightCorner(nV, box.n_edges).cwiseAbs().maxCoeff() == 0.0);
    // vertex block: d*d + m^2
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(box.n_edges, nV);
    for (int e = 0; e < box.n_edges; ++e) {
        D(e, box.head[e]) += 1.0;
        D(e, box.tail[e]) -= 1.0;
    }
    Eigen::MatrixXd want = D.transpose() * D + m * m * Eigen::MatrixXd::Identity(nV, nV);
    CHECK((H2.topLeftCorner(nV, nV) - want).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("rank-one vertex impulse interlaces") {
    auto box = build_lattice(5, Boundary::open);
    auto V = Potential::vertex_impulse(0.9);
    auto e0 = oracle::dense_eigenvalues(assemble_hamiltonian(box, 1.0));
    auto e1 = oracle::dense_eigenvalues(assemble_hamiltonian(box, 1.0, &V, +1));
    const long n = e0.size();
    for (long i = 0; i < n; ++i) {
        CHECK(e1[i] >= e0[i] - 1e-10);
        if (i + 1 < n) CHECK(e1[i] <= e0[i + 1] + 1e-10);
    }
}

TEST_CASE("negative potential is rejected") {
    auto box = build_lattice(4, Boundary::open);
    Potential V;
    V.table[1][{0, 0}] = -0.1;
    CHECK_THROWS_AS(assemble_hamiltonian(box, 1.0, &V, +1), DomainError);
}

TEST_CASE("loop states") {
    for (auto bc : {Boundary::periodic, Boundary::open}) {
        auto box = build_lattice(6, bc);
        for (double m : {0.0, 1.0}) {
            auto H = assemble_hamiltonian(box, m);
            auto f = loop_state(box, 2, 2);
            CHECK(f.inner(f) == 4.0);
            Eigen::VectorXd x = f.stacked();
            Eigen::VectorXd r = H * x + m * x;
            CHECK(r.norm() <= 1e-14);
            CHECK(apply_coboundary_adjoint(box, f.edge_values).norm() == 0.0);
        }
        auto a = loop_state(box, 0, 0), b = loop_state(box, 3, 3);
        CHECK(a.inner(b) == 0.0);
    }
    auto open = build_lattice(6, Boundary::open);
    CHECK_THROWS_AS(loop_state(open, 5, 2), DomainError);
    CHECK_NOTHROW(loop_state(build_lattice(6, Boundary::periodic), 5, 5));
}

TEST_CASE("trace norm") {
    auto box = build_lattice(8, Boundary::open);
    CHECK(potential_trace_norm(box, Potential::vertex_impulse(2.5)) == 2.5);
    Potential edge;
    edge.table[2][{1, -1}] = 1.75;
    CHECK(potential_trace_norm(box, edge) == 1.75);

    auto big = build_lattice(64, Boundary::open);
    auto V = Potential::dirac_power(4.0, 1.0, 1.0, 0.0);
    V.power[0] = {1.0, 4.0};
    double brute = 0.0;
    const int c = 32;
    for (int x1 = 0; x1 < 64; ++x1)
        for (int x2 = 0; x2 < 64; ++x2) {
            const double w = std::pow(1.0 + double(x1 - c) * (x1 - c) + double(x2 - c) * (x2 - c), -2.0);
            brute += w;                  // vertex
            if (x1 + 1 < 64) brute += w;  // horizontal edge from x
            if (x2 + 1 < 64) brute += w;  // vertical edge from x
        }
    CHECK(std::abs(potential_trace_norm(big, V) - brute) <= 1e-12);
}
