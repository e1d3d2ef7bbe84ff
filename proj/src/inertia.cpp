#include "zdirac/inertia.hpp"
#include "zdirac/errors.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace zdirac {

namespace {

using Dense = Eigen::MatrixXd;

// Negative count of a dense symmetric matrix via Bunch-Kaufman; the matrix
// is overwritten by its factor.
long dense_negative_count(Dense& S, std::vector<lapack_int>& ipiv, double tol_rel) {
    const lapack_int n = static_cast<lapack_int>(S.rows());
    if (n == 0) return 0;
    const double scale = S.cwiseAbs().maxCoeff();
    ipiv.resize(n);
    const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, S.data(), n, ipiv.data());
    if (info < 0) throw std::runtime_error("dsytrf: illegal argument");
    if (info > 0) throw ShiftCollision("exactly singular pivot in block factorization");
    const double tol = tol_rel * std::max(scale, 1e-300);
    long neg = 0;
    for (lapack_int k = 0; k < n;) {
        if (ipiv[k] > 0) {
            const double d = S(k, k);
            if (std::abs(d) <= tol) throw ShiftCollision("tiny pivot in block factorization");
            if (d < 0) ++neg;
            k += 1;
        } else {
            const double a = S(k, k), b = S(k + 1, k), c = S(k + 1, k + 1);
            const double det = a * c - b * b;
            const double mag = std::max({std::abs(a), std::abs(b), std::abs(c)});
            if (std::abs(det) <= tol * mag) throw ShiftCollision("tiny 2x2 pivot in block factorization");
            if (det < 0) ++neg;
            else if (a + c < 0) neg += 2;
            k += 2;
        }
    }
    return neg;
}

struct Graph {
    // adjacency of the remainder Schur complement, without the diagonal
    std::vector<int> ptr, idx;
    int size() const { return static_cast<int>(ptr.size()) - 1; }
    int degree(int i) const { return ptr[i + 1] - ptr[i]; }
};

Graph graph_of(const SparseSym& S) {
    Graph g;
    g.ptr.assign(S.cols() + 1, 0);
    for (int j = 0; j < S.cols(); ++j) {
        for (SparseSym::InnerIterator it(S, j); it; ++it)
            if (it.row() != j) g.idx.push_back(static_cast<int>(it.row()));
        g.ptr[j + 1] = static_cast<int>(g.idx.size());
    }
    return g;
}

// BFS level structure restricted to the nodes marked with `comp`.
std::vector<std::vector<int>> bfs_levels(const Graph& g, int root, std::vector<int>& stamp, int tag) {
    std::vector<std::vector<int>> levels{{root}};
    stamp[root] = tag;
    while (true) {
        std::vector<int> next;
        for (int u : levels.back())
            for (int p = g.ptr[u]; p < g.ptr[u + 1]; ++p) {
                const int v = g.idx[p];
                if (stamp[v] != tag) {
                    stamp[v] = tag;
                    next.push_back(v);
                }
            }
        if (next.empty()) break;
        std::sort(next.begin(), next.end());
        levels.push_back(std::move(next));
    }
    return levels;
}

// Pseudo-peripheral root: repeat BFS from a minimum-degree node of the last
// level while the eccentricity grows.
std::vector<std::vector<int>> peripheral_levels(const Graph& g, int start, std::vector<int>& stamp, int& tag) {
    auto levels = bfs_levels(g, start, stamp, ++tag);
    for (int iter = 0; iter < 8; ++iter) {
        const auto& last = levels.back();
        int best = last.front();
        for (int v : last)
            if (g.degree(v) < g.degree(best)) best = v;
        auto trial = bfs_levels(g, best, stamp, ++tag);
        if (trial.size() <= levels.size()) break;
        levels = std::move(trial);
    }
    return levels;
}

long block_tridiagonal_count(const SparseSym& S, const std::vector<std::vector<int>>& levels, double tol_rel,
                             long* max_block) {
    const int n = static_cast<int>(S.rows());
    std::vector<int> level_of(n, -1), local(n, -1);
    for (size_t k = 0; k < levels.size(); ++k)
        for (size_t i = 0; i < levels[k].size(); ++i) {
            level_of[levels[k][i]] = static_cast<int>(k);
            local[levels[k][i]] = static_cast<int>(i);
        }
    auto diag_block = [&](size_t k) {
        const int b = static_cast<int>(levels[k].size());
        Dense A = Dense::Zero(b, b);
        for (int j : levels[k])
            for (SparseSym::InnerIterator it(S, j); it; ++it)
                if (level_of[it.row()] == static_cast<int>(k)) A(local[it.row()], local[j]) = it.value();
        return A;
    };
    auto coupling = [&](size_t k) {  // rows: level k, cols: level k+1
        Dense B = Dense::Zero(levels[k].size(), levels[k + 1].size());
        for (int j : levels[k + 1])
            for (SparseSym::InnerIterator it(S, j); it; ++it)
                if (level_of[it.row()] == static_cast<int>(k)) B(local[it.row()], local[j]) = it.value();
        return B;
    };

    long neg = 0;
    std::vector<lapack_int> ipiv;
    Dense Sk = diag_block(0);
    for (size_t k = 0; k < levels.size(); ++k) {
        *max_block = std::max<long>(*max_block, Sk.rows());
        if (k + 1 == levels.size()) {
            neg += dense_negative_count(Sk, ipiv, tol_rel);
            break;
        }
        Dense B = coupling(k);
        Dense X = B;
        Dense next = diag_block(k + 1);
        neg += dense_negative_count(Sk, ipiv, tol_rel);
        const lapack_int b0 = static_cast<lapack_int>(Sk.rows()), b1 = static_cast<lapack_int>(B.cols());
        const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', b0, b1, Sk.data(), b0, ipiv.data(), X.data(), b0);
        if (info != 0) throw std::runtime_error("dsytrs failed");
        cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, b1, b1, b0, -1.0, B.data(), b0, X.data(), b0, 1.0,
                    next.data(), b1);
        Sk = 0.5 * (next + next.transpose());
    }
    return neg;
}

}  // namespace

long inertia_count(const SparseSym& M, double lambda, const InertiaOptions& opt, InertiaStats* stats) {
    if (M.rows() != M.cols()) throw InvalidSize("matrix must be square");
    const int n = static_cast<int>(M.rows());
    std::vector<double> diag(n, -lambda), rowmax(n, 0.0);
    std::vector<int> degree(n, 0);
    for (int j = 0; j < n; ++j)
        for (SparseSym::InnerIterator it(M, j); it; ++it) {
            if (it.row() == j) {
                diag[j] += it.value();
            } else if (it.value() != 0.0) {
                rowmax[j] = std::max(rowmax[j], std::abs(it.value()));
                ++degree[j];
            }
        }

    // greedy independent set of safe diagonal pivots, low degree first
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return degree[a] < degree[b]; });
    std::vector<char> chosen(n, 0), blocked(n, 0);
    long neg = 0, n_elim = 0;
    for (int i : order) {
        if (blocked[i]) continue;
        const double d = std::abs(diag[i]);
        if (d == 0.0 || d < opt.pivot_ratio * rowmax[i]) continue;
        chosen[i] = 1;
        ++n_elim;
        if (diag[i] < 0) ++neg;
        for (SparseSym::InnerIterator it(M, i); it; ++it) blocked[it.row()] = 1;
    }

    std::vector<int> rem_index(n, -1);
    int nr = 0;
    for (int i = 0; i < n; ++i)
        if (!chosen[i]) rem_index[i] = nr++;

    // Schur complement on the remainder: A_RR - A_RI D^{-1} A_IR
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(M.nonZeros()) * 2);
    for (int j = 0; j < n; ++j) {
        if (chosen[j]) {
            const double inv = 1.0 / diag[j];
            for (SparseSym::InnerIterator a(M, j); a; ++a) {
                if (a.row() == j) continue;
                for (SparseSym::InnerIterator b(M, j); b; ++b) {
                    if (b.row() == j) continue;
                    trip.emplace_back(rem_index[a.row()], rem_index[b.row()], -a.value() * b.value() * inv);
                }
            }
        } else {
            const int jr = rem_index[j];
            trip.emplace_back(jr, jr, diag[j]);
            for (SparseSym::InnerIterator it(M, j); it; ++it)
                if (it.row() != j && !chosen[it.row()]) trip.emplace_back(rem_index[it.row()], jr, it.value());
        }
    }
    SparseSym S(nr, nr);
    S.setFromTriplets(trip.begin(), trip.end());
    S.prune(0.0);  // also drops numerically cancelled couplings
    // keep every diagonal slot so dense blocks see it even when it is zero
    const Graph g = graph_of(S);

    std::vector<int> stamp(nr, 0), seen(nr, 0);
    int tag = 0;
    long comps = 0, max_block = 0;
    std::vector<int> rorder(nr);
    std::iota(rorder.begin(), rorder.end(), 0);
    std::stable_sort(rorder.begin(), rorder.end(), [&](int a, int b) { return g.degree(a) < g.degree(b); });
    for (int start : rorder) {
        if (seen[start]) continue;
        auto levels = peripheral_levels(g, start, stamp, tag);
        for (auto& lv : levels)
            for (int v : lv) seen[v] = 1;
        ++comps;
        neg += block_tridiagonal_count(S, levels, opt.collision_tol, &max_block);
    }
    if (stats) *stats = {n_elim, nr, comps, max_block};
    return neg;
}

long inertia_count_nudged(const SparseSym& M, double lambda, double nudge, int retries, const InertiaOptions& opt) {
    for (int attempt = 0;; ++attempt) {
        // offsets 0, +h, -h, +2h, ...
        const double off = attempt == 0 ? 0.0 : ((attempt + 1) / 2) * nudge * (attempt % 2 ? 1.0 : -1.0);
        try {
            return inertia_count(M, lambda + off, opt);
        } catch (const ShiftCollision&) {
            if (attempt >= retries) throw;
        }
    }
}

}  // namespace zdirac
