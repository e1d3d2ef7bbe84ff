#include "zdirac/toroidal.hpp"
#include "zdirac/errors.hpp"
#include "zdirac/level_sets.hpp"

#include <cblas.h>
#include <fftw3.h>
#include <lapacke.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <tuple>

namespace zdirac {

using cd = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

long ipow(long b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Row-major enumeration of [-R, R]^d.
struct Box {
    int d, R;
    long size;
    Box(int d_, int R_) : d(d_), R(R_), size(ipow(2L * R_ + 1, d_)) {}
    void coords(long k, MultiIndex& mu) const {
        mu.resize(d);
        for (int i = d - 1; i >= 0; --i) {
            mu[i] = static_cast<int>(k % (2 * R + 1)) - R;
            k /= (2 * R + 1);
        }
    }
    long flat(const MultiIndex& mu) const {
        long k = 0;
        for (int i = 0; i < d; ++i) k = k * (2 * R + 1) + (mu[i] + R);
        return k;
    }
    bool contains(const MultiIndex& mu) const {
        for (int x : mu)
            if (x < -R || x > R) return false;
        return true;
    }
};

double japanese(const MultiIndex& mu) {
    double s = 1.0;
    for (int x : mu) s += double(x) * x;
    return std::sqrt(s);
}

}  // namespace

double DiscreteSymbol::operator()(const MultiIndex& mu) const {
    if (family == Family::power_decay) return Gamma * std::pow(japanese(mu), -gamma);
    auto it = values.find(mu);
    return it == values.end() ? 0.0 : it->second;
}

DiscreteSymbol DiscreteSymbol::power(int d, double Gamma, double gamma) {
    DiscreteSymbol v;
    v.d = d;
    v.family = Family::power_decay;
    v.Gamma = Gamma;
    v.gamma = gamma;
    return v;
}

DiscreteSymbol DiscreteSymbol::table(int d, std::map<MultiIndex, double> values) {
    DiscreteSymbol v;
    v.d = d;
    v.family = Family::table;
    v.Gamma = 0.0;
    v.gamma = 0.0;
    v.values = std::move(values);
    return v;
}

SymbolClassReport check_symbol_class(const DiscreteSymbol& v, double gamma, double rho, int alpha_max, int radius) {
    if (alpha_max < 0 || alpha_max > 4) throw InvalidSize("alpha_max must lie in [0, 4]");
    if (radius < 2 || radius > 10000) throw InvalidSize("radius must lie in [2, 10^4]");
    const int d = v.d;
    SymbolClassReport rep;
    // multi-indices with |alpha| <= alpha_max
    Box abox(d, alpha_max);
    MultiIndex a;
    for (long k = 0; k < abox.size; ++k) {
        abox.coords(k, a);
        int s = 0;
        bool ok = true;
        for (int x : a) {
            if (x < 0) ok = false;
            s += x;
        }
        if (ok && s <= alpha_max) rep.alphas.push_back(a);
    }
    auto binom = [](int n, int k) {
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    Box ball(d, radius);
    MultiIndex mu, beta, shifted(d);
    for (const auto& alpha : rep.alphas) {
        int order = 0;
        for (int x : alpha) order += x;
        Box bbox(d, alpha_max);
        std::vector<std::pair<MultiIndex, double>> stencil;
        for (long k = 0; k < bbox.size; ++k) {
            bbox.coords(k, beta);
            double w = 1.0;
            int sb = 0;
            bool ok = true;
            for (int i = 0; i < d; ++i) {
                if (beta[i] < 0 || beta[i] > alpha[i]) ok = false;
                else {
                    w *= binom(alpha[i], beta[i]);
                    sb += beta[i];
                }
            }
            if (!ok) continue;
            if ((order - sb) % 2) w = -w;
            stencil.push_back({beta, w});
        }
        double C = 0.0, Ch = 0.0;
        for (long k = 0; k < ball.size; ++k) {
            ball.coords(k, mu);
            double D = 0.0;
            for (const auto& [b, w] : stencil) {
                for (int i = 0; i < d; ++i) shifted[i] = mu[i] + b[i];
                D += w * v(shifted);
            }
            const double c = std::abs(D) * std::pow(japanese(mu), gamma + rho * order);
            C = std::max(C, c);
            int inf = 0;
            for (int x : mu) inf = std::max(inf, std::abs(x));
            if (2 * inf <= radius) Ch = std::max(Ch, c);
        }
        rep.C.push_back(C);
        rep.C_half.push_back(Ch);
        const bool grow = C > 1.5 * Ch && C > 1e-300;
        rep.growing.push_back(grow);
        if (grow) rep.bounded = false;
    }
    return rep;
}

cd CoefficientTable::at(const MultiIndex& mu) const {
    Box b(d, K);
    if (!b.contains(mu)) throw DomainError("coefficient index outside the table");
    return c[b.flat(mu)];
}

CoefficientTable fourier_coefficients(const GridSamples& B, int cutoff) {
    const int d = B.d, N = B.N;
    if (cutoff < 0) throw InvalidSize("cutoff must be nonnegative");
    if (N < 4 * cutoff + 4)
        throw ResolutionError("grid of " + std::to_string(N) + " points is too coarse for cutoff " +
                              std::to_string(cutoff) + " (need N >= 4K + 4)");
    const long total = ipow(N, d);
    if (static_cast<long>(B.values.size()) != total) throw LengthMismatch("grid sample count does not match N^d");
    fftw_complex* buf = fftw_alloc_complex(total);
    std::vector<int> dims(d, N);
    fftw_plan plan = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    for (long k = 0; k < total; ++k) {
        buf[k][0] = B.values[k].real();
        buf[k][1] = B.values[k].imag();
    }
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    CoefficientTable t;
    t.d = d;
    t.K = cutoff;
    Box box(d, cutoff);
    t.c.resize(box.size);
    const double norm = 1.0 / static_cast<double>(total);
    MultiIndex mu;
    for (long k = 0; k < box.size; ++k) {
        box.coords(k, mu);
        long idx = 0;
        for (int i = 0; i < d; ++i) idx = idx * N + ((mu[i] % N) + N) % N;
        t.c[k] = cd(buf[idx][0], buf[idx][1]) * norm;
    }
    fftw_free(buf);
    return t;
}

namespace {

struct CoefComponent {
    CoefficientTable table;    // on [-2M, 2M]^d
    std::vector<double> v;     // on [-M, M]^d
    double weight = 1.0;       // multiplicity factor in the reduced blocks
};

// A basis vector of a block: combination of at most two momentum vectors.
struct BasisVec {
    long i0, i1;  // i1 < 0 when single
    double w0, w1;
};

template <class Mat, class Scalar>
void accumulate_block(Mat& C, const std::vector<BasisVec>& basis, const CoefComponent& comp, const std::vector<long>& base,
                      const std::vector<long>& off, int panel, bool real) {
    const long nb = static_cast<long>(basis.size());
    const long na = static_cast<long>(comp.v.size());
    std::vector<long> pos, neg;
    for (long a = 0; a < na; ++a) {
        if (comp.v[a] > 0) pos.push_back(a);
        else if (comp.v[a] < 0) neg.push_back(a);
    }
    Mat W(nb, panel);
    for (int part = 0; part < 2; ++part) {
        const auto& cols = part == 0 ? pos : neg;
        const double alpha = (part == 0 ? 1.0 : -1.0) * comp.weight;
        for (size_t start = 0; start < cols.size(); start += panel) {
            const long w = std::min<long>(panel, static_cast<long>(cols.size() - start));
            for (long j = 0; j < w; ++j) {
                const long a = cols[start + j];
                const double sv = std::sqrt(std::abs(comp.v[a]));
                const long oa = off[a];
                for (long r = 0; r < nb; ++r) {
                    const auto& b = basis[r];
                    cd val = b.w0 * comp.table.c[base[b.i0] - oa];
                    if (b.i1 >= 0) val += b.w1 * comp.table.c[base[b.i1] - oa];
                    if constexpr (std::is_same_v<Scalar, double>) W(r, j) = sv * val.real();
                    else W(r, j) = sv * val;
                }
            }
            if constexpr (std::is_same_v<Scalar, double>) {
                cblas_dsyrk(CblasColMajor, CblasLower, CblasNoTrans, nb, w, alpha, W.data(), nb, 1.0, C.data(), nb);
            } else {
                cblas_zherk(CblasColMajor, CblasLower, CblasNoTrans, nb, w, alpha, W.data(), nb, 1.0, C.data(), nb);
            }
        }
    }
    (void)real;
}

ToroidalOperator assemble_from_coefficients(std::vector<CoefComponent> comps, int d, int M,
                                            const std::vector<std::vector<BasisVec>>& blocks, int panel,
                                            double tail_bound) {
    ToroidalOperator op;
    op.d = d;
    op.M = M;
    Box box(d, M);
    op.dim = box.size;
    op.tail_bound = tail_bound;
    double scale = 0.0, imag = 0.0;
    for (const auto& c : comps)
        for (const auto& x : c.table.c) {
            scale = std::max(scale, std::abs(x));
            imag = std::max(imag, std::abs(x.imag()));
        }
    op.real = imag <= 1e-13 * std::max(scale, 1e-300);

    // table index of mu - alpha = base[mu] - off[alpha]
    const int K = 2 * M;
    const long stride = 2L * K + 1;
    std::vector<long> base(box.size), off(box.size);
    MultiIndex mu;
    for (long k = 0; k < box.size; ++k) {
        box.coords(k, mu);
        long b = 0, o = 0;
        for (int i = 0; i < d; ++i) {
            b = b * stride + (mu[i] + K);
            o = o * stride + mu[i];
        }
        base[k] = b;
        off[k] = o;
    }
    for (const auto& blk : blocks) {
        const long nb = static_cast<long>(blk.size());
        if (op.real) {
            Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nb, nb);
            for (const auto& c : comps)
                if (c.weight != 0.0) accumulate_block<Eigen::MatrixXd, double>(C, blk, c, base, off, panel, true);
            C.triangularView<Eigen::StrictlyUpper>() = C.transpose();
            op.real_blocks.push_back(std::move(C));
        } else {
            Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(nb, nb);
            for (const auto& c : comps)
                if (c.weight != 0.0) accumulate_block<Eigen::MatrixXcd, cd>(C, blk, c, base, off, panel, false);
            C.triangularView<Eigen::StrictlyUpper>() = C.adjoint();
            op.complex_blocks.push_back(std::move(C));
        }
    }
    return op;
}

std::vector<BasisVec> identity_basis(long n) {
    std::vector<BasisVec> b(n);
    for (long i = 0; i < n; ++i) b[i] = {i, -1, 1.0, 0.0};
    return b;
}

// Even/odd sectors of the swap (mu1, mu2) -> (mu2, mu1) on [-M, M]^2.
std::vector<std::vector<BasisVec>> swap_sectors(int M) {
    Box box(2, M);
    const double h = std::sqrt(0.5);
    std::vector<BasisVec> even, odd;
    for (int a = -M; a <= M; ++a)
        for (int b = a; b <= M; ++b) {
            const long i = box.flat({a, b});
            if (a == b) {
                even.push_back({i, -1, 1.0, 0.0});
            } else {
                const long j = box.flat({b, a});
                even.push_back({i, j, h, h});
                odd.push_back({i, j, h, -h});
            }
        }
    return {even, odd};
}

double tail_sum(const DiscreteSymbol& v, int M) {
    const int d = v.d;
    if (v.family == DiscreteSymbol::Family::table) {
        Box box(d, M);
        double s = 0.0;
        for (const auto& [mu, val] : v.values)
            if (!box.contains(mu)) s += std::abs(val);
        return s;
    }
    // shells |alpha|_inf = k, bounded by their largest value, then an integral tail
    const long kmax = 64L * M;
    double s = 0.0;
    for (long k = M + 1; k <= kmax; ++k) {
        const double count = static_cast<double>(ipow(2 * k + 1, d) - ipow(2 * k - 1, d));
        s += count * std::abs(v.Gamma) * std::pow(1.0 + double(k) * k, -0.5 * v.gamma);
    }
    if (v.gamma > d)
        s += 2.0 * d * std::pow(2.0, d - 1) * std::abs(v.Gamma) * std::pow(double(kmax), d - v.gamma) / (v.gamma - d);
    return s;
}

std::vector<double> symbol_on_box(const DiscreteSymbol& v, int d, int M) {
    Box box(d, M);
    std::vector<double> out(box.size);
    MultiIndex mu;
    for (long k = 0; k < box.size; ++k) {
        box.coords(k, mu);
        out[k] = v(mu);
    }
    return out;
}

// Swap image of a table on [-K,K]^2.
std::vector<cd> swapped(const CoefficientTable& t) {
    const long s = 2L * t.K + 1;
    std::vector<cd> out(t.c.size());
    for (long i = 0; i < s; ++i)
        for (long j = 0; j < s; ++j) out[i * s + j] = t.c[j * s + i];
    return out;
}

std::vector<double> swapped(const std::vector<double>& v, int M) {
    const long s = 2L * M + 1;
    std::vector<double> out(v.size());
    for (long i = 0; i < s; ++i)
        for (long j = 0; j < s; ++j) out[i * s + j] = v[j * s + i];
    return out;
}

template <class A, class B>
bool close(const A& x, const B& y, double rel) {
    double scale = 0.0, diff = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        scale = std::max(scale, std::abs(x[i]));
        diff = std::max(diff, std::abs(x[i] - y[i]));
    }
    return diff <= rel * std::max(scale, 1e-300);
}

// Assign pairing weights; false when the swap is not a symmetry of Psi.
bool pair_components(std::vector<CoefComponent>& comps, int M) {
    const size_t n = comps.size();
    std::vector<int> partner(n, -1);
    for (size_t k = 0; k < n; ++k) {
        if (partner[k] >= 0) continue;
        const auto ct = swapped(comps[k].table);
        const auto vt = swapped(comps[k].v, M);
        for (size_t j = k; j < n; ++j) {
            if (partner[j] >= 0) continue;
            if (close(comps[j].table.c, ct, 1e-12) && close(comps[j].v, vt, 1e-14)) {
                partner[k] = static_cast<int>(j);
                partner[j] = static_cast<int>(k);
                break;
            }
        }
        if (partner[k] < 0) return false;
    }
    for (size_t k = 0; k < n; ++k) {
        if (partner[k] == static_cast<int>(k)) comps[k].weight = 1.0;
        else comps[k].weight = partner[k] > static_cast<int>(k) ? 2.0 : 0.0;
    }
    return true;
}

}  // namespace

Eigen::MatrixXcd ToroidalOperator::dense() const {
    if (is_reduced()) throw DomainError("operator is stored by symmetry sectors");
    if (real) return real_blocks.at(0).cast<cd>();
    return complex_blocks.at(0);
}

double ToroidalOperator::hermiticity_residual() const {
    double r = 0.0;
    for (const auto& b : real_blocks) r = std::max(r, (b - b.transpose()).cwiseAbs().maxCoeff());
    for (const auto& b : complex_blocks) r = std::max(r, (b - b.adjoint()).cwiseAbs().maxCoeff());
    return r;
}

ToroidalOperator assemble_toroidal(const std::vector<ToroidalComponent>& components, int M, const AssembleOptions& opt) {
    if (M < 4) throw InvalidSize("truncation radius must be >= 4");
    if (components.empty()) throw InvalidSize("no components");
    const int d = components[0].B.d;
    std::vector<CoefComponent> comps;
    double tail = 0.0;
    for (const auto& c : components) {
        if (c.B.d != d || c.v.d != d) throw LengthMismatch("components disagree on the dimension");
        CoefComponent cc;
        cc.table = fourier_coefficients(c.B, 2 * M);
        cc.v = symbol_on_box(c.v, d, M);
        double norm2 = 0.0;
        for (const auto& x : c.B.values) norm2 += std::norm(x);
        norm2 /= static_cast<double>(c.B.values.size());
        tail += tail_sum(c.v, M) * norm2;
        comps.push_back(std::move(cc));
    }
    std::vector<std::vector<BasisVec>> blocks;
    if (opt.use_symmetry && d == 2 && pair_components(comps, M)) {
        blocks = swap_sectors(M);
    } else {
        for (auto& c : comps) c.weight = 1.0;
        blocks = {identity_basis(ipow(2L * M + 1, d))};
    }
    return assemble_from_coefficients(std::move(comps), d, M, blocks, opt.panel, tail);
}

ToroidalOperator assemble_toroidal_diag(int l, const std::vector<std::vector<cd>>& B,
                                        const std::vector<DiscreteSymbol>& v, int M) {
    if (M < 1) throw InvalidSize("truncation radius must be >= 1");
    if (B.size() != v.size() || v.empty()) throw LengthMismatch("need one constant row per symbol");
    const int d = v[0].d;
    int q = static_cast<int>(std::lround(std::pow(double(l), 1.0 / d)));
    if (l < 1 || ipow(q, d) != l) throw DomainError("l = " + std::to_string(l) + " is not a d-th power");
    for (const auto& row : B)
        if (static_cast<int>(row.size()) != l) throw LengthMismatch("each component needs l cube constants");

    const int K = 2 * M;
    Box tbox(d, K), cube_box(d, 0);
    std::vector<CoefComponent> comps;
    MultiIndex x, j(d);
    const auto vbox = [&] {
        std::vector<std::vector<double>> out;
        for (const auto& s : v) out.push_back(symbol_on_box(s, d, M));
        return out;
    }();
    for (int cube = 0; cube < l; ++cube) {
        // cube coordinates, row-major
        int r = cube;
        for (int i = d - 1; i >= 0; --i) {
            j[i] = r % q;
            r /= q;
        }
        CoefComponent cc;
        cc.v.assign(vbox[0].size(), 0.0);
        bool any = false;
        for (size_t k = 0; k < v.size(); ++k) {
            const double w = std::norm(B[k][cube]);
            if (w == 0.0) continue;
            any = true;
            for (size_t a = 0; a < cc.v.size(); ++a) cc.v[a] += w * vbox[k][a];
        }
        if (!any) continue;
        cc.table.d = d;
        cc.table.K = K;
        cc.table.c.resize(tbox.size);
        for (long k = 0; k < tbox.size; ++k) {
            tbox.coords(k, x);
            cd val = 1.0;
            for (int i = 0; i < d; ++i) {
                const double a = double(j[i]) / q, b = double(j[i] + 1) / q;
                if (x[i] == 0) val *= (b - a);
                else
                    val *= (std::polar(1.0, -2.0 * pi * x[i] * a) - std::polar(1.0, -2.0 * pi * x[i] * b)) /
                           cd(0.0, 2.0 * pi * x[i]);
            }
            cc.table.c[k] = val;
        }
        comps.push_back(std::move(cc));
    }
    if (comps.empty()) {
        ToroidalOperator op;
        op.d = d;
        op.M = M;
        op.dim = ipow(2L * M + 1, d);
        op.real_blocks.push_back(Eigen::MatrixXd::Zero(op.dim, op.dim));
        return op;
    }
    return assemble_from_coefficients(std::move(comps), d, M, {identity_basis(ipow(2L * M + 1, d))}, 256, 0.0);
}

std::vector<double> toroidal_spectrum(const ToroidalOperator& op) {
    std::vector<double> all;
    all.reserve(op.dim);
    for (const auto& b : op.real_blocks) {
        Eigen::MatrixXd a = b;
        const lapack_int n = static_cast<lapack_int>(a.rows());
        if (n == 0) continue;
        std::vector<double> w(n);
        const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
        if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
        all.insert(all.end(), w.begin(), w.end());
    }
    for (const auto& b : op.complex_blocks) {
        Eigen::MatrixXcd a = b;
        const lapack_int n = static_cast<lapack_int>(a.rows());
        if (n == 0) continue;
        std::vector<double> w(n);
        const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                                               reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
        if (info != 0) throw std::runtime_error("zheevd failed with info " + std::to_string(info));
        all.insert(all.end(), w.begin(), w.end());
    }
    std::sort(all.begin(), all.end(), std::greater<>());
    return all;
}

std::pair<long, long> eigen_counting(const std::vector<double>& spectrum, double lambda) {
    if (!(lambda > 1e-12)) throw DomainError("counting level must exceed 1e-12");
    long np = 0, nm = 0;
    for (double e : spectrum) {
        if (e > lambda) ++np;
        if (e < -lambda) ++nm;
    }
    return {np, nm};
}

std::pair<long, long> eigen_counting(const ToroidalOperator& op, double lambda) {
    return eigen_counting(toroidal_spectrum(op), lambda);
}

long lattice_count_scalar(double gamma, double lambda) {
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    if (lambda >= 1.0) return 0;
    // <mu>^{-gamma} > lambda  <=>  |mu|^2 < T - 1
    const double T = std::pow(lambda, -2.0 / gamma);
    const double R = std::sqrt(T - 1.0);
    const double side = 2.0 * std::floor(R) + 1.0;
    if (side * side > lattice_count_budget)
        throw BudgetError("enumeration of " + std::to_string(side * side) + " points exceeds the budget");
    const long r = static_cast<long>(std::floor(R));
    long count = 0;
    for (long m1 = -r; m1 <= r; ++m1) {
        const double rem = T - 1.0 - double(m1) * m1;
        if (rem <= 0.0) continue;
        long k = static_cast<long>(std::floor(std::sqrt(rem)));
        while (k > 0 && double(k) * k >= rem) --k;
        while (double(k + 1) * (k + 1) < rem) ++k;
        count += 2 * k + 1;
    }
    return count;
}

double smallest_feasible_lambda(double gamma) {
    const double rmax = std::floor((std::sqrt(lattice_count_budget) - 1.0) / 2.0);  // floor(R) <= rmax
    return std::pow(1.0 + (rmax + 0.5) * (rmax + 0.5), -0.5 * gamma);
}

WeakSchattenEstimate weak_schatten(const std::vector<double>& s, double p) {
    if (s.empty()) throw InvalidSize("empty singular value list");
    if (!(p > 0.0)) throw DomainError("p must be positive");
    for (size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i + 1] > s[i] * (1.0 + 1e-12) + 1e-300) throw DomainError("singular values must be nonincreasing");
    WeakSchattenEstimate est;
    est.p = p;
    est.n_used = static_cast<long>(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        const double val = std::pow(double(i + 1), 1.0 / p) * s[i];
        if (val > est.quasi_norm) {
            est.quasi_norm = val;
            est.argmax_n = static_cast<long>(i + 1);
        }
    }
    return est;
}

CountingLawReport verify_counting_law(const std::vector<ToroidalComponent>& components, const std::vector<int>& M_list,
                                  const WindowSpec& window, double gamma, int d, double c_plus, double c_minus) {
    if (!(gamma > d)) throw OutOfValidityRange("the counting law needs gamma > d");
    std::vector<GridSamples> B;
    std::vector<double> G;
    for (const auto& c : components) {
        if (c.v.family != DiscreteSymbol::Family::power_decay || c.v.gamma != gamma || c.v.d != d)
            throw OutOfValidityRange("every symbol must be Gamma <mu>^{-gamma} with the common gamma");
        B.push_back(c.B);
        G.push_back(c.v.Gamma);
    }
    CountingLawReport rep;
    rep.gamma = gamma;
    rep.d = d;
    std::tie(rep.target_plus, rep.target_minus) = asymptotic_constant_CB(gamma, d, c_plus, c_minus, B, G);
    for (int M : M_list) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> spec;
        {
            const auto op = assemble_toroidal(components, M);
            spec = toroidal_spectrum(op);
        }
        CountingLawEntry e;
        e.M = M;
        e.dim = static_cast<long>(spec.size());
        const long lo_idx = std::max<long>(0, static_cast<long>(window.saturation_fraction * e.dim) - 1);
        const long hi_idx = std::min<long>(window.top_count - 1, e.dim - 1);
        const double lam_hi = spec[hi_idx], lam_lo = spec[lo_idx];
        if (!(lam_lo > 0.0 && lam_hi > lam_lo))
            throw FitWindowError("empty counting window at M = " + std::to_string(M) +
                                 ": the saturation index must exceed top_count");
        for (int i = 0; i < window.n_points; ++i) {
            const double t = window.n_points == 1 ? 0.0 : double(i) / (window.n_points - 1);
            const double lam = lam_lo * std::pow(lam_hi / lam_lo, t);
            const long np = eigen_counting(spec, lam).first;
            e.lambda.push_back(lam);
            e.n_plus.push_back(np);
            e.scaled.push_back(std::pow(lam, double(d) / gamma) * np);
        }
        auto sorted = e.scaled;
        std::sort(sorted.begin(), sorted.end());
        const size_t n = sorted.size();
        e.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        e.deviation = std::abs(e.median - rep.target_plus) / rep.target_plus;
        e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.entries.push_back(std::move(e));
    }
    for (size_t i = 1; i < rep.entries.size(); ++i)
        if (rep.entries[i].deviation > rep.entries[i - 1].deviation) rep.trend_nonincreasing = false;
    return rep;
}

}  // namespace zdirac
