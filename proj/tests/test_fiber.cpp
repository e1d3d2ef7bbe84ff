#include "doctest.h"

#include "zdirac/errors.hpp"
#include "zdirac/fiber.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace zdirac;
using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

Eigen::Vector3d eig3(const Eigen::Matrix3cd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

TEST_CASE("symbol at special points") {
    auto h = eval_symbol(Torus(0, 0), 1.0);
    Eigen::Matrix3cd want = Eigen::Vector3cd(1, -1, -1).asDiagonal();
    CHECK((h - want).norm() == 0.0);

    auto e = eig3(eval_symbol(Torus(0.5, 0.5), 0.0));
    CHECK(std::abs(e[0] + std::sqrt(8.0)) <= 1e-12);
    CHECK(std::abs(e[1]) <= 1e-12);
    CHECK(std::abs(e[2] - std::sqrt(8.0)) <= 1e-12);

    // |a|^2 = 4 sin^2(pi/4) = 2
    e = eig3(eval_symbol(Torus(0.25, 0.0), 0.0));
    CHECK(std::abs(e[0] + std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(e[2] - std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("sine identities and band values on random momenta") {
    std::mt19937 rng(0);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        Torus xi(U(rng), U(rng));
        const double m = std::abs(U(rng));
        CHECK(std::abs(std::norm(symbol_a(xi)) - 4.0 * std::pow(std::sin(pi * xi[0]), 2)) <= 1e-14 * 4);
        CHECK(std::abs(std::norm(symbol_b(xi)) - 4.0 * std::pow(std::sin(pi * xi[1]), 2)) <= 1e-14 * 4);
        const double r = r_m(xi, m);
        CHECK(r >= m * m);
        CHECK(r <= m * m + 8.0 + 1e-14);
        auto b = band_values(xi, m);
        auto e = eig3(eval_symbol(xi, m));
        Eigen::Vector3d s(b.z_minus, b.z_zero, b.z_plus);
        std::sort(s.data(), s.data() + 3);
        CHECK((e - s).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(b.z_minus <= b.z_zero);
        CHECK(b.z_zero <= b.z_plus);
        CHECK(std::abs(characteristic_poly(xi, m, b.z_plus)) <= 1e-12 * (1 + std::pow(std::abs(b.z_plus), 3)));
        // determinant oracle
        const double z = U(rng);
        const cd det = (eval_symbol(xi, m) - z * Eigen::Matrix3cd::Identity()).determinant();
        CHECK(std::abs(det - characteristic_poly(xi, m, z)) <= 1e-12 * (1 + std::abs(det)));
    }
}

TEST_CASE("band values at (1/2, 0) and the m = 0 symmetry") {
    for (double m : {0.0, 0.5, 1.0, 2.0}) {
        auto b = band_values(Torus(0.5, 0.0), m);
        CHECK(std::abs(b.z_plus - std::sqrt(m * m + 4)) <= 1e-14);
        CHECK(std::abs(b.z_minus + std::sqrt(m * m + 4)) <= 1e-14);
        CHECK(b.z_zero == -m);
    }
    auto b = band_values(Torus(0.13, 0.71), 0.0);
    CHECK(b.z_plus == -b.z_minus);
    CHECK(characteristic_poly(Torus(0.3, 0.2), 1.3, -1.3) == 0.0);
    CHECK(characteristic_poly(Torus(0, 0), 1.0, 0.0) == 1.0);
}

TEST_CASE("gradient") {
    auto g = band_gradient(Torus(0.25, 0.25), 0.0);
    CHECK(std::abs(g[0] - pi) <= 1e-12);
    CHECK(std::abs(g[1] - pi) <= 1e-12);
    for (double m : {0.0, 1.0}) CHECK(band_gradient(Torus(0.5, 0.0), m).norm() <= 1e-15);
    CHECK_THROWS_AS(band_gradient(Torus(0, 0), 0.0), DiracPointError);
    CHECK_NOTHROW(band_gradient(Torus(0, 0), 0.5));

    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        Torus xi(U(rng), U(rng));
        const double m = 2.0 * U(rng);
        if (r_m(xi, m) < 1e-3) continue;
        auto g = band_gradient(xi, m);
        for (int k = 0; k < 2; ++k) {
            Torus p = xi, q = xi;
            p[k] += h;
            q[k] -= h;
            const double fd = (band_values(p, m).z_plus - band_values(q, m).z_plus) / (2 * h);
            CHECK(std::abs(fd - g[k]) <= 1e-6 * std::max(1.0, std::abs(g[k])));
        }
        // |grad r|^2 = 16 pi^2 (sin^2 2 pi xi_1 + sin^2 2 pi xi_2), grad r = 2 z_+ grad z_+
        const double gr2 = (2.0 * band_values(xi, m).z_plus * g).squaredNorm();
        const double want = 16 * pi * pi * (std::pow(std::sin(2 * pi * xi[0]), 2) + std::pow(std::sin(2 * pi * xi[1]), 2));
        CHECK(std::abs(gr2 - want) <= 1e-9 * std::max(1.0, want));
    }
}

TEST_CASE("resolvent") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        Torus xi(U(rng), U(rng));
        const double m = 2 * U(rng);
        const cd z(6 * U(rng) - 3, 0.1);
        auto R = resolvent_fiber(xi, m, z);
        Eigen::Matrix3cd A = eval_symbol(xi, m) - z * Eigen::Matrix3cd::Identity();
        CHECK((A * R - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, R.norm()));
        CHECK((R - A.inverse()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, R.norm()));
    }
    Torus xi(0.3, 0.1);
    const double zp = band_values(xi, 1.0).z_plus;
    CHECK_THROWS_AS(resolvent_fiber(xi, 1.0, cd(zp, 0.0)), SingularResolvent);
    try {
        resolvent_fiber(xi, 1.0, cd(-1.0, 0.0));
    } catch (const SingularResolvent& e) {
        CHECK(e.abs_p <= 1e-12);
    }
}

TEST_CASE("thresholds") {
    auto t1 = classify_thresholds(1.0);
    REQUIRE(t1.items.size() == 6);
    const double want1[6] = {-3, -std::sqrt(5.0), -1, 1, std::sqrt(5.0), 3};
    const ThresholdKind k1[6] = {ThresholdKind::elliptic, ThresholdKind::hyperbolic, ThresholdKind::flat_band,
                                 ThresholdKind::elliptic, ThresholdKind::hyperbolic, ThresholdKind::elliptic};
    for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(t1.items[i].value - want1[i]) <= 1e-15 * 4);
        CHECK(t1.items[i].kind == k1[i]);
    }
    auto t0 = classify_thresholds(0.0);
    REQUIRE(t0.items.size() == 5);
    const double want0[5] = {-std::sqrt(8.0), -2, 0, 2, std::sqrt(8.0)};
    const ThresholdKind k0[5] = {ThresholdKind::elliptic, ThresholdKind::hyperbolic, ThresholdKind::dirac_point,
                                 ThresholdKind::hyperbolic, ThresholdKind::elliptic};
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(t0.items[i].value - want0[i]) <= 1e-15 * 4);
        CHECK(t0.items[i].kind == k0[i]);
    }
}

TEST_CASE("finite-difference Hessian at the saddle") {
    const double h = 1e-4, m = 1.0;
    Torus x(0.5, 0.0);
    auto f = [&](double a, double b) { return band_values(Torus(x[0] + a, x[1] + b), m).z_plus; };
    Eigen::Matrix2d H;
    H(0, 0) = (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / (h * h);
    H(1, 1) = (f(0, h) - 2 * f(0, 0) + f(0, -h)) / (h * h);
    H(0, 1) = H(1, 0) = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
    CHECK(es.eigenvalues()[0] < 0);
    CHECK(es.eigenvalues()[1] > 0);
    CHECK((H - band_hessian(x, m)).cwiseAbs().maxCoeff() <= 1e-4);
}
