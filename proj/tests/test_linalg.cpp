#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dpskr/linalg.hpp"
#include "test_util.hpp"

using namespace dpskr;

namespace {

// Oracle: the path-graph Laplacian tridiag(-1, 2, -1) of size m has
// eigenvalues 2 - 2 cos(k pi / (m+1)), k = 1..m. Everything below checks
// the solvers against this closed form and other hand-derived spectra.
double laplacian_eigenvalue(int m, int k) {
    return 2.0 - 2.0 * std::cos(k * M_PI / (m + 1.0));
}

Tridiag laplacian(int m) {
    Tridiag t;
    t.diag.assign(m, 2.0);
    t.off.assign(m - 1, -1.0);
    return t;
}

// Oracle: 2x2 symmetric [[a, b], [b, c]] has extreme eigenvalues
// (a+c)/2 +- sqrt(((a-c)/2)^2 + b^2).
double sym2_max(double a, double b, double c) {
    return 0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

Tridiag random_tridiag(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Tridiag t;
    t.diag.resize(m);
    t.off.resize(m - 1);
    for (double& x : t.diag) x = u(rng);
    for (double& x : t.off) x = u(rng);
    return t;
}

}  // namespace

TEST_CASE("largest tridiagonal eigenvalue matches the Laplacian closed form") {
    for (int m = 1; m <= 40; ++m) {
        CHECK_NEAR(max_eigenvalue_tridiag(laplacian(m)), laplacian_eigenvalue(m, m), 1e-12);
        CHECK_NEAR(min_eigenvalue_tridiag(laplacian(m)), laplacian_eigenvalue(m, 1), 1e-12);
    }
}

TEST_CASE("2x2 and 3x3 closed forms") {
    Tridiag t;
    t.diag = {0.7, -0.3};
    t.off = {0.45};
    CHECK_NEAR(max_eigenvalue_tridiag(t), sym2_max(0.7, 0.45, -0.3), 1e-12);

    // tridiag(-1, 2, -1) of size 3: eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2).
    const Tridiag l3 = laplacian(3);
    CHECK_NEAR(max_eigenvalue_tridiag(l3), 2.0 + std::sqrt(2.0), 1e-12);
    CHECK_NEAR(min_eigenvalue_tridiag(l3), 2.0 - std::sqrt(2.0), 1e-12);
}

TEST_CASE("Sturm count locates eigenvalues") {
    const Tridiag t = laplacian(7);
    for (int k = 0; k <= 7; ++k) {
        // Halfway between consecutive eigenvalues there are exactly k below.
        const double lo = k == 0 ? -1.0 : laplacian_eigenvalue(7, k);
        const double hi = k == 7 ? 5.0 : laplacian_eigenvalue(7, k + 1);
        CHECK(count_eigenvalues_below(t, 0.5 * (lo + hi)) == k);
    }
}

TEST_CASE("max eigenpair: known eigenvector and residual contract") {
    Tridiag t;
    t.diag = {0.0, 0.0};
    t.off = {1.0};
    const Eigenpair p = max_eigenpair_tridiag(t);
    CHECK_NEAR(p.value, 1.0, 1e-12);
    CHECK_NEAR(p.vector[0], 1.0 / std::sqrt(2.0), 1e-10);
    CHECK_NEAR(p.vector[1], 1.0 / std::sqrt(2.0), 1e-10);

    // Laplacian eigenvector: v_i = sin(i k pi / (m+1)) for the top k = m.
    const int m = 9;
    const Eigenpair q = max_eigenpair_tridiag(laplacian(m));
    std::vector<double> expect(m);
    double norm = 0.0;
    for (int i = 1; i <= m; ++i) {
        expect[i - 1] = std::sin(i * m * M_PI / (m + 1.0));
        norm += expect[i - 1] * expect[i - 1];
    }
    norm = std::sqrt(norm);
    for (int i = 0; i < m; ++i) expect[i] /= norm;
    // Fix the oracle's sign the same way the solver does.
    int imax = 0;
    for (int i = 1; i < m; ++i) {
        if (std::abs(expect[i]) > std::abs(expect[imax])) imax = i;
    }
    const double flip = expect[imax] < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < m; ++i) {
        CHECK_NEAR(q.vector[i], flip * expect[i], 1e-9);
    }
}

TEST_CASE("eigenpair residuals hold over random matrices") {
    std::mt19937_64 rng(20260814);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 11);
        const Tridiag t = random_tridiag(rng, m);
        const Eigenpair p = max_eigenpair_tridiag(t);
        double unit = 0.0;
        for (double x : p.vector) unit += x * x;
        CHECK_NEAR(unit, 1.0, 1e-12);
        // Residual against an independent mat-vec.
        double res = 0.0, norm = 0.0;
        for (int i = 0; i < m; ++i) {
            double s = t.diag[i] * p.vector[i];
            if (i > 0) s += t.off[i - 1] * p.vector[i - 1];
            if (i + 1 < m) s += t.off[i] * p.vector[i + 1];
            res += (s - p.value * p.vector[i]) * (s - p.value * p.vector[i]);
            norm = std::max(norm, std::abs(t.diag[i]) + (i > 0 ? std::abs(t.off[i - 1]) : 0.0) +
                                      (i + 1 < m ? std::abs(t.off[i]) : 0.0));
        }
        CHECK(std::sqrt(res) <= 10.0 * 1e-12 * std::max(1.0, norm));
        CHECK_NEAR(p.value, max_eigenvalue_tridiag(t), 1e-10);
    }
}

TEST_CASE("Jacobi agrees with analytic spectra and matrix invariants") {
    // Diagonal matrix: eigenvalues are the sorted diagonal.
    DenseSym d(4);
    d.at(0, 0) = 0.3;
    d.at(1, 1) = -1.5;
    d.at(2, 2) = 2.0;
    d.at(3, 3) = 0.0;
    const std::vector<double> ev = jacobi_eigenvalues(d);
    CHECK_NEAR(ev[0], -1.5, 1e-14);
    CHECK_NEAR(ev[1], 0.0, 1e-14);
    CHECK_NEAR(ev[2], 0.3, 1e-14);
    CHECK_NEAR(ev[3], 2.0, 1e-14);

    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 11);
        DenseSym a(m);
        double trace = 0.0, fro2 = 0.0;
        for (int i = 0; i < m; ++i) {
            for (int j = i; j < m; ++j) {
                const double x = u(rng);
                a.at(i, j) = x;
                a.at(j, i) = x;
                fro2 += (i == j) ? x * x : 2.0 * x * x;
            }
            trace += a.at(i, i);
        }
        const std::vector<double> lam = jacobi_eigenvalues(a);
        double tsum = 0.0, fsum = 0.0;
        for (double l : lam) {
            tsum += l;
            fsum += l * l;
        }
        CHECK_NEAR(tsum, trace, 1e-9);
        CHECK_NEAR(fsum, fro2, 1e-9);
        CHECK_NEAR(max_eigenvalue_dense(a), lam.back(), 1e-14);
    }
}

TEST_CASE("dense and tridiagonal solvers cross-check") {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 9);
        const Tridiag t = random_tridiag(rng, m);
        DenseSym a(m);
        for (int i = 0; i < m; ++i) {
            a.at(i, i) = t.diag[i];
            if (i + 1 < m) {
                a.at(i, i + 1) = t.off[i];
                a.at(i + 1, i) = t.off[i];
            }
        }
        const std::vector<double> lam = jacobi_eigenvalues(a);
        CHECK_NEAR(max_eigenvalue_tridiag(t), lam.back(), 1e-10);
        CHECK_NEAR(min_eigenvalue_tridiag(t), lam.front(), 1e-10);
        const double mid = 0.5 * (lam.front() + lam.back());
        int below = 0;
        for (double l : lam) below += l < mid;
        CHECK(count_eigenvalues_below(t, mid) == below);
    }
}

TEST_CASE("jacobi rejects non-symmetric input") {
    DenseSym a(3);
    a.at(0, 1) = 0.5;
    a.at(1, 0) = -0.5;
    CHECK_THROWS_AS(jacobi_eigenvalues(a), std::invalid_argument);
}

TEST_CASE("upper concave envelope: hand cases") {
    // Concave data survives untouched.
    std::vector<PointXY> concave = {{0.0, 0.0}, {0.5, 0.9}, {1.0, 1.0}};
    auto h = upper_concave_envelope(concave);
    REQUIRE(h.size() == 3);

    // A dent is removed.
    std::vector<PointXY> dent = {{0.0, 0.0}, {0.5, 0.2}, {1.0, 1.0}};
    h = upper_concave_envelope(dent);
    REQUIRE(h.size() == 2);
    CHECK(h[0].x == 0.0);
    CHECK(h[1].x == 1.0);

    // Collinear interior points merge away.
    std::vector<PointXY> line = {{0.0, 0.0}, {0.25, 0.25}, {0.5, 0.5}, {1.0, 1.0}};
    h = upper_concave_envelope(line);
    REQUIRE(h.size() == 2);

    // Duplicate x keeps the larger y.
    std::vector<PointXY> dup = {{0.0, 0.0}, {0.5, 0.1}, {0.5, 0.8}, {1.0, 0.2}};
    h = upper_concave_envelope(dup);
    REQUIRE(h.size() == 3);
    CHECK(h[1].y == 0.8);
}

TEST_CASE("envelope majorizes input and is idempotent") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int npts = 3 + static_cast<int>(rng() % 40);
        std::vector<PointXY> pts(npts);
        for (auto& p : pts) p = {u(rng), u(rng)};
        const auto h = upper_concave_envelope(pts);
        for (const auto& p : pts) {
            CHECK(eval_piecewise(h, p.x) >= p.y - 1e-12);
        }
        const auto h2 = upper_concave_envelope(h);
        REQUIRE(h2.size() == h.size());
        for (std::size_t i = 0; i < h.size(); ++i) {
            CHECK(h2[i].x == h[i].x);
            CHECK(h2[i].y == h[i].y);
        }
        // Slopes strictly decrease along the hull.
        for (std::size_t i = 2; i < h.size(); ++i) {
            const double s1 = (h[i - 1].y - h[i - 2].y) / (h[i - 1].x - h[i - 2].x);
            const double s2 = (h[i].y - h[i - 1].y) / (h[i].x - h[i - 1].x);
            CHECK(s1 > s2);
        }
    }
}

TEST_CASE("golden section finds unimodal minima") {
    CHECK_NEAR(golden_min([](double x) { return (x - 1.3) * (x - 1.3); }, 0.0, 3.0, 1e-10),
               1.3, 1e-7);
    CHECK_NEAR(golden_min([](double x) { return std::cosh(x - 0.2); }, -4.0, 5.0, 1e-10),
               0.2, 1e-7);
}
