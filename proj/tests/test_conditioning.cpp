#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "wgt/conditioning.hpp"
#include "wgt/errors.hpp"

using namespace wgt;

namespace {
constexpr double kPi = 3.14159265358979323846;

// tr(A^p) for a dense row-major Hermitian matrix, p = 1..3.
double trace_power(const std::vector<cdouble>& a, int n, int p) {
    std::vector<cdouble> acc(a);
    std::vector<cdouble> tmp(a.size());
    for (int e = 1; e < p; ++e) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                cdouble s(0.0, 0.0);
                for (int q = 0; q < n; ++q)
                    s += acc[static_cast<std::size_t>(r) * n + q] *
                         a[static_cast<std::size_t>(q) * n + c];
                tmp[static_cast<std::size_t>(r) * n + c] = s;
            }
        acc.swap(tmp);
    }
    cdouble t(0.0, 0.0);
    for (int r = 0; r < n; ++r) t += acc[static_cast<std::size_t>(r) * n + r];
    return t.real();
}
}  // namespace

TEST_CASE("Hermitian eigenvalues: fixed 2x2 and moment identities") {
    // [[2, i], [-i, 2]] has eigenvalues {1, 3}.
    const std::vector<cdouble> m2 = {cdouble(2, 0), cdouble(0, 1), cdouble(0, -1), cdouble(2, 0)};
    const std::vector<double> ev2 = hermitian_eigenvalues(m2, 2);
    REQUIRE(ev2[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(ev2[1] == Catch::Approx(3.0).margin(1e-12));

    // Random-ish Hermitian 6x6 built from a fixed pattern; compare the first
    // three spectral moments with direct traces.
    const int n = 6;
    std::vector<cdouble> a(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double re = std::sin(1.0 + 0.7 * r * c) + ((r == c) ? 2.0 : 0.0);
            const double im = (r == c) ? 0.0 : 0.3 * std::cos(2.0 + r - c);
            a[static_cast<std::size_t>(r) * n + c] = cdouble(re, (r < c) ? im : -im);
        }
    // Hermitize exactly.
    for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c)
            a[static_cast<std::size_t>(c) * n + r] =
                std::conj(a[static_cast<std::size_t>(r) * n + c]);

    const std::vector<double> ev = hermitian_eigenvalues(a, n);
    REQUIRE(static_cast<int>(ev.size()) == n);
    for (std::size_t i = 1; i < ev.size(); ++i) REQUIRE(ev[i] >= ev[i - 1]);

    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (double l : ev) {
        s1 += l;
        s2 += l * l;
        s3 += l * l * l;
    }
    REQUIRE(s1 == Catch::Approx(trace_power(a, n, 1)).epsilon(1e-11));
    REQUIRE(s2 == Catch::Approx(trace_power(a, n, 2)).epsilon(1e-11));
    REQUIRE(s3 == Catch::Approx(trace_power(a, n, 3)).epsilon(1e-11));
}

TEST_CASE("full-band normal matrix is perfectly conditioned") {
    // omega0 = 0 keeps the whole band [0, 2 pi / h]: the matrix is h/(2pi)
    // times the identity-producing Dirichlet kernel, condition number 1.
    ConditioningGrid grid;
    grid.points_per_unit_r = 100;
    const std::vector<ConditioningEntry> sw = conditioning_study({0.1}, {0.0}, grid);
    REQUIRE(sw.size() == 1);
    REQUIRE_FALSE(sw[0].numerically_singular);
    REQUIRE(sw[0].cond == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("band normal matrix: Toeplitz structure and diagonal value") {
    ConditioningGrid grid;
    grid.points_per_unit_r = 100;
    int n = 0;
    const double r = 0.05, omega0 = kPi;
    const std::vector<cdouble> a = band_normal_matrix(r, omega0, grid, &n);
    REQUIRE(n == static_cast<int>(std::lround(100 * r)) + 1);
    const double h = 2.0 * r / (n - 1);
    const double w_max = 2.0 * kPi / h;
    // Diagonal: (h / 2 pi) (omega_max - omega0).
    for (int p = 0; p < n; ++p)
        REQUIRE(a[static_cast<std::size_t>(p) * n + p].real() ==
                Catch::Approx(h / (2.0 * kPi) * (w_max - omega0)).epsilon(1e-12));
    // Toeplitz + Hermitian.
    for (int p = 0; p + 1 < n; ++p) {
        REQUIRE(std::abs(a[static_cast<std::size_t>(p) * n + p + 1] - a[1]) < 1e-12);
        REQUIRE(std::abs(a[static_cast<std::size_t>(p + 1) * n + p] - std::conj(a[1])) < 1e-12);
    }
    // Off-diagonal closed form: (h/2pi) * (e^{i w_max d} - e^{i omega0 d}) / (i d), d = -h.
    const double d = -h;
    const cdouble want = h / (2.0 * kPi) *
                         (std::polar(1.0, w_max * d) - std::polar(1.0, omega0 * d)) /
                         cdouble(0.0, d);
    REQUIRE(std::abs(a[1 * static_cast<std::size_t>(n) + 0] - want) < 1e-12);
}

TEST_CASE("small-support anchor: conditioning stays near 1") {
    const std::vector<ConditioningEntry> sw = conditioning_study({0.02}, {kPi});
    REQUIRE(sw.size() == 1);
    REQUIRE(sw[0].cond == Catch::Approx(1.0202).epsilon(0.01));
    REQUIRE_FALSE(sw[0].numerically_singular);
}

TEST_CASE("conditioning grows monotonically with the support radius") {
    const std::vector<ConditioningEntry> sw = conditioning_study({0.05, 0.1, 0.2}, {kPi});
    REQUIRE(sw.size() == 3);
    REQUIRE(sw[0].cond < sw[1].cond);
    REQUIRE(sw[1].cond < sw[2].cond);
    REQUIRE(sw[0].cond > 1.0);
}

TEST_CASE("unit-support anchor at a high cut", "[slow]") {
    const std::vector<ConditioningEntry> sw = conditioning_study({1.0}, {6.0 * kPi});
    REQUIRE(sw.size() == 1);
    // Order-of-magnitude anchor: 6.08e6 within a factor of 10.
    REQUIRE(sw[0].cond > 6.08e5);
    REQUIRE(sw[0].cond < 6.08e7);
}

TEST_CASE("a cut at the top of the band is flagged as singular") {
    // With omega0 == omega_max the band is empty; long before that the
    // smallest eigenvalue underflows the floor and the entry is flagged.
    ConditioningGrid grid;
    grid.points_per_unit_r = 100;
    int n = 0;
    const std::vector<cdouble> probe = band_normal_matrix(0.1, 0.0, grid, &n);
    const double h = 0.2 / (n - 1);
    const double w_max = 2.0 * kPi / h;

    const std::vector<ConditioningEntry> sw = conditioning_study({0.1}, {0.98 * w_max}, grid);
    REQUIRE(sw.size() == 1);
    REQUIRE(sw[0].numerically_singular);
    const double floor_cond = 1.0 / (1e3 * std::numeric_limits<double>::epsilon());
    REQUIRE(sw[0].cond == Catch::Approx(floor_cond).epsilon(1e-12));
}
