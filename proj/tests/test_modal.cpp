#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "wgt/errors.hpp"
#include "wgt/modal.hpp"

using namespace wgt;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("transverse eigenfunctions are orthonormal under trapezoid quadrature") {
    // Trapezoid is spectrally exact for products of these cosines (all odd
    // derivatives vanish at both endpoints), so the tolerance can be tight.
    const int ny = 401;
    const double dy = 1.0 / (ny - 1);
    for (int m = 0; m <= 12; ++m) {
        for (int n = m; n <= 12; ++n) {
            double acc = 0.0;
            for (int j = 0; j < ny; ++j) {
                const double w = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
                acc += w * eigenfunction(m, j * dy) * eigenfunction(n, j * dy) * dy;
            }
            const double expect = (m == n) ? 1.0 : 0.0;
            INFO("m=" << m << " n=" << n);
            REQUIRE(std::abs(acc - expect) < 1e-12);
        }
    }
}

TEST_CASE("eigenfunction values match the closed forms") {
    REQUIRE(eigenfunction(0, 0.37) == Catch::Approx(1.0));
    REQUIRE(eigenfunction(3, 0.25) ==
            Catch::Approx(std::sqrt(2.0) * std::cos(3.0 * kPi * 0.25)).epsilon(1e-14));
    // Wall values used by the boundary-source drive: phi_n(0) = sqrt(2),
    // phi_n(1) = (-1)^n sqrt(2).
    REQUIRE(eigenfunction(2, 0.0) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
    REQUIRE(eigenfunction(3, 1.0) == Catch::Approx(-std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("longitudinal wavenumber sits on the upper-right branch") {
    const double k = 5.0;
    const auto k1 = longitudinal_wavenumber(k, 1);
    REQUIRE(k1.value.imag() == 0.0);
    REQUIRE(k1.value.real() == Catch::Approx(std::sqrt(k * k - kPi * kPi)).epsilon(1e-14));

    const auto k2 = longitudinal_wavenumber(k, 2);  // 2*pi > 5: evanescent
    REQUIRE(k2.value.real() == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(k2.value.imag() == Catch::Approx(std::sqrt(4 * kPi * kPi - k * k)).epsilon(1e-14));

    // The square always reproduces k^2 - n^2 pi^2.
    for (int n = 0; n <= 6; ++n) {
        const cdouble v = longitudinal_wavenumber(k, n).value;
        const cdouble sq = v * v;
        REQUIRE(sq.real() == Catch::Approx(k * k - n * n * kPi * kPi).margin(1e-10));
        REQUIRE(std::abs(sq.imag()) < 1e-10);
    }
}

TEST_CASE("cutoff guard flags frequencies near n*pi") {
    REQUIRE(is_near_cutoff(kPi + 0.1));
    REQUIRE(is_near_cutoff(kPi - 0.1));
    REQUIRE(is_near_cutoff(0.05));  // n = 0 cutoff
    REQUIRE_FALSE(is_near_cutoff(kPi + 0.5));
    REQUIRE_FALSE(is_near_cutoff(2.0));
    REQUIRE(is_near_cutoff(2.0 * kPi + 0.19));
}

TEST_CASE("decompose inverts recompose for band-limited fields") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int N = 8;
    ModalCoefficients c;
    for (int n = 0; n <= N; ++n) c.coeffs.push_back(cdouble(u(rng), u(rng)));

    const SectionField field = recompose(c, 101);  // 101 >= 4N
    const ModalCoefficients back = decompose(field, N);
    REQUIRE(back.truncation() == N);
    for (int n = 0; n <= N; ++n) {
        INFO("mode " << n);
        REQUIRE(std::abs(back.coeffs[n] - c.coeffs[n]) < 1e-12);
    }
}

TEST_CASE("decompose rejects under-resolved sections") {
    SectionField f;
    f.samples.assign(21, cdouble(1.0, 0.0));
    REQUIRE_THROWS_AS(decompose(f, 10), validation_error);  // needs ny >= 40
}

TEST_CASE("frequency energy norm matches an analytic integral") {
    // u(omega) = e^{-omega}: integral of omega^2 e^{-2 omega} over (0, inf)
    // equals 1/4, so the norm is 1/2.
    const int n = 80001;
    std::vector<double> omega(n);
    std::vector<cdouble> val(n);
    for (int i = 0; i < n; ++i) {
        omega[i] = 1e-6 + i * 5e-4;
        val[i] = std::exp(-omega[i]);
    }
    REQUIRE(h_norm(val, omega) == Catch::Approx(0.5).epsilon(1e-5));
}
