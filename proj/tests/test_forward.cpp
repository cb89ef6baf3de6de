#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "wgt/errors.hpp"
#include "wgt/forward.hpp"
#include "wgt/line.hpp"
#include "wgt/modal.hpp"

using namespace wgt;

namespace {

// Unit-mass Gaussian source centered at x_c (numerically compact).
LineFunction gaussian_source(double x_c, double sigma, double x0, double dx, int n) {
    LineFunction s = make_line(x0, dx, n);
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * 3.14159265358979323846));
    for (int i = 0; i < n; ++i) {
        const double t = (s.x(i) - x_c) / sigma;
        s.samples[i] = norm * std::exp(-0.5 * t * t);
    }
    return s;
}

}  // namespace

TEST_CASE("modal Green convolution matches the far-field closed form") {
    // For a unit-mass Gaussian source g centered at z0 and a propagative
    // mode, evaluation beyond the support gives
    //   u(x) = (i / 2 k_n) e^{i k_n (x - z0)} e^{-k_n^2 sigma^2 / 2}.
    const double k = 5.0;
    const auto kn = longitudinal_wavenumber(k, 0);
    const double sigma = 0.1, z0 = 1.0;
    const LineFunction s = gaussian_source(z0, sigma, 0.5, 0.0005, 2001);

    const LineFunction u = green_convolve(s, kn, 3.0, 0.1, 5);
    for (int i = 0; i < u.size(); ++i) {
        const double x = u.x(i);
        const cdouble expect = cdouble(0.0, 0.5 / k) * std::polar(1.0, k * (x - z0)) *
                               std::exp(-0.5 * k * k * sigma * sigma);
        INFO("x=" << x);
        REQUIRE(std::abs(u.samples[i] - expect) <= 1e-8 * std::abs(expect));
    }
}

TEST_CASE("modal Green convolution is symmetric about a symmetric source") {
    const double k = 4.0;
    const auto kn = longitudinal_wavenumber(k, 1);
    const LineFunction s = gaussian_source(1.0, 0.08, 0.5, 0.001, 1001);
    const LineFunction left = green_convolve(s, kn, 0.2, 0.05, 3);
    const LineFunction right = green_convolve(s, kn, 1.8, 0.05, 3);
    // |x - z| symmetry: u(1 - d) = u(1 + d) for sources even about z = 1.
    REQUIRE(std::abs(left.samples[0] - right.samples[2]) < 1e-10);
    REQUIRE(std::abs(left.samples[2] - right.samples[0]) < 1e-10);
}

TEST_CASE("deep evanescent modes are returned as exact zeros") {
    const double k = 1.0;
    const auto k2 = longitudinal_wavenumber(k, 2);  // decay rate ~ 6.2
    REQUIRE(k2.value.imag() > 6.0);
    const LineFunction s = gaussian_source(1.0, 0.1, 0.5, 0.01, 101);

    const LineFunction far = green_convolve(s, k2, 9.0, 0.1, 4);  // gap 7.5: rate*gap > 46
    for (const cdouble& v : far.samples) REQUIRE(v == cdouble(0.0, 0.0));

    const LineFunction near = green_convolve(s, k2, 2.0, 0.1, 4);  // gap 0.5
    double mx = 0.0;
    for (const cdouble& v : near.samples) mx = std::max(mx, std::abs(v));
    REQUIRE(mx > 0.0);
}

TEST_CASE("interior-source rectangle solve reduces to the modal closed form") {
    const double k = 5.0;
    RectangleGrid grid;
    grid.x0 = 3.0;
    grid.dx = 0.25;
    grid.nx = 5;
    grid.ny = 41;

    InteriorSource src;
    src.modal.push_back(gaussian_source(1.0, 0.1, 0.5, 0.0005, 2001));  // mode 0 only

    const RectangleField u = solve_source(src, k, grid);
    for (int i = 0; i < grid.nx; ++i) {
        const cdouble expect = cdouble(0.0, 0.5 / k) * std::polar(1.0, k * (grid.x(i) - 1.0)) *
                               std::exp(-0.5 * k * k * 0.01);
        for (int j = 0; j < grid.ny; j += 10) {
            INFO("i=" << i << " j=" << j);
            REQUIRE(std::abs(u.at(i, j) - expect) <= 1e-7 * std::abs(expect));
        }
    }
}

TEST_CASE("boundary drive with equal wall data yields a y-symmetric field") {
    const double k = 7.0;
    RectangleGrid grid;
    grid.x0 = 2.0;
    grid.dx = 0.1;
    grid.nx = 11;
    grid.ny = 81;

    BoundarySources b;
    b.b1 = gaussian_source(1.0, 0.1, 0.5, 0.001, 1001);
    b.b2 = b.b1;

    const RectangleField u = solve_boundary(b, k, grid, 12);
    for (int i = 0; i < grid.nx; i += 5)
        for (int j = 0; j < grid.ny / 2; j += 7) {
            INFO("i=" << i << " j=" << j);
            REQUIRE(std::abs(u.at(i, j) - u.at(i, grid.ny - 1 - j)) < 1e-10);
        }
    // And it is not trivially zero.
    REQUIRE(l2_norm(u) > 1e-6);
}

TEST_CASE("Born series with null operators returns the direct term, converged") {
    const double k = 5.0;
    RectangleGrid grid;
    grid.x0 = 2.5;
    grid.dx = 0.1;
    grid.nx = 11;
    grid.ny = 31;

    InteriorSource src;
    src.modal.push_back(gaussian_source(1.0, 0.1, 0.5, 0.001, 1001));

    const RectangleField direct = solve_source(src, k, grid);
    const BornResult born = born_series(src, BoundarySources{}, nullptr, nullptr, nullptr, k,
                                        grid, 4);
    REQUIRE(born.converged);
    REQUIRE(born.field.samples.size() == direct.samples.size());
    for (std::size_t i = 0; i < direct.samples.size(); ++i)
        REQUIRE(std::abs(born.field.samples[i] - direct.samples[i]) <=
                1e-14 * (1.0 + std::abs(direct.samples[i])));
}

TEST_CASE("Born series aborts when successive terms grow") {
    const double k = 5.0;
    RectangleGrid grid;
    grid.x0 = 0.5;
    grid.dx = 0.1;
    grid.nx = 11;
    grid.ny = 31;

    InteriorSource src;
    src.modal.push_back(gaussian_source(1.0, 0.1, 0.5, 0.001, 1001));

    // Volume operator that amplifies by a growing factor each call: the term
    // norms increase and the series must refuse to "converge".
    int call = 0;
    VolumeOp amplify = [&call](const RectangleField& u) {
        InteriorSource s;
        LineFunction m = make_line(u.grid.x0, u.grid.dx, u.grid.nx);
        const double gain = 50.0 * std::pow(2.0, call++);
        for (int i = 0; i < u.grid.nx; ++i) m.samples[i] = gain * u.at(i, u.grid.ny / 2);
        s.modal.push_back(m);
        return s;
    };
    REQUIRE_THROWS_AS(
        born_series(src, BoundarySources{}, amplify, nullptr, nullptr, k, grid, 2),
        numerical_error);
}
