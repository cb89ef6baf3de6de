#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "wgt/errors.hpp"
#include "wgt/line.hpp"

using namespace wgt;

TEST_CASE("line grid accessors") {
    const LineFunction f = make_line(1.5, 0.25, 5);
    REQUIRE(f.size() == 5);
    REQUIRE(f.x(0) == Catch::Approx(1.5));
    REQUIRE(f.x(3) == Catch::Approx(2.25));
    REQUIRE(f.x_end() == Catch::Approx(2.5));
    REQUIRE_THROWS_AS(make_line(0.0, -0.1, 5), validation_error);
    REQUIRE_THROWS_AS(make_line(0.0, 0.1, 1), validation_error);
}

TEST_CASE("trapezoid integral and norm on exactly integrable samples") {
    LineFunction f = make_line(0.0, 0.001, 1001);  // [0, 1]
    for (int i = 0; i < f.size(); ++i) f.samples[i] = f.x(i);  // f(x) = x
    REQUIRE(integral(f).real() == Catch::Approx(0.5).epsilon(1e-12));
    REQUIRE(integral(f).imag() == Catch::Approx(0.0).margin(1e-15));

    LineFunction g = make_line(0.0, 0.01, 201);  // [0, 2]
    for (auto& s : g.samples) s = cdouble(1.0, 0.0);
    REQUIRE(l2_norm(g) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("gamma transform of a Gaussian matches the closed form") {
    // f(x) = exp(-(x-2)^2 / (2 s^2)), s = 0.2:
    //   int f e^{i w x} dx = s sqrt(2 pi) e^{-s^2 w^2 / 2} e^{2 i w}
    // and Gamma(f)(w) multiplies by i/(2w). The Gaussian is below 3e-23 at
    // the window edges, so the compact-support assumption holds numerically.
    const double s = 0.2;
    LineFunction f = make_line(0.0, 0.001, 4001);  // [0, 4]
    for (int i = 0; i < f.size(); ++i) {
        const double t = (f.x(i) - 2.0) / s;
        f.samples[i] = std::exp(-0.5 * t * t);
    }
    for (double w : {0.5, 1.0, 3.7, 10.0, 20.0}) {
        const cdouble hat =
            s * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(-0.5 * s * s * w * w) *
            std::polar(1.0, 2.0 * w);
        const cdouble expect = cdouble(0.0, 0.5 / w) * hat;
        const cdouble got = gamma_point(f, w);
        INFO("w=" << w);
        REQUIRE(std::abs(got - expect) <= 1e-9 * std::abs(expect));
    }
}

TEST_CASE("gamma transform rejects non-positive frequencies") {
    LineFunction f = make_line(0.0, 0.1, 11);
    REQUIRE_THROWS_AS(gamma_point(f, 0.0), validation_error);
    REQUIRE_THROWS_AS(gamma_point(f, -2.0), validation_error);
}
