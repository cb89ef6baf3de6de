#pragma once

#include <complex>
#include <vector>

#include "wgt/modal.hpp"

namespace wgt {

// Complex function sampled on a uniform x-grid; values outside the sampled
// window are implicitly zero (compact support).
struct LineFunction {
    std::vector<cdouble> samples;
    double x0 = 0.0;
    double dx = 1.0;

    [[nodiscard]] int size() const { return static_cast<int>(samples.size()); }
    [[nodiscard]] double x(int i) const { return x0 + i * dx; }
    [[nodiscard]] double x_end() const { return x(size() - 1); }
};

// Zero-initialized line function on the grid x0 + i*dx, i = 0..n-1.
[[nodiscard]] LineFunction make_line(double x0, double dx, int n);

// Trapezoid quadrature of the samples over the window.
[[nodiscard]] cdouble integral(const LineFunction& f);

// sqrt of the trapezoid quadrature of |f|^2.
[[nodiscard]] double l2_norm(const LineFunction& f);

// Half-line reflection transform Gamma(f)(omega) =
// (i / (2 omega)) * int f(z) e^{i omega z} dz, trapezoid on the sample grid.
// Requires omega > 0.
[[nodiscard]] cdouble gamma_point(const LineFunction& f, double omega);

}  // namespace wgt
