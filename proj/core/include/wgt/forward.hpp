#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "wgt/line.hpp"
#include "wgt/modal.hpp"

namespace wgt {

// Uniform grid on a rectangle (x_min, x_max) x (0,1): x-major storage,
// y spacing fixed at 1/(ny-1).
struct RectangleGrid {
    double x0 = 0.0;
    double dx = 0.01;
    int nx = 2;
    int ny = 101;

    [[nodiscard]] double x(int i) const { return x0 + i * dx; }
    [[nodiscard]] double dy() const { return 1.0 / (ny - 1); }
    [[nodiscard]] double y(int j) const { return j * dy(); }
    [[nodiscard]] std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * ny + j;
    }
};

struct RectangleField {
    RectangleGrid grid;
    std::vector<cdouble> samples;  // grid.nx * grid.ny, x-major

    [[nodiscard]] cdouble& at(int i, int j) { return samples[grid.index(i, j)]; }
    [[nodiscard]] const cdouble& at(int i, int j) const { return samples[grid.index(i, j)]; }
    [[nodiscard]] SectionField section(int i) const;
};

[[nodiscard]] RectangleField make_field(const RectangleGrid& grid);

// Trapezoid L^2 norm over the rectangle (both directions).
[[nodiscard]] double l2_norm(const RectangleField& field);

// Interior source decomposed on transverse modes: s(x,y) = sum_n s_n(x) phi_n(y).
struct InteriorSource {
    std::vector<LineFunction> modal;  // index = mode n; all on a shared grid
};

// Neumann data on the two walls: du/dnu = b1 on y=1, b2 on y=0.
struct BoundarySources {
    LineFunction b1;
    LineFunction b2;
};

// One modal component of the outgoing solution:
// u_n(x) = (i / (2 k_n)) * int s_n(z) e^{i k_n |x - z|} dz
// evaluated on the grid x0 + i*dx, i = 0..nx-1. Evanescent modes whose decay
// across the gap between source support and evaluation window exceeds
// e^{-40} are returned as exact zeros.
[[nodiscard]] LineFunction green_convolve(const LineFunction& s_n,
                                          const LongitudinalWavenumber& k_n,
                                          double x0, double dx, int nx);

// Outgoing solution for an interior source (modal superposition of
// green_convolve over all supplied modes).
[[nodiscard]] RectangleField solve_source(const InteriorSource& s, double k,
                                          const RectangleGrid& grid);

// Outgoing solution for boundary sources: mode n is driven by the line source
// b1(z) phi_n(1) + b2(z) phi_n(0), with phi_n(1) = (-1)^n sqrt(2) and
// phi_n(0) = sqrt(2) for n >= 1. N_modes caps the modal sum.
[[nodiscard]] RectangleField solve_boundary(const BoundarySources& b, double k,
                                            const RectangleGrid& grid, int N_modes);

using VolumeOp = std::function<InteriorSource(const RectangleField&)>;
using BoundaryOp = std::function<LineFunction(const RectangleField&)>;

struct BornResult {
    RectangleField field;
    bool converged = false;
    int iterations = 0;
};

// Born-series solution of the perturbed problem: starting from the direct
// term u_0 = H(s) + G(b), iterate u_{m+1} = H(S_op(u_m)) + G(T1(u_m), T2(u_m))
// and sum. Stops when a term's norm drops below tol * (first term's norm);
// converged additionally requires the last three term norms to decrease.
// Three consecutive growing terms abort with a divergence error (the
// contraction hypothesis behind the series fails).
// Null operators are treated as zero, so the first term alone is the Born
// approximation.
[[nodiscard]] BornResult born_series(const InteriorSource& s, const BoundarySources& b,
                                     const VolumeOp& S_op, const BoundaryOp& T1_op,
                                     const BoundaryOp& T2_op, double k,
                                     const RectangleGrid& grid, int N_modes,
                                     int m_max = 50, double tol = 1e-8);

}  // namespace wgt
