#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wgt/dataset.hpp"
#include "wgt/defects.hpp"
#include "wgt/forward.hpp"
#include "wgt/modal.hpp"

namespace wgt {

// Complex coordinate-stretch absorbing layer. Absorption is zero inside the
// physical window [x_left, x_right] and grows linearly outside:
//   sigma(x,k) = -k * ((x - x_right) 1_{x>=x_right} - (x_left - x) ... )
// i.e. sigma <= 0 in the layers; the stretch factor applied to x-derivatives
// is 1/(1 - i sigma/k), the decaying branch for outgoing waves.
struct PmlProfile {
    double x_left = 0.0;
    double x_right = 8.0;

    [[nodiscard]] double absorption(double x, double k) const;
    [[nodiscard]] cdouble stretch(double x, double k) const;
};

// How the truncated guide is closed at the two vertical ends:
//  - pml: absorbing layers outside the physical window (window includes them)
//  - modal: one-sided discrete radiation condition built from the exact
//    discrete transverse modes (no layer; window ends immediately)
enum class BoundaryClosure { pml, modal };

struct DiscretizationConfig {
    double dx = 0.01;
    double dy = 0.01;
    double x_min = -19.0;  // full computational window, layers included
    double x_max = 27.0;
    PmlProfile pml{0.0, 8.0};
    BoundaryClosure closure = BoundaryClosure::pml;

    // Frequency sweeps shrink dx per k to keep the accumulated second-order
    // phase error k^3 dx^2 L / 24 below dispersion_budget radians.
    bool auto_refine_dx = true;
    double dispersion_budget = 0.1;
    double cutoff_guard = 0.2;

    [[nodiscard]] int nx() const;
    [[nodiscard]] int ny() const;
    [[nodiscard]] RectangleGrid grid() const;
    // Copy with dx refined for wavenumber k (grid endpoints preserved).
    [[nodiscard]] DiscretizationConfig refined_for(double k) const;
    void validate() const;
};

// General banded complex system in compact diagonal storage
// (kl sub-, ku super-diagonals). Under x-major ordering the half bandwidth is
// ny + 1. The assembled band is kept so the residual can be verified after
// the in-place factorization.
struct BandedComplexSystem {
    int n = 0;
    int kl = 0;
    int ku = 0;
    std::vector<cdouble> band;  // (kl+ku+1) x n, column-major: A(r,c) at band[c*(kl+ku+1) + ku + r - c]
    std::vector<cdouble> rhs;
    RectangleGrid grid{};
    double k = 0.0;

    void add(int row, int col, cdouble value);
    [[nodiscard]] std::vector<cdouble> multiply(const std::vector<cdouble>& x) const;
};

// Discrete longitudinal wavenumber of transverse mode n on the grid:
// kappa = acos(1 - (k^2 - lambda_n) dx^2 / 2)/dx with
// lambda_n = (2/dy^2)(1 - cos(n pi dy)), branch Re,Im >= 0.
[[nodiscard]] cdouble discrete_mode_wavenumber(double k, int n, double dx, double dy);

// Discretize div(S grad u) + k^2 tau u with homogeneous Neumann walls and the
// configured end closure. defect == nullptr assembles the empty guide;
// rhs starts at zero.
[[nodiscard]] BandedComplexSystem assemble(const DefectDescriptor* defect, double k,
                                           const DiscretizationConfig& cfg);

// Add source terms (the equation is div(S grad u) + k^2 tau u = -s):
// amplitude * delta(x - x_source), uniform in y.
void add_line_source(BandedComplexSystem& sys, double x_source, cdouble amplitude);
// amplitude * delta at the grid node nearest (x_source, y_source).
void add_point_source(BandedComplexSystem& sys, double x_source, double y_source,
                      cdouble amplitude);

// Scattered-field system: operator of the defect guide, right-hand side
// supported on the defect cells only, so the closure sees purely outgoing
// scattered waves and a zero defect yields an identically zero solution.
// Bumps and index maps use the exact discrete difference source
// -(A_defect - A_empty) u_inc with u_inc the exact discrete incident mode-0
// wave e^{i kappa_0 x}; bends use the bent-guide effective interior source
// -k^2 e^{i kappa_0 x} h_r(y) on the bent section (the operator-difference
// form would keep the straightening map's seam flux jumps, which cancel this
// source's leading-order reflection and leave data off the bend model).
[[nodiscard]] BandedComplexSystem assemble_scattering(const DefectDescriptor& defect, double k,
                                                      const DiscretizationConfig& cfg);

// Banded LU solve (partial pivoting, factoring a padded copy of the band so
// the system is left intact). Verifies ||Au - b|| / ||b|| < 1e-10 afterwards.
[[nodiscard]] RectangleField solve(BandedComplexSystem& sys);

// x-extent [lo, hi] that must lie strictly inside the physical window.
[[nodiscard]] std::pair<double, double> defect_support(const DefectDescriptor& d);

// Full measurement synthesis: for each k in K (cutoff-adjacent k skipped with
// a warning), solve the scattering problem, decompose the scattered field on
// the section x = measure_x, keep safely propagative modes relevant to the
// defect's data model, phase-translate to the reference section x = 0 using
// the discrete wavenumber, and emit records (n, k, omega = k + k_n, datum).
[[nodiscard]] FrequencyDataset synthesize_measurements(const DefectDescriptor& defect,
                                                       const std::vector<double>& K,
                                                       double measure_x, int N_modes,
                                                       const DiscretizationConfig& cfg);

}  // namespace wgt
