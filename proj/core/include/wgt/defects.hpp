#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wgt/line.hpp"
#include "wgt/modal.hpp"

namespace wgt {

// ---------------------------------------------------------------------------
// Transform conventions used throughout the data models:
//   Gamma(f)(w)        = (i / 2w) * int f(z) e^{iwz} dz      (gamma_point)
//   half_fourier(f)(w) = (i / 2)  * int f(z) e^{iwz} dz  = w * Gamma(f)(w)
// The reflection data models are stated with Gamma; the rectangle fit model
// and the discrete inversion operator work with the half_fourier scaling.
// ---------------------------------------------------------------------------

// Circular-arc bend of a unit-width guide: starts at x_c, inner curvature
// radius r, signed angle theta. Arc length along the outer wall (the mapped
// x-axis) is |theta|*(r+1).
struct BendParams {
    double x_c = 0.0;
    double r = 1.0;
    double theta = 0.0;

    [[nodiscard]] double arc_length() const;
    [[nodiscard]] double x_end() const { return x_c + arc_length(); }
};

// Wall deformation profiles: top wall at y = 1 + h(x), bottom at y = g(x).
// Both sampled (real-valued) on a shared grid; 1 + h - g > 0 required.
struct BumpProfiles {
    LineFunction h;  // top
    LineFunction g;  // bottom
};

// Index perturbation n^2 = 1 + h(x,y) sampled on a uniform grid covering the
// support; y-grid spans [0,1] with ny points, x-major storage.
struct InhomogeneityMap {
    double x0 = 0.0;
    double dx = 0.01;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;  // nx * ny, x-major

    [[nodiscard]] double x_end() const { return x0 + (nx - 1) * dx; }
    [[nodiscard]] double dy() const { return 1.0 / (ny - 1); }
    [[nodiscard]] double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * ny + j];
    }
    [[nodiscard]] double max_abs() const;
    // Transverse modal component h_n(x) on the map's x-grid.
    [[nodiscard]] LineFunction modal_component(int n) const;
};

using BendList = std::vector<BendParams>;

// Exactly one defect kind; "bends" models a succession of disjoint arcs.
using DefectDescriptor = std::variant<BendParams, BendList, BumpProfiles, InhomogeneityMap>;

[[nodiscard]] std::string defect_type_name(const DefectDescriptor& d);
[[nodiscard]] std::string to_json_string(const DefectDescriptor& d, int indent = 2);
[[nodiscard]] DefectDescriptor defect_from_json_string(const std::string& text);

// ---------------------------------------------------------------------------
// Bend geometry
// ---------------------------------------------------------------------------

// Map from the straight reference guide to the physically bent guide:
// identity before the bend, polar arc inside, rigid motion after.
// Continuous across both seams.
[[nodiscard]] std::array<double, 2> bend_map(const BendParams& p, double x, double y);

struct MetricData {
    std::array<std::array<double, 2>, 2> S{{{1.0, 0.0}, {0.0, 1.0}}};
    double tau = 1.0;
    double t1 = 1.0;  // top-wall arc-length factor
    double t2 = 1.0;  // bottom-wall arc-length factor
};

// Coefficients of the transformed Helmholtz operator
// div(S grad u) + k^2 tau u in straightened coordinates: identity outside the
// bent section; S = diag((r+1)/(r+y), (r+y)/(r+1)), tau = (r+y)/(r+1) inside
// (mirrored in y for theta < 0). det S = 1 everywhere.
[[nodiscard]] MetricData bend_metric(const BendParams& p, double x, double y);
[[nodiscard]] MetricData bends_metric(const BendList& list, double x, double y);

// Effective one-dimensional reflection source of a bend: a rectangle on
// [x_c, x_c + |theta|(r+1)] with amplitude
//   int_0^1 (y-1)(1/(r+y) + 1/(r+1)) dy = 1 - 1/(2(r+1)) - (r+1) ln((r+1)/r),
// which behaves like -1/r for large r.
struct RectangleProfile {
    double x_start = 0.0;
    double x_end = 0.0;
    double amplitude = 0.0;

    [[nodiscard]] LineFunction sampled(double x0, double dx, int n) const;
};

[[nodiscard]] RectangleProfile bend_source_profile(const BendParams& p);

// Amplitude of the bend source rectangle as a function of r (monotone
// increasing, -> 0^- as r -> infinity).
[[nodiscard]] double bend_amplitude(double r);

// Transverse profile (y-1)(1/(r+y) + 1/(r+1)) whose y-average is the
// rectangle amplitude above.
[[nodiscard]] double bend_transverse_profile(double r, double y);

// Predicted first-mode scattered datum at the reference section:
// v_{k,0}(0) = 2 k^2 Gamma(f)(2k) with f the rectangle profile (closed form).
[[nodiscard]] cdouble bend_data_model(const BendParams& p, double k);

// Rectangle fit model in the half-Fourier domain:
//   half_fourier(-p1 * 1_[p2, p2+p3])(w) = -(i p1 / w) e^{i w (2 p2 + p3)/2}
//                                          * sin(p3 w / 2).
// Requires w > 0.
[[nodiscard]] cdouble bend_fit_model(double p1, double p2, double p3, double omega);

// Invert the fitted rectangle back to geometry: r solves
// bend_amplitude(r) = -p1 by bisection on [1e-3, 1e9]; x_c = p2;
// theta = p3 / (r + 1).
[[nodiscard]] BendParams bend_params_from_profile(double p1, double p2, double p3);

// ---------------------------------------------------------------------------
// Bump geometry
// ---------------------------------------------------------------------------

// Centered-difference derivative of a sampled profile (one-sided at edges).
[[nodiscard]] LineFunction profile_derivative(const LineFunction& f);

// Coefficients of the straightened-channel operator for wall profiles
// phi(x,y) = (x, (1+h-g) y + g):
//   S = [[ a, b ], [ b, (b^2+1)/a ]],  a = 1+h-g,  b = -((h'-g') y + g'),
//   tau = a, t1 = sqrt(1+h'^2), t2 = sqrt(1+g'^2).  det S = 1.
// h, g, h', g' are evaluated by linear interpolation on the profile grid.
// The evaluator form precomputes the derivative profiles once.
class BumpEvaluator {
  public:
    explicit BumpEvaluator(const BumpProfiles& b);
    [[nodiscard]] MetricData at(double x, double y) const;
    [[nodiscard]] double h(double x) const;
    [[nodiscard]] double g(double x) const;
    [[nodiscard]] double dh(double x) const;
    [[nodiscard]] double dg(double x) const;

  private:
    LineFunction h_, g_, dh_, dg_;
};

[[nodiscard]] MetricData bump_metric(const BumpProfiles& b, double x, double y);

// First- and second-mode reflection data:
//   v_{k,0}(0) = 2ik Gamma(h'-g')(2k)
//   v_{k,1}(0) = -sqrt(2) i k (k1+k)/k1 * Gamma(h'+g')(k+k1)   (only k > pi)
// The mode-1 value is absent for k <= pi and rejected inside the cutoff
// guard band around pi.
struct BumpData {
    cdouble d0;
    std::optional<cdouble> d1;
};

[[nodiscard]] BumpData bump_data_model(const BumpProfiles& b, double k,
                                       double cutoff_guard = 0.2);

// ---------------------------------------------------------------------------
// Inhomogeneity data
// ---------------------------------------------------------------------------

// Mode-n reflection datum v_{n,k}(0) = ((k+k_n) k^2 / k_n) Gamma(h_n)(k+k_n),
// where h_n is the transverse modal component of the map. Requires the mode
// to be propagative with a cutoff guard: k > n pi + guard.
[[nodiscard]] cdouble inhomogeneity_data_model(const InhomogeneityMap& m, double k, int n,
                                               double cutoff_guard = 0.2);

}  // namespace wgt
