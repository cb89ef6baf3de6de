#pragma once

#include <complex>
#include <vector>

namespace wgt {

using cdouble = std::complex<double>;

// Transverse eigenfunctions of the unit-width cross-section with Neumann
// walls: phi_0 = 1, phi_n(y) = sqrt(2) cos(n pi y). Orthonormal in L^2(0,1).
[[nodiscard]] double eigenfunction(int n, double y);

// True iff k lies within `guard` of a modal cutoff n*pi (n = 0, 1, ...).
// Frequencies that close to a cutoff make k_n nearly zero and the modal
// Green's kernel 1/(2 k_n) blow up; callers should skip or reject them.
[[nodiscard]] bool is_near_cutoff(double k, double guard = 0.2);

// k_n with k_n^2 = k^2 - n^2 pi^2 on the branch Re(k_n) >= 0, Im(k_n) >= 0:
// real for propagative modes (n < k/pi), purely imaginary for evanescent.
struct LongitudinalWavenumber {
    cdouble value;
    int mode = 0;
    double k = 0.0;
};

[[nodiscard]] LongitudinalWavenumber longitudinal_wavenumber(double k, int n);

// Complex field sampled on the uniform closed y-grid over [0,1]
// (spacing 1/(ny-1), endpoints included).
struct SectionField {
    std::vector<cdouble> samples;

    [[nodiscard]] int ny() const { return static_cast<int>(samples.size()); }
    [[nodiscard]] double dy() const { return 1.0 / (ny() - 1); }
    [[nodiscard]] double y(int j) const { return j * dy(); }
};

struct ModalCoefficients {
    std::vector<cdouble> coeffs;  // index = mode n, 0..N

    [[nodiscard]] int truncation() const { return static_cast<int>(coeffs.size()) - 1; }
};

// coeffs[n] = trapezoid quadrature of field * phi_n over [0,1].
// Requires ny >= 4N as an anti-aliasing guard.
[[nodiscard]] ModalCoefficients decompose(const SectionField& field, int N);

// Pointwise sum over modes of coeffs[n] * phi_n(y) on an ny-point grid.
[[nodiscard]] SectionField recompose(const ModalCoefficients& coeffs, int ny);

// Frequency-space energy norm sqrt( int_0^inf omega^2 |u(omega)|^2 domega ),
// by trapezoid quadrature on the given strictly increasing positive grid.
[[nodiscard]] double h_norm(const std::vector<cdouble>& values,
                            const std::vector<double>& omega_grid);

}  // namespace wgt
