#include "wgt/modal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wgt/errors.hpp"

namespace wgt {

namespace {
constexpr double pi = std::numbers::pi;
}

double eigenfunction(int n, double y) {
    if (n < 0) throw validation_error("eigenfunction: mode index must be nonnegative");
    if (y < 0.0 || y > 1.0)
        throw validation_error("eigenfunction: y = " + std::to_string(y) + " outside [0,1]");
    if (n == 0) return 1.0;
    return std::sqrt(2.0) * std::cos(n * pi * y);
}

bool is_near_cutoff(double k, double guard) {
    const double nearest = std::round(k / pi) * pi;
    return std::abs(k - nearest) < guard;
}

LongitudinalWavenumber longitudinal_wavenumber(double k, int n) {
    if (n < 0) throw validation_error("longitudinal_wavenumber: negative mode index");
    const double kn2 = k * k - static_cast<double>(n) * n * pi * pi;
    if (kn2 == 0.0)
        throw numerical_error("longitudinal_wavenumber: k = " + std::to_string(k) +
                              " sits exactly on the mode-" + std::to_string(n) + " cutoff");
    LongitudinalWavenumber kn;
    kn.mode = n;
    kn.k = k;
    // Branch with Re >= 0, Im >= 0: real above cutoff, imaginary below.
    kn.value = kn2 > 0.0 ? cdouble(std::sqrt(kn2), 0.0) : cdouble(0.0, std::sqrt(-kn2));
    return kn;
}

ModalCoefficients decompose(const SectionField& field, int N) {
    if (N < 0) throw validation_error("decompose: negative truncation");
    if (field.ny() < 2) throw validation_error("decompose: section needs at least 2 samples");
    if (N > 0 && field.ny() < 4 * N)
        throw validation_error("decompose: ny = " + std::to_string(field.ny()) +
                               " too coarse for N = " + std::to_string(N) +
                               " (need ny >= 4N to avoid aliasing)");
    const int ny = field.ny();
    const double dy = field.dy();
    ModalCoefficients out;
    out.coeffs.assign(N + 1, cdouble(0.0));
    for (int n = 0; n <= N; ++n) {
        cdouble sum(0.0);
        for (int j = 0; j < ny; ++j) {
            const double w = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            sum += w * field.samples[j] * eigenfunction(n, field.y(j));
        }
        out.coeffs[n] = sum * dy;
    }
    return out;
}

SectionField recompose(const ModalCoefficients& coeffs, int ny) {
    if (ny < 2) throw validation_error("recompose: need at least 2 samples");
    SectionField field;
    field.samples.assign(ny, cdouble(0.0));
    for (int j = 0; j < ny; ++j) {
        const double y = field.y(j);
        cdouble sum(0.0);
        for (int n = 0; n <= coeffs.truncation(); ++n)
            sum += coeffs.coeffs[n] * eigenfunction(n, y);
        field.samples[j] = sum;
    }
    return field;
}

double h_norm(const std::vector<cdouble>& values, const std::vector<double>& omega_grid) {
    if (omega_grid.empty()) throw validation_error("h_norm: empty frequency grid");
    if (values.size() != omega_grid.size())
        throw validation_error("h_norm: value/grid size mismatch");
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        if (omega_grid[i] <= 0.0)
            throw validation_error("h_norm: frequencies must be positive");
        if (i > 0 && omega_grid[i] <= omega_grid[i - 1])
            throw validation_error("h_norm: frequency grid must be strictly increasing");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < omega_grid.size(); ++i) {
        const double fa = omega_grid[i] * omega_grid[i] * std::norm(values[i]);
        const double fb = omega_grid[i + 1] * omega_grid[i + 1] * std::norm(values[i + 1]);
        acc += 0.5 * (fa + fb) * (omega_grid[i + 1] - omega_grid[i]);
    }
    return std::sqrt(acc);
}

}  // namespace wgt
