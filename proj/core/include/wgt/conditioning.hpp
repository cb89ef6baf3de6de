#pragma once

#include <vector>

#include "wgt/modal.hpp"

namespace wgt {

// Frequency-band rule for the conditioning study. The support grid X on
// [1-r, 1+r] follows the fixed rule round(points_per_unit_r * r) + 1 points;
// the band is [omega0, omega_max] taken in the continuum limit (exact
// integral over omega), with omega_max = 2*pi/h by default -- the band over
// which the untruncated grid problem is perfectly conditioned.
struct ConditioningGrid {
    int points_per_unit_r = 500;
    double omega_max = 0.0;  // 0 -> 2*pi/h for the current X grid

    void validate() const;
};

struct ConditioningEntry {
    double r = 0.0;
    double omega0 = 0.0;
    double cond = 0.0;               // lambda_max / lambda_min of the normal matrix
    bool numerically_singular = false;  // lambda_min below 1e3 * eps * lambda_max
};

// Eigenvalues (ascending) of a dense Hermitian matrix stored row-major,
// computed by cyclic Jacobi rotations with unitary phase handling.
[[nodiscard]] std::vector<double> hermitian_eigenvalues(std::vector<cdouble> a, int n);

// Normal matrix of the band-restricted reconstruction operator on the grid
// of [1-r, 1+r]: A_pq = (h/2pi) * integral_{omega0}^{omega_max}
// e^{i omega (x_p - x_q)} d omega, Hermitian positive semi-definite.
[[nodiscard]] std::vector<cdouble> band_normal_matrix(double r, double omega0,
                                                      const ConditioningGrid& grid, int* n_out);

// Condition number sweep over all (r, omega0) pairs, row-major in r then
// omega0 order. Entries whose smallest eigenvalue falls below the ratio
// floor are flagged and report the floor value 1 / (1e3 * eps).
[[nodiscard]] std::vector<ConditioningEntry> conditioning_study(
    const std::vector<double>& r_values, const std::vector<double>& omega0_values,
    const ConditioningGrid& grid = {});

}  // namespace wgt
