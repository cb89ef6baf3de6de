#include "wgt/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "wgt/errors.hpp"
#include "wgt/log.hpp"

namespace wgt {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

void ConditioningGrid::validate() const {
    if (points_per_unit_r < 2) throw validation_error("conditioning grid: points_per_unit_r < 2");
    if (omega_max < 0.0) throw validation_error("conditioning grid: omega_max < 0");
}

std::vector<cdouble> band_normal_matrix(double r, double omega0, const ConditioningGrid& grid,
                                        int* n_out) {
    grid.validate();
    if (!(r > 0.0)) throw validation_error("conditioning: support radius r must be > 0");
    if (omega0 < 0.0) throw validation_error("conditioning: omega0 must be >= 0");
    const int n = static_cast<int>(std::lround(grid.points_per_unit_r * r)) + 1;
    if (n < 2) throw validation_error("conditioning: grid for r too small");
    const double h = 2.0 * r / (n - 1);
    const double omega_max = grid.omega_max > 0.0 ? grid.omega_max : 2.0 * kPi / h;
    if (omega_max <= omega0)
        throw validation_error("conditioning: band [omega0, omega_max] is empty");

    std::vector<cdouble> a(static_cast<std::size_t>(n) * n);
    const double w = h / (2.0 * kPi);
    for (int p = 0; p < n; ++p) {
        a[static_cast<std::size_t>(p) * n + p] = w * (omega_max - omega0);
        for (int q = p + 1; q < n; ++q) {
            const double delta = (p - q) * h;  // x_p - x_q
            const cdouble num = std::exp(cdouble(0.0, omega_max * delta)) -
                                std::exp(cdouble(0.0, omega0 * delta));
            const cdouble v = w * num / cdouble(0.0, delta);
            a[static_cast<std::size_t>(p) * n + q] = v;
            a[static_cast<std::size_t>(q) * n + p] = std::conj(v);
        }
    }
    if (n_out) *n_out = n;
    return a;
}

std::vector<double> hermitian_eigenvalues(std::vector<cdouble> a, int n) {
    if (n < 1) throw validation_error("hermitian_eigenvalues: empty matrix");
    if (a.size() != static_cast<std::size_t>(n) * n)
        throw validation_error("hermitian_eigenvalues: size mismatch");
    auto at = [&](int i, int j) -> cdouble& { return a[static_cast<std::size_t>(i) * n + j]; };

    double diag_norm = 0.0;
    for (int i = 0; i < n; ++i) diag_norm += std::norm(at(i, i));
    diag_norm = std::sqrt(std::max(diag_norm, 1e-300));

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(at(p, q));
        off = std::sqrt(off);
        if (off <= 1e-15 * diag_norm) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = std::abs(at(p, q));
                if (apq < 1e-300) continue;
                // Unitary 2x2 rotation J with J_pp = J_qq = c,
                // J_pq = s e^{i theta}, J_qp = -s e^{-i theta}, where
                // a_pq = |a_pq| e^{i theta}; annihilates the (p,q) entry.
                const cdouble phase = at(p, q) / apq;
                const double app = at(p, p).real();
                const double aqq = at(q, q).real();
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cdouble sp = s * phase;          // s e^{i theta}
                const cdouble spc = std::conj(sp);     // s e^{-i theta}

                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const cdouble aip = at(i, p);
                    const cdouble aiq = at(i, q);
                    at(i, p) = c * aip - spc * aiq;
                    at(i, q) = sp * aip + c * aiq;
                    at(p, i) = std::conj(at(i, p));
                    at(q, i) = std::conj(at(i, q));
                }
                const double delta = t * apq;
                at(p, p) = app - delta;
                at(q, q) = aqq + delta;
                at(p, q) = 0.0;
                at(q, p) = 0.0;
            }
        }
    }

    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[i] = at(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<ConditioningEntry> conditioning_study(const std::vector<double>& r_values,
                                                  const std::vector<double>& omega0_values,
                                                  const ConditioningGrid& grid) {
    if (r_values.empty() || omega0_values.empty())
        throw validation_error("conditioning study: empty parameter lists");
    std::vector<ConditioningEntry> table;
    table.reserve(r_values.size() * omega0_values.size());
    const double floor_ratio = 1.0 / (1e3 * std::numeric_limits<double>::epsilon());
    for (double r : r_values) {
        for (double omega0 : omega0_values) {
            int n = 0;
            const std::vector<cdouble> a = band_normal_matrix(r, omega0, grid, &n);
            const std::vector<double> eig = hermitian_eigenvalues(a, n);
            const double lam_max = eig.back();
            const double lam_min = eig.front();
            ConditioningEntry e;
            e.r = r;
            e.omega0 = omega0;
            if (!(lam_max > 0.0)) throw numerical_error("conditioning: non-positive spectrum");
            if (lam_min < 1e3 * std::numeric_limits<double>::epsilon() * lam_max) {
                e.numerically_singular = true;
                e.cond = floor_ratio;
                log::warn("conditioning: normal matrix numerically singular at r=" +
                         std::to_string(r) + ", omega0=" + std::to_string(omega0) +
                         "; reporting ratio floor");
            } else {
                e.cond = lam_max / lam_min;
            }
            table.push_back(e);
        }
    }
    return table;
}

}  // namespace wgt
