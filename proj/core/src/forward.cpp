#include "wgt/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wgt/errors.hpp"
#include "wgt/log.hpp"

namespace wgt {

namespace {

// Decay exponent beyond which an evanescent mode's contribution is below
// double precision (e^-40 ~ 4e-18).
constexpr double evanescent_cut = 40.0;

bool all_zero(const LineFunction& f) {
    return std::all_of(f.samples.begin(), f.samples.end(),
                       [](cdouble v) { return v == cdouble(0.0); });
}

}  // namespace

SectionField RectangleField::section(int i) const {
    SectionField s;
    s.samples.resize(grid.ny);
    for (int j = 0; j < grid.ny; ++j) s.samples[j] = at(i, j);
    return s;
}

RectangleField make_field(const RectangleGrid& grid) {
    if (grid.nx < 2 || grid.ny < 2)
        throw validation_error("make_field: grid needs at least 2x2 samples");
    if (grid.dx <= 0.0) throw validation_error("make_field: dx must be positive");
    RectangleField f;
    f.grid = grid;
    f.samples.assign(static_cast<std::size_t>(grid.nx) * grid.ny, cdouble(0.0));
    return f;
}

double l2_norm(const RectangleField& field) {
    double acc = 0.0;
    const int nx = field.grid.nx;
    const int ny = field.grid.ny;
    for (int i = 0; i < nx; ++i) {
        const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        for (int j = 0; j < ny; ++j) {
            const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            acc += wx * wy * std::norm(field.at(i, j));
        }
    }
    return std::sqrt(acc * field.grid.dx * field.grid.dy());
}

LineFunction green_convolve(const LineFunction& s_n, const LongitudinalWavenumber& k_n,
                            double x0, double dx, int nx) {
    if (std::abs(k_n.value) == 0.0)
        throw numerical_error("green_convolve: k_n = 0 (cutoff) for mode " +
                              std::to_string(k_n.mode));
    LineFunction u = make_line(x0, dx, nx);
    if (all_zero(s_n)) return u;

    // Skip evanescent modes that cannot reach the evaluation window.
    if (k_n.value.imag() > 0.0) {
        double gap = 0.0;
        if (x0 > s_n.x_end())
            gap = x0 - s_n.x_end();
        else if (u.x_end() < s_n.x0)
            gap = s_n.x0 - u.x_end();
        if (k_n.value.imag() * gap > evanescent_cut) return u;
    }

    const cdouble prefactor = cdouble(0.0, 0.5) / k_n.value;
    for (int i = 0; i < nx; ++i) {
        const double x = u.x(i);
        cdouble sum(0.0);
        for (int j = 0; j < s_n.size(); ++j) {
            const double w = (j == 0 || j == s_n.size() - 1) ? 0.5 : 1.0;
            const cdouble phase = std::exp(cdouble(0.0, 1.0) * k_n.value * std::abs(x - s_n.x(j)));
            sum += w * s_n.samples[j] * phase;
        }
        u.samples[i] = prefactor * sum * s_n.dx;
    }
    return u;
}

RectangleField solve_source(const InteriorSource& s, double k, const RectangleGrid& grid) {
    RectangleField field = make_field(grid);
    for (int n = 0; n < static_cast<int>(s.modal.size()); ++n) {
        if (all_zero(s.modal[n])) continue;
        const LongitudinalWavenumber kn = longitudinal_wavenumber(k, n);
        const LineFunction u_n = green_convolve(s.modal[n], kn, grid.x0, grid.dx, grid.nx);
        for (int i = 0; i < grid.nx; ++i) {
            if (u_n.samples[i] == cdouble(0.0)) continue;
            for (int j = 0; j < grid.ny; ++j)
                field.at(i, j) += u_n.samples[i] * eigenfunction(n, grid.y(j));
        }
    }
    return field;
}

RectangleField solve_boundary(const BoundarySources& b, double k, const RectangleGrid& grid,
                              int N_modes) {
    if (b.b1.size() != b.b2.size() || b.b1.x0 != b.b2.x0 || b.b1.dx != b.b2.dx)
        throw validation_error("solve_boundary: b1 and b2 must share a grid");
    RectangleField field = make_field(grid);
    const bool b1_zero = all_zero(b.b1);
    const bool b2_zero = all_zero(b.b2);
    if (b1_zero && b2_zero) return field;

    LineFunction s_n = make_line(b.b1.x0, b.b1.dx, b.b1.size());
    for (int n = 0; n <= N_modes; ++n) {
        // Wall traces of the transverse modes.
        const double phi_top = eigenfunction(n, 1.0);
        const double phi_bottom = eigenfunction(n, 0.0);
        for (int j = 0; j < s_n.size(); ++j)
            s_n.samples[j] = b.b1.samples[j] * phi_top + b.b2.samples[j] * phi_bottom;
        if (all_zero(s_n)) continue;
        const LongitudinalWavenumber kn = longitudinal_wavenumber(k, n);
        const LineFunction u_n = green_convolve(s_n, kn, grid.x0, grid.dx, grid.nx);
        for (int i = 0; i < grid.nx; ++i) {
            if (u_n.samples[i] == cdouble(0.0)) continue;
            for (int j = 0; j < grid.ny; ++j)
                field.at(i, j) += u_n.samples[i] * eigenfunction(n, grid.y(j));
        }
    }
    return field;
}

BornResult born_series(const InteriorSource& s, const BoundarySources& b, const VolumeOp& S_op,
                       const BoundaryOp& T1_op, const BoundaryOp& T2_op, double k,
                       const RectangleGrid& grid, int N_modes, int m_max, double tol) {
    BornResult result;
    RectangleField term = solve_source(s, k, grid);
    {
        const RectangleField gterm = solve_boundary(b, k, grid, N_modes);
        for (std::size_t p = 0; p < term.samples.size(); ++p)
            term.samples[p] += gterm.samples[p];
    }
    result.field = term;
    result.iterations = 1;

    const double norm0 = l2_norm(term);
    if (norm0 == 0.0 || (!S_op && !T1_op && !T2_op)) {
        result.converged = true;
        return result;
    }

    std::vector<double> norms{norm0};
    int growth_streak = 0;
    for (int m = 1; m < m_max; ++m) {
        RectangleField next = S_op ? solve_source(S_op(term), k, grid) : make_field(grid);
        if (T1_op || T2_op) {
            BoundarySources bt;
            bt.b1 = T1_op ? T1_op(term) : make_line(grid.x0, grid.dx, grid.nx);
            bt.b2 = T2_op ? T2_op(term) : make_line(grid.x0, grid.dx, grid.nx);
            const RectangleField gterm = solve_boundary(bt, k, grid, N_modes);
            for (std::size_t p = 0; p < next.samples.size(); ++p)
                next.samples[p] += gterm.samples[p];
        }
        const double nrm = l2_norm(next);
        if (!std::isfinite(nrm))
            throw numerical_error("born_series: non-finite term at iteration " +
                                  std::to_string(m));
        growth_streak = nrm > norms.back() ? growth_streak + 1 : 0;
        if (growth_streak >= 3)
            throw numerical_error(
                "born_series: three consecutive growing terms; the perturbation is too "
                "strong for the series (contraction hypothesis violated)");
        norms.push_back(nrm);
        for (std::size_t p = 0; p < next.samples.size(); ++p)
            result.field.samples[p] += next.samples[p];
        result.iterations = m + 1;
        term = std::move(next);

        if (nrm < tol * norm0) {
            const std::size_t c = norms.size();
            result.converged =
                c < 3 || (norms[c - 1] < norms[c - 2] && norms[c - 2] < norms[c - 3]);
            if (result.converged) return result;
        }
    }
    log::warn("born_series: iteration cap " + std::to_string(m_max) +
              " reached before the term norm dropped below tolerance");
    result.converged = false;
    return result;
}

}  // namespace wgt
