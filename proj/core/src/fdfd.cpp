#include "wgt/fdfd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <sstream>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include "wgt/errors.hpp"
#include "wgt/log.hpp"

static_assert(sizeof(lapack_complex_double) == sizeof(wgt::cdouble),
              "LAPACK complex type must match std::complex<double>");

namespace wgt {

namespace {

constexpr double kPi = 3.14159265358979323846;

lapack_complex_double* lp(cdouble* p) { return reinterpret_cast<lapack_complex_double*>(p); }

double overlap_fraction(double lo, double hi, double a, double b) {
    const double w = std::min(hi, b) - std::max(lo, a);
    return w > 0.0 ? w / (hi - lo) : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config / band plumbing
// ---------------------------------------------------------------------------

double PmlProfile::absorption(double x, double k) const {
    double s = 0.0;
    if (x >= x_right) s = -k * (x - x_right);
    if (x <= x_left) s = k * (x - x_left);
    return s;
}

cdouble PmlProfile::stretch(double x, double k) const {
    const double s = absorption(x, k);
    return 1.0 / cdouble(1.0, -s / k);
}

int DiscretizationConfig::nx() const {
    return static_cast<int>(std::lround((x_max - x_min) / dx)) + 1;
}

int DiscretizationConfig::ny() const { return static_cast<int>(std::lround(1.0 / dy)) + 1; }

RectangleGrid DiscretizationConfig::grid() const {
    RectangleGrid g;
    g.x0 = x_min;
    g.dx = dx;
    g.nx = nx();
    g.ny = ny();
    return g;
}

void DiscretizationConfig::validate() const {
    if (!(dx > 0.0) || !(dy > 0.0)) throw validation_error("discretization: steps must be positive");
    if (!(x_max > x_min)) throw validation_error("discretization: empty window");
    if (std::abs((x_max - x_min) / dx - std::lround((x_max - x_min) / dx)) > 1e-6)
        throw validation_error("discretization: window length must be a multiple of dx");
    if (std::abs(1.0 / dy - std::lround(1.0 / dy)) > 1e-6)
        throw validation_error("discretization: 1/dy must be an integer");
    if (closure == BoundaryClosure::pml) {
        if (pml.x_left < x_min || pml.x_right > x_max || !(pml.x_left < pml.x_right))
            throw validation_error("discretization: physical window must sit inside the grid");
    }
    if (!(dispersion_budget > 0.0))
        throw validation_error("discretization: dispersion budget must be positive");
}

DiscretizationConfig DiscretizationConfig::refined_for(double k) const {
    DiscretizationConfig out = *this;
    if (!auto_refine_dx || !(k > 0.0)) return out;
    const double L = x_max - x_min;
    const double target = std::sqrt(24.0 * dispersion_budget / (k * k * k * L));
    if (target < dx) {
        const int n_cells = static_cast<int>(std::ceil(L / target));
        out.dx = L / n_cells;
    }
    return out;
}

void BandedComplexSystem::add(int row, int col, cdouble value) {
    if (row < 0 || col < 0 || row >= n || col >= n || col - row > ku || row - col > kl)
        throw numerical_error("banded system: entry outside the band");
    band[static_cast<std::size_t>(col) * (kl + ku + 1) + ku + row - col] += value;
}

std::vector<cdouble> BandedComplexSystem::multiply(const std::vector<cdouble>& x) const {
    if (static_cast<int>(x.size()) != n)
        throw validation_error("banded system: vector size mismatch");
    std::vector<cdouble> y(static_cast<std::size_t>(n), cdouble(0.0, 0.0));
    const int ldab = kl + ku + 1;
    for (int c = 0; c < n; ++c) {
        const cdouble xc = x[c];
        if (xc == cdouble(0.0, 0.0)) continue;
        const int rlo = std::max(0, c - ku);
        const int rhi = std::min(n - 1, c + kl);
        const cdouble* colp = band.data() + static_cast<std::size_t>(c) * ldab;
        for (int r = rlo; r <= rhi; ++r) y[r] += colp[ku + r - c] * xc;
    }
    return y;
}

cdouble discrete_mode_wavenumber(double k, int n, double dx, double dy) {
    if (!(k > 0.0) || !(dx > 0.0) || !(dy > 0.0) || n < 0)
        throw validation_error("discrete_mode_wavenumber: bad arguments");
    const double lam = (2.0 / (dy * dy)) * (1.0 - std::cos(n * kPi * dy));
    const cdouble z(1.0 - (k * k - lam) * dx * dx / 2.0, 0.0);
    cdouble kap = std::acos(z) / dx;
    if (kap.imag() < 0.0) kap = std::conj(kap);
    if (kap.real() < 0.0) kap = -kap;
    return kap;
}

// ---------------------------------------------------------------------------
// Coefficient providers (axis-aligned defects: none / bend(s) / inhomogeneity)
// ---------------------------------------------------------------------------

namespace {

struct AxisCoefficients {
    // Harmonic average of S_xx over the dx-interval centred on the x-face.
    std::function<double(double, double)> a_face;
    // Arithmetic cell average (in x) of S_yy at a y-face.
    std::function<double(double, double)> c_face;
    // Arithmetic cell average of tau.
    std::function<double(double, double)> tau;
};

AxisCoefficients empty_coefficients() {
    auto one = [](double, double) { return 1.0; };
    return {one, one, one};
}

AxisCoefficients bend_coefficients(BendList bends, double dx) {
    for (std::size_t i = 0; i + 1 < bends.size(); ++i)
        if (bends[i + 1].x_c < bends[i].x_end())
            throw validation_error("bends: arc sections must be disjoint and ordered");
    auto mirrored_y = [](const BendParams& p, double y) {
        return p.theta > 0.0 ? y : 1.0 - y;
    };
    auto a_face = [bends, dx, mirrored_y](double xf, double y) {
        double inv = 1.0;
        for (const auto& p : bends) {
            if (p.theta == 0.0) continue;
            const double w = overlap_fraction(xf - dx / 2, xf + dx / 2, p.x_c, p.x_end());
            if (w > 0.0) {
                const double sxx = (p.r + 1.0) / (p.r + mirrored_y(p, y));
                inv += w * (1.0 / sxx - 1.0);
            }
        }
        return 1.0 / inv;
    };
    auto c_face = [bends, dx, mirrored_y](double x, double yf) {
        double val = 1.0;
        for (const auto& p : bends) {
            if (p.theta == 0.0) continue;
            const double w = overlap_fraction(x - dx / 2, x + dx / 2, p.x_c, p.x_end());
            if (w > 0.0) {
                const double syy = (p.r + mirrored_y(p, yf)) / (p.r + 1.0);
                val += w * (syy - 1.0);
            }
        }
        return val;
    };
    auto tau = [bends, dx, mirrored_y](double x, double y) {
        double val = 1.0;
        for (const auto& p : bends) {
            if (p.theta == 0.0) continue;
            const double w = overlap_fraction(x - dx / 2, x + dx / 2, p.x_c, p.x_end());
            if (w > 0.0) {
                const double t = (p.r + mirrored_y(p, y)) / (p.r + 1.0);
                val += w * (t - 1.0);
            }
        }
        return val;
    };
    return {a_face, c_face, tau};
}

// Bilinear interpolation of the index map, zero outside its x-extent.
double inhom_sample(const InhomogeneityMap& m, double x, double y) {
    const double tx = (x - m.x0) / m.dx;
    if (tx < 0.0 || tx > m.nx - 1) return 0.0;
    double ty = y / m.dy();
    ty = std::clamp(ty, 0.0, static_cast<double>(m.ny - 1));
    const int i0 = std::min(static_cast<int>(tx), m.nx - 2);
    const int j0 = std::min(static_cast<int>(ty), m.ny - 2);
    const double fx = tx - i0, fy = ty - j0;
    return m.at(i0, j0) * (1 - fx) * (1 - fy) + m.at(i0 + 1, j0) * fx * (1 - fy) +
           m.at(i0, j0 + 1) * (1 - fx) * fy + m.at(i0 + 1, j0 + 1) * fx * fy;
}

AxisCoefficients inhomogeneity_coefficients(const InhomogeneityMap& m, double dx, double dy) {
    auto one = [](double, double) { return 1.0; };
    auto tau = [&m, dx, dy](double x, double y) {
        // 3x3 subsample average over the dual cell smooths indicator maps.
        double acc = 0.0;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                acc += inhom_sample(m, x + a * dx / 3.0, y + b * dy / 3.0);
        return 1.0 + acc / 9.0;
    };
    return {one, one, tau};
}

// ---------------------------------------------------------------------------
// Closure helpers
// ---------------------------------------------------------------------------

// Dense one-plane propagation matrix R = Psi diag(e^{i kappa_n dx}) Psi^{-1}
// with Psi[j][n] = cos(n pi y_j); row-major R[j*ny + m].
std::vector<cdouble> closure_matrix(double k, double dx, double dy, int ny) {
    std::vector<cdouble> A(static_cast<std::size_t>(ny) * ny);   // Psi^T, column-major
    std::vector<cdouble> B(static_cast<std::size_t>(ny) * ny);   // (Psi diag)^T, column-major
    for (int c = 0; c < ny; ++c) {
        const double yc = c * dy;
        for (int r = 0; r < ny; ++r) {
            // A(r,c) = Psi(c,r) = cos(r pi y_c)
            A[static_cast<std::size_t>(c) * ny + r] = std::cos(r * kPi * yc);
        }
    }
    for (int c = 0; c < ny; ++c) {
        for (int r = 0; r < ny; ++r) {
            // B(r,c) = Psi(c, r) * rho_r
            const cdouble rho = std::exp(cdouble(0.0, 1.0) * discrete_mode_wavenumber(k, r, dx, dy) * dx);
            B[static_cast<std::size_t>(c) * ny + r] = std::cos(r * kPi * c * dy) * rho;
        }
    }
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(ny));
    const lapack_int info = LAPACKE_zgesv(LAPACK_COL_MAJOR, ny, ny, lp(A.data()), ny,
                                          ipiv.data(), lp(B.data()), ny);
    if (info != 0)
        throw numerical_error("closure matrix: transverse mode matrix is singular");
    // B now holds R^T column-major, i.e. R[j*ny+m] = B[j*ny+m] read row-major.
    return B;
}

struct AssemblyContext {
    DiscretizationConfig cfg;
    double k = 0.0;
    int nx = 0, ny = 0;
    std::vector<cdouble> ci, cih;  // PML stretch at nodes / east faces (1 when absent)

    double x(int i) const { return cfg.x_min + i * cfg.dx; }
};

AssemblyContext make_context(double k, const DiscretizationConfig& cfg) {
    cfg.validate();
    if (!(k > 0.0)) throw validation_error("assemble: k must be positive");
    if (k * cfg.dx >= 2.0)
        throw validation_error("assemble: k*dx >= 2, grid cannot represent the incident mode");
    if (k * cfg.dx > 2.0 * kPi / 10.0)
        log::warn("assemble: fewer than 10 grid points per wavelength at k = " +
                 std::to_string(k));
    AssemblyContext ctx;
    ctx.cfg = cfg;
    ctx.k = k;
    ctx.nx = cfg.nx();
    ctx.ny = cfg.ny();
    ctx.ci.assign(ctx.nx, cdouble(1.0, 0.0));
    ctx.cih.assign(ctx.nx, cdouble(1.0, 0.0));
    if (cfg.closure == BoundaryClosure::pml) {
        for (int i = 0; i < ctx.nx; ++i) {
            ctx.ci[i] = cfg.pml.stretch(ctx.x(i), k);
            ctx.cih[i] = cfg.pml.stretch(ctx.x(i) + cfg.dx / 2.0, k);
        }
    }
    return ctx;
}

BandedComplexSystem new_system(const AssemblyContext& ctx, int half_bandwidth) {
    BandedComplexSystem sys;
    sys.n = ctx.nx * ctx.ny;
    sys.kl = sys.ku = half_bandwidth;
    sys.band.assign(static_cast<std::size_t>(sys.kl + sys.ku + 1) * sys.n, cdouble(0.0, 0.0));
    sys.rhs.assign(static_cast<std::size_t>(sys.n), cdouble(0.0, 0.0));
    sys.grid = ctx.cfg.grid();
    sys.k = ctx.k;
    return sys;
}

void add_modal_closure(BandedComplexSystem& sys, const AssemblyContext& ctx) {
    const int nx = ctx.nx, ny = ctx.ny;
    const auto R = closure_matrix(ctx.k, ctx.cfg.dx, ctx.cfg.dy, ny);
    const double a = 1.0 / (ctx.cfg.dx * ctx.cfg.dx);
    for (int j = 0; j < ny; ++j) {
        const int p = j;                      // i = 0
        const int q = (nx - 1) * ny + j;      // i = nx-1
        sys.add(p, ny + j, a);
        sys.add(p, p, -2.0 * a);
        sys.add(q, (nx - 2) * ny + j, a);
        sys.add(q, q, -2.0 * a);
        for (int m = 0; m < ny; ++m) {
            const cdouble rv = a * R[static_cast<std::size_t>(j) * ny + m];
            sys.add(p, m, rv);
            sys.add(q, (nx - 1) * ny + m, rv);
        }
    }
}

// Shared y-part (mirror ghosts at the walls) for 5-point rows.
void add_y_part(BandedComplexSystem& sys, int p, int j, int ny, double cN, double cS,
                cdouble& diag, double dy) {
    const double d2 = dy * dy;
    if (j == 0) {
        sys.add(p, p + 1, 2.0 * cN / d2);
        diag -= 2.0 * cN / d2;
    } else if (j == ny - 1) {
        sys.add(p, p - 1, 2.0 * cS / d2);
        diag -= 2.0 * cS / d2;
    } else {
        sys.add(p, p + 1, cN / d2);
        sys.add(p, p - 1, cS / d2);
        diag -= (cN + cS) / d2;
    }
}

BandedComplexSystem assemble_axis(const AxisCoefficients& co, const AssemblyContext& ctx) {
    const int nx = ctx.nx, ny = ctx.ny;
    const double dx = ctx.cfg.dx, dy = ctx.cfg.dy, k = ctx.k;
    BandedComplexSystem sys = new_system(ctx, ny + 1);
    for (int i = 0; i < nx; ++i) {
        const double x = ctx.x(i);
        const bool end_col = (i == 0 || i == nx - 1);
        for (int j = 0; j < ny; ++j) {
            const double y = j * dy;
            const int p = i * ny + j;
            cdouble diag = k * k * co.tau(x, y);
            if (!end_col) {
                const cdouble aE = ctx.ci[i] * ctx.cih[i] * co.a_face(x + dx / 2, y) / (dx * dx);
                const cdouble aW = ctx.ci[i] * ctx.cih[i - 1] * co.a_face(x - dx / 2, y) / (dx * dx);
                sys.add(p, p + ny, aE);
                sys.add(p, p - ny, aW);
                diag -= (aE + aW);
            }
            add_y_part(sys, p, j, ny, co.c_face(x, y + dy / 2), co.c_face(x, y - dy / 2), diag,
                       dy);
            sys.add(p, p, diag);
        }
    }
    if (ctx.cfg.closure == BoundaryClosure::modal) add_modal_closure(sys, ctx);
    return sys;
}

// 9-point scheme for wall-profile defects (S has off-diagonal entries).
// The second-order one-sided wall derivative of the mixed flux reaches two
// nodes into the interior, which needs one extra diagonal: half bandwidth
// ny + 2 instead of ny + 1.
BandedComplexSystem assemble_bump(const BumpProfiles& profiles, const AssemblyContext& ctx) {
    const BumpEvaluator ev(profiles);
    const int nx = ctx.nx, ny = ctx.ny;
    const double dx = ctx.cfg.dx, dy = ctx.cfg.dy, k = ctx.k;
    BandedComplexSystem sys = new_system(ctx, ny + 2);
    auto b_of = [&ev](double x, double y) { return ev.at(x, y).S[0][1]; };
    for (int i = 1; i < nx - 1; ++i) {
        const double x = ctx.x(i);
        for (int j = 0; j < ny; ++j) {
            const double y = j * dy;
            const int p = i * ny + j;
            const MetricData mE = ev.at(x + dx / 2, y), mW = ev.at(x - dx / 2, y);
            const MetricData mP = ev.at(x, y);
            const cdouble aE = ctx.ci[i] * ctx.cih[i] * mE.S[0][0] / (dx * dx);
            const cdouble aW = ctx.ci[i] * ctx.cih[i - 1] * mW.S[0][0] / (dx * dx);
            sys.add(p, p + ny, aE);
            sys.add(p, p - ny, aW);
            sys.add(p, p, -(aE + aW) + k * k * mP.tau);
            if (j > 0 && j < ny - 1) {
                const MetricData mN = ev.at(x, y + dy / 2), mS = ev.at(x, y - dy / 2);
                const double cN = mN.S[1][1], cS = mS.S[1][1];
                sys.add(p, p + 1, cN / (dy * dy));
                sys.add(p, p - 1, cS / (dy * dy));
                sys.add(p, p, -(cN + cS) / (dy * dy));
                const double wx = 1.0 / (4.0 * dx * dy);
                // d/dx(b du/dy), centered
                const double bE = b_of(x + dx, y), bW = b_of(x - dx, y);
                sys.add(p, p + ny + 1, bE * wx);
                sys.add(p, p + ny - 1, -bE * wx);
                sys.add(p, p - ny + 1, -bW * wx);
                sys.add(p, p - ny - 1, bW * wx);
                // d/dy(b du/dx), centered
                const double bN = b_of(x, y + dy), bS = b_of(x, y - dy);
                sys.add(p, p + 1 + ny, bN * wx);
                sys.add(p, p + 1 - ny, -bN * wx);
                sys.add(p, p - 1 + ny, -bS * wx);
                sys.add(p, p - 1 - ny, bS * wx);
            } else {
                // Half-cell flux balance at the wall; the wall flux itself
                // vanishes (Neumann with the deformed-wall condition).
                const double sgn = (j == ny - 1) ? 1.0 : -1.0;
                const int jin = (j == ny - 1) ? j - 1 : j + 1;
                const double yhalf = y - sgn * dy / 2;
                const MetricData mH = ev.at(x, yhalf);
                const double fsc = -sgn / (dy / 2);
                // c du/dy at the half point
                sys.add(p, p, fsc * mH.S[1][1] * sgn / dy);
                sys.add(p, i * ny + jin, -fsc * mH.S[1][1] * sgn / dy);
                // b du/dx at the half point: average of centered differences
                const double wb = fsc * mH.S[0][1] / (4.0 * dx);
                sys.add(p, (i + 1) * ny + j, wb);
                sys.add(p, (i - 1) * ny + j, -wb);
                sys.add(p, (i + 1) * ny + jin, wb);
                sys.add(p, (i - 1) * ny + jin, -wb);
                // d/dx(b du/dy) with one-sided second-order du/dy at the wall
                const double bE = b_of(x + dx, y), bW = b_of(x - dx, y);
                const int j2 = j - static_cast<int>(std::lround(2.0 * sgn));
                for (const auto& [ii, w] : {std::pair<int, double>{i + 1, bE / (2.0 * dx)},
                                            std::pair<int, double>{i - 1, -bW / (2.0 * dx)}}) {
                    sys.add(p, ii * ny + j, w * sgn * 3.0 / (2.0 * dy));
                    sys.add(p, ii * ny + jin, -w * sgn * 4.0 / (2.0 * dy));
                    sys.add(p, ii * ny + j2, w * sgn * 1.0 / (2.0 * dy));
                }
            }
        }
    }
    // End columns: empty-guide rows (the profile vanishes there).
    for (int ii : {0, nx - 1}) {
        for (int j = 0; j < ny; ++j) {
            const int p = ii * ny + j;
            cdouble diag = k * k;
            add_y_part(sys, p, j, ny, 1.0, 1.0, diag, dy);
            sys.add(p, p, diag);
        }
    }
    if (ctx.cfg.closure == BoundaryClosure::modal) add_modal_closure(sys, ctx);
    return sys;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public assembly / solve
// ---------------------------------------------------------------------------

std::pair<double, double> defect_support(const DefectDescriptor& d) {
    if (const auto* p = std::get_if<BendParams>(&d)) return {p->x_c, p->x_end()};
    if (const auto* list = std::get_if<BendList>(&d)) {
        if (list->empty()) throw validation_error("bends: empty list");
        double lo = list->front().x_c, hi = list->front().x_end();
        for (const auto& p : *list) {
            lo = std::min(lo, p.x_c);
            hi = std::max(hi, p.x_end());
        }
        return {lo, hi};
    }
    if (const auto* b = std::get_if<BumpProfiles>(&d)) {
        int first = -1, last = -1;
        for (int i = 0; i < static_cast<int>(b->h.samples.size()); ++i) {
            if (b->h.samples[i] != 0.0 || b->g.samples[i] != 0.0) {
                if (first < 0) first = i;
                last = i;
            }
        }
        if (first < 0) return {b->h.x0, b->h.x0};
        return {b->h.x(std::max(0, first - 1)),
                b->h.x(std::min<int>(b->h.samples.size() - 1, last + 1))};
    }
    const auto& m = std::get<InhomogeneityMap>(d);
    return {m.x0, m.x_end()};
}

BandedComplexSystem assemble(const DefectDescriptor* defect, double k,
                             const DiscretizationConfig& cfg) {
    AssemblyContext ctx = make_context(k, cfg);
    if (defect != nullptr) {
        const auto [lo, hi] = defect_support(*defect);
        const double phys_lo =
            cfg.closure == BoundaryClosure::pml ? cfg.pml.x_left : cfg.x_min;
        const double phys_hi =
            cfg.closure == BoundaryClosure::pml ? cfg.pml.x_right : cfg.x_max;
        if (lo < hi && (lo < phys_lo + 2 * cfg.dx || hi > phys_hi - 2 * cfg.dx))
            throw validation_error("assemble: defect support must lie inside the physical window");
    }
    if (defect == nullptr) return assemble_axis(empty_coefficients(), ctx);
    if (const auto* p = std::get_if<BendParams>(defect))
        return assemble_axis(bend_coefficients(BendList{*p}, cfg.dx), ctx);
    if (const auto* list = std::get_if<BendList>(defect))
        return assemble_axis(bend_coefficients(*list, cfg.dx), ctx);
    if (const auto* b = std::get_if<BumpProfiles>(defect)) return assemble_bump(*b, ctx);
    return assemble_axis(inhomogeneity_coefficients(std::get<InhomogeneityMap>(*defect),
                                                    cfg.dx, cfg.dy),
                         ctx);
}

void add_line_source(BandedComplexSystem& sys, double x_source, cdouble amplitude) {
    const int i0 = static_cast<int>(std::lround((x_source - sys.grid.x0) / sys.grid.dx));
    if (i0 < 0 || i0 >= sys.grid.nx)
        throw validation_error("add_line_source: source outside the grid");
    for (int j = 0; j < sys.grid.ny; ++j)
        sys.rhs[static_cast<std::size_t>(i0) * sys.grid.ny + j] -= amplitude / sys.grid.dx;
}

void add_point_source(BandedComplexSystem& sys, double x_source, double y_source,
                      cdouble amplitude) {
    const int i0 = static_cast<int>(std::lround((x_source - sys.grid.x0) / sys.grid.dx));
    const int j0 = static_cast<int>(std::lround(y_source / sys.grid.dy()));
    if (i0 < 0 || i0 >= sys.grid.nx || j0 < 0 || j0 >= sys.grid.ny)
        throw validation_error("add_point_source: source outside the grid");
    sys.rhs[static_cast<std::size_t>(i0) * sys.grid.ny + j0] -=
        amplitude / (sys.grid.dx * sys.grid.dy());
}

BandedComplexSystem assemble_scattering(const DefectDescriptor& defect, double k,
                                        const DiscretizationConfig& cfg) {
    BandedComplexSystem sys_defect = assemble(&defect, k, cfg);
    const double kappa0 = discrete_mode_wavenumber(k, 0, cfg.dx, cfg.dy).real();
    const RectangleGrid g = sys_defect.grid;

    const BendList* bends = nullptr;
    BendList single;
    if (const auto* p = std::get_if<BendParams>(&defect)) {
        single.push_back(*p);
        bends = &single;
    } else if (const auto* list = std::get_if<BendList>(&defect)) {
        bends = list;
    }

    if (bends != nullptr) {
        // Bent-guide forward problem: the mapped-coordinate operator driven by
        // the effective interior source
        //   -k^2 e^{i kappa x} h_r(y) on [x_c, x_c + |theta|(r+1)],
        //   h_r(y) = (y-1)(1/(r+y) + 1/(r+1))   (y -> 1-y for theta < 0).
        // An operator-difference right-hand side is not usable here: it keeps
        // the seam flux jumps of the straightening map, whose reflection
        // cancels the O(1/r) contribution of this source, and the scattered
        // wave would no longer follow the bend data model.
        for (const auto& b : *bends) {
            const double lo = b.x_c, hi = b.x_end();
            for (int i = 0; i < g.nx; ++i) {
                const double cell_lo = g.x(i) - g.dx / 2.0, cell_hi = g.x(i) + g.dx / 2.0;
                const double overlap =
                    std::min(hi, cell_hi) - std::max(lo, cell_lo);
                if (overlap <= 0.0) continue;
                const cdouble amp = -(overlap / g.dx) * k * k *
                                    std::polar(1.0, kappa0 * g.x(i));
                for (int j = 0; j < g.ny; ++j) {
                    const double y = b.theta >= 0.0 ? g.y(j) : 1.0 - g.y(j);
                    sys_defect.rhs[static_cast<std::size_t>(i) * g.ny + j] +=
                        amp * bend_transverse_profile(b.r, y);
                }
            }
        }
        return sys_defect;
    }

    // Wall-profile and index defects: exact discrete scattered-field problem
    //   A_defect u_s = (A_empty - A_defect) u_inc,
    // the discrete form of the paper-model scattering equations (interior
    // index contrast, or inhomogeneous wall flux of the straightened bump).
    const BandedComplexSystem sys_empty = assemble(nullptr, k, cfg);
    std::vector<cdouble> u_inc(static_cast<std::size_t>(sys_defect.n));
    for (int i = 0; i < g.nx; ++i) {
        const cdouble v = std::polar(1.0, kappa0 * g.x(i));
        for (int j = 0; j < g.ny; ++j) u_inc[static_cast<std::size_t>(i) * g.ny + j] = v;
    }
    const std::vector<cdouble> ad_u = sys_defect.multiply(u_inc);
    const std::vector<cdouble> ae_u = sys_empty.multiply(u_inc);
    for (int p = 0; p < sys_defect.n; ++p) sys_defect.rhs[p] = ae_u[p] - ad_u[p];
    return sys_defect;
}

RectangleField solve(BandedComplexSystem& sys) {
    if (sys.n <= 0) throw validation_error("solve: empty system");
    const int ldab0 = sys.kl + sys.ku + 1;
    const int ldab = 2 * sys.kl + sys.ku + 1;
    std::vector<cdouble> factor(static_cast<std::size_t>(ldab) * sys.n, cdouble(0.0, 0.0));
    for (int c = 0; c < sys.n; ++c)
        for (int r0 = 0; r0 < ldab0; ++r0)
            factor[static_cast<std::size_t>(c) * ldab + sys.kl + r0] =
                sys.band[static_cast<std::size_t>(c) * ldab0 + r0];
    std::vector<cdouble> x = sys.rhs;
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(sys.n));
    const lapack_int info = LAPACKE_zgbsv(LAPACK_COL_MAJOR, sys.n, sys.kl, sys.ku, 1,
                                          lp(factor.data()), ldab, ipiv.data(), lp(x.data()),
                                          sys.n);
    if (info > 0) {
        std::ostringstream msg;
        msg << "solve: singular pivot at k = " << sys.k
            << "; the frequency may sit on a cutoff — widen the guard band";
        throw numerical_error(msg.str());
    }
    if (info < 0) throw numerical_error("solve: invalid banded-solver argument");
    factor.clear();
    factor.shrink_to_fit();
    const std::vector<cdouble> ax = sys.multiply(x);
    double rnorm = 0.0, bnorm = 0.0;
    for (int p = 0; p < sys.n; ++p) {
        rnorm += std::norm(ax[p] - sys.rhs[p]);
        bnorm += std::norm(sys.rhs[p]);
    }
    if (bnorm > 0.0 && std::sqrt(rnorm / bnorm) >= 1e-10) {
        std::ostringstream msg;
        msg << "solve: residual " << std::sqrt(rnorm / bnorm) << " exceeds 1e-10 at k = "
            << sys.k;
        throw numerical_error(msg.str());
    }
    RectangleField out = make_field(sys.grid);
    out.samples = std::move(x);
    return out;
}

// ---------------------------------------------------------------------------
// Measurement synthesis
// ---------------------------------------------------------------------------

namespace {

std::vector<int> modes_for_defect(const DefectDescriptor& d, int n_use) {
    std::vector<int> out;
    if (std::holds_alternative<BendParams>(d) || std::holds_alternative<BendList>(d)) {
        if (n_use >= 0) out.push_back(0);
    } else if (std::holds_alternative<BumpProfiles>(d)) {
        for (int n = 0; n <= std::min(1, n_use); ++n) out.push_back(n);
    } else {
        for (int n = 0; n <= n_use; ++n) out.push_back(n);
    }
    return out;
}

}  // namespace

FrequencyDataset synthesize_measurements(const DefectDescriptor& defect,
                                         const std::vector<double>& K, double measure_x,
                                         int N_modes, const DiscretizationConfig& cfg) {
    cfg.validate();
    if (N_modes < 1) throw validation_error("synthesize_measurements: need N_modes >= 1");
    const auto [lo, hi] = defect_support(defect);
    if (!(measure_x < lo))
        throw validation_error(
            "synthesize_measurements: measurement section must lie left of the defect");
    if (measure_x < cfg.x_min || measure_x > cfg.x_max)
        throw validation_error("synthesize_measurements: measurement section outside the grid");
    FrequencyDataset out;
    out.provenance = "fdfd";
    const double guard = cfg.cutoff_guard;
    for (double k : K) {
        if (!(k > guard)) {
            log::warn("synthesize: skipping k = " + std::to_string(k) +
                     " (at or below the low-frequency guard)");
            continue;
        }
        if (is_near_cutoff(k, guard)) {
            log::warn("synthesize: skipping cutoff-adjacent k = " + std::to_string(k));
            continue;
        }
        const DiscretizationConfig cfgk = cfg.refined_for(k);
        BandedComplexSystem sys = assemble_scattering(defect, k, cfgk);
        const RectangleField u = solve(sys);
        const int i_m =
            static_cast<int>(std::lround((measure_x - cfgk.x_min) / cfgk.dx));
        const double x_m = u.grid.x(i_m);
        const int n_prop = static_cast<int>(std::floor((k - guard) / kPi));
        const int n_use = std::min(N_modes - 1, n_prop);
        if (n_use < 0) continue;
        if (n_use >= 1 && u.grid.ny < 4 * n_use)
            throw validation_error(
                "synthesize_measurements: dy too coarse for the requested mode count");
        SectionField section{u.section(i_m)};
        const ModalCoefficients mc = decompose(section, n_use);
        const double kappa0 = discrete_mode_wavenumber(k, 0, cfgk.dx, cfgk.dy).real();
        // Grid dispersion accumulates only across the simulated stretch from
        // the section to the far edge of the defect; the conceptual guide on
        // [0, measure_x] is translated with continuum wavenumbers.
        const double travel = hi - x_m;
        for (int n : modes_for_defect(defect, n_use)) {
            const double kappan = discrete_mode_wavenumber(k, n, cfgk.dx, cfgk.dy).real();
            const double kn = longitudinal_wavenumber(k, n).value.real();
            const double phase_err =
                std::abs((kappa0 - k) + (kappan - kn)) * travel;
            if (phase_err > 0.35) {
                log::info("synthesize: dropping mode " + std::to_string(n) + " at k = " +
                          std::to_string(k) + " (grid dispersion phase error " +
                          std::to_string(phase_err) + " rad)");
                continue;
            }
            const cdouble v = mc.coeffs[n] * std::polar(1.0, (k + kn - kappa0) * x_m);
            FrequencyRecord rec;
            rec.mode = n;
            rec.k = k;
            rec.omega = k + kn;
            rec.value = v;
            out.records.push_back(rec);
        }
    }
    out.sort();
    out.validate();
    return out;
}

}  // namespace wgt
