#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "wgt/defects.hpp"
#include "wgt/errors.hpp"
#include "wgt/fdfd.hpp"
#include "wgt/modal.hpp"

using namespace wgt;

namespace {
constexpr double kPi = 3.14159265358979323846;

BumpProfiles quartic_top_bump(double amp) {
    BumpProfiles b;
    b.h = make_line(2.5, 0.005, 601);  // support [3, 5]
    b.g = make_line(2.5, 0.005, 601);
    for (int i = 0; i < b.h.size(); ++i) {
        const double x = b.h.x(i);
        if (x > 3.0 && x < 5.0) b.h.samples[i] = amp * (x - 3.0) * (x - 3.0) * (5.0 - x) * (5.0 - x);
    }
    return b;
}

DiscretizationConfig small_window(double dx, double dy) {
    DiscretizationConfig cfg;
    cfg.dx = dx;
    cfg.dy = dy;
    cfg.x_min = 2.0;
    cfg.x_max = 6.0;
    cfg.closure = BoundaryClosure::modal;
    cfg.auto_refine_dx = false;
    return cfg;
}

// Modal coefficient of a field section, translated to omit nothing; helper
// for the flux test.
cdouble section_coeff(const RectangleField& u, int i, int n) {
    const LineFunction sec = u.section(i);
    const int ny = sec.size();
    const double dy = sec.dx;
    cdouble acc(0.0, 0.0);
    for (int j = 0; j < ny; ++j) {
        const double w = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
        acc += w * sec.samples[j] * eigenfunction(n, j * dy) * dy;
    }
    return acc;
}
}  // namespace

TEST_CASE("discrete mode wavenumber converges at second order") {
    const double k = 7.0;
    const int n = 1;
    const double exact = std::sqrt(k * k - kPi * kPi);
    const double e2 = std::abs(discrete_mode_wavenumber(k, n, 0.02, 0.02).real() - exact);
    const double e1 = std::abs(discrete_mode_wavenumber(k, n, 0.01, 0.01).real() - exact);
    REQUIRE(e2 / e1 > 3.5);
    REQUIRE(e2 / e1 < 4.5);
    // Limit consistency: coarse value already close.
    REQUIRE(discrete_mode_wavenumber(k, n, 0.01, 0.01).real() ==
            Catch::Approx(exact).epsilon(1e-3));
    // Evanescent branch: positive imaginary part.
    const cdouble ev = discrete_mode_wavenumber(2.0, 3, 0.01, 0.01);
    REQUIRE(ev.imag() > 0.0);
    REQUIRE(std::abs(ev.real()) < 1e-12);
}

TEST_CASE("banded storage add/multiply agree with a dense oracle") {
    BandedComplexSystem sys;
    sys.n = 6;
    sys.kl = 2;
    sys.ku = 2;
    sys.band.assign(static_cast<std::size_t>(sys.kl + sys.ku + 1) * sys.n, cdouble(0, 0));
    std::vector<std::vector<cdouble>> dense(6, std::vector<cdouble>(6, cdouble(0, 0)));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            if (std::abs(r - c) > 2) continue;
            const cdouble v(dist(rng), dist(rng));
            sys.add(r, c, v);
            sys.add(r, c, v);  // accumulation, not overwrite
            dense[r][c] += 2.0 * v;
        }

    std::vector<cdouble> x(6);
    for (auto& v : x) v = cdouble(dist(rng), dist(rng));
    const std::vector<cdouble> got = sys.multiply(x);
    for (int r = 0; r < 6; ++r) {
        cdouble want(0, 0);
        for (int c = 0; c < 6; ++c) want += dense[r][c] * x[c];
        REQUIRE(std::abs(got[r] - want) < 1e-13);
    }
}

TEST_CASE("zero-size defects assemble an exactly quiet scattering problem") {
    const DiscretizationConfig cfg = small_window(0.05, 0.05);

    BumpProfiles flat;
    flat.h = make_line(3.0, 0.01, 201);
    flat.g = make_line(3.0, 0.01, 201);
    BandedComplexSystem sys = assemble_scattering(DefectDescriptor(flat), 4.0, cfg);
    for (const cdouble& v : sys.rhs) REQUIRE(v == cdouble(0.0, 0.0));

    InhomogeneityMap zero;
    zero.x0 = 3.0;
    zero.dx = 0.01;
    zero.nx = 101;
    zero.ny = 21;
    zero.values.assign(101 * 21, 0.0);
    BandedComplexSystem sys2 = assemble_scattering(DefectDescriptor(zero), 4.0, cfg);
    for (const cdouble& v : sys2.rhs) REQUIRE(v == cdouble(0.0, 0.0));
}

TEST_CASE("banded solve reproduces the right-hand side") {
    DiscretizationConfig cfg = small_window(0.05, 0.05);
    BandedComplexSystem sys = assemble(nullptr, 4.3, cfg);
    add_point_source(sys, 3.7, 0.4, cdouble(1.0, 0.5));
    const std::vector<cdouble> saved_rhs = sys.rhs;

    const RectangleField u = solve(sys);
    REQUIRE(u.grid.nx == cfg.nx());
    REQUIRE(u.grid.ny == cfg.ny());

    const std::vector<cdouble> ax = sys.multiply(u.samples);
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < ax.size(); ++p) {
        num += std::norm(ax[p] - saved_rhs[p]);
        den += std::norm(saved_rhs[p]);
    }
    REQUIRE(std::sqrt(num / den) < 1e-10);
    REQUIRE(l2_norm(u) > 0.0);
}

TEST_CASE("defect support covers each descriptor kind") {
    const auto [b_lo, b_hi] = defect_support(DefectDescriptor(BendParams{2.0, 5.0, kPi / 6.0}));
    REQUIRE(b_lo == Catch::Approx(2.0));
    REQUIRE(b_hi == Catch::Approx(2.0 + kPi));

    const auto [l_lo, l_hi] =
        defect_support(DefectDescriptor(BendList{{1.0, 8.0, 0.2}, {4.0, 3.0, -0.1}}));
    REQUIRE(l_lo == Catch::Approx(1.0));
    REQUIRE(l_hi == Catch::Approx(4.0 + 3.0 * 0.1));

    const auto [u_lo, u_hi] = defect_support(DefectDescriptor(quartic_top_bump(0.1)));
    REQUIRE(u_lo <= 3.0);
    REQUIRE(u_hi >= 5.0);

    InhomogeneityMap m;
    m.x0 = 3.9;
    m.dx = 0.002;
    m.nx = 101;
    m.ny = 11;
    m.values.assign(101 * 11, 0.01);
    const auto [i_lo, i_hi] = defect_support(DefectDescriptor(m));
    REQUIRE(i_lo == Catch::Approx(3.9));
    REQUIRE(i_hi == Catch::Approx(3.9 + 0.2));
}

TEST_CASE("discretization validation and refinement") {
    DiscretizationConfig cfg = small_window(0.05, 0.05);
    REQUIRE_NOTHROW(cfg.validate());

    DiscretizationConfig bad = cfg;
    bad.dx = -0.01;
    REQUIRE_THROWS_AS(bad.validate(), validation_error);
    bad = cfg;
    bad.x_max = bad.x_min;
    REQUIRE_THROWS_AS(bad.validate(), validation_error);

    DiscretizationConfig fine = cfg;
    fine.auto_refine_dx = true;
    fine.dispersion_budget = 0.1;
    const DiscretizationConfig ref = fine.refined_for(40.0);
    REQUIRE(ref.dx < fine.dx);
    REQUIRE(ref.x_min == fine.x_min);
    REQUIRE(ref.x_max == fine.x_max);
    // The window still divides into a whole number of cells.
    const double cells = (ref.x_max - ref.x_min) / ref.dx;
    REQUIRE(cells == Catch::Approx(std::round(cells)).margin(1e-9));
}

TEST_CASE("scattered energy balances the incident flux for a hard bump", "[slow]") {
    // Single propagative mode (k < 2 pi): |R|^2 + |T|^2 = 1 up to
    // discretization error.
    const double k = 3.0;
    DiscretizationConfig cfg = small_window(0.02, 0.01);
    const DefectDescriptor bump(quartic_top_bump(0.1));
    BandedComplexSystem sys = assemble_scattering(bump, k, cfg);
    const RectangleField u = solve(sys);

    const int i_left = static_cast<int>(std::round((2.3 - cfg.x_min) / cfg.dx));
    const int i_right = static_cast<int>(std::round((5.7 - cfg.x_min) / cfg.dx));
    const double x_right = cfg.x_min + i_right * cfg.dx;
    const cdouble kappa0 = discrete_mode_wavenumber(k, 0, cfg.dx, cfg.dy);

    const double R = std::abs(section_coeff(u, i_left, 0));
    const cdouble incident = std::exp(cdouble(0.0, 1.0) * kappa0 * x_right);
    const double T = std::abs(incident + section_coeff(u, i_right, 0)) / std::abs(incident);
    INFO("R=" << R << " T=" << T);
    REQUIRE(R > 1e-3);  // the bump actually reflects
    REQUIRE(R * R + T * T == Catch::Approx(1.0).margin(2e-3));
}

TEST_CASE("synthesized bump data approaches the first-order model as the bump shrinks",
          "[slow]") {
    DiscretizationConfig cfg = small_window(0.01, 0.01);
    const double k = 5.0;
    auto model_gap = [&](double amp) {
        const BumpProfiles b = quartic_top_bump(amp);  // peak height == amp at x = 4
        const FrequencyDataset ds =
            synthesize_measurements(DefectDescriptor(b), {k}, 2.5, 2, cfg);
        const BumpData want = bump_data_model(b, k);
        REQUIRE(!ds.records.empty());
        double worst = 0.0;
        for (const FrequencyRecord& r : ds.records) {
            const cdouble ref = (r.mode == 0) ? want.d0 : *want.d1;
            worst = std::max(worst, std::abs(r.value - ref) / std::abs(ref));
        }
        return worst;
    };
    const double gap_big = model_gap(0.04);
    const double gap_small = model_gap(0.02);
    INFO("gap(0.04)=" << gap_big << " gap(0.02)=" << gap_small);
    REQUIRE(gap_big < 0.05);
    REQUIRE(gap_small < 0.7 * gap_big);
}
