#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "wgt/errors.hpp"
#include "wgt/inversion.hpp"
#include "wgt/line.hpp"

using namespace wgt;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<cdouble> random_complex(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<cdouble> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = cdouble(dist(rng), dist(rng));
    return out;
}

cdouble dot(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    cdouble acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

GammaOperatorSpec random_band_spec(int n_x, int n_k, unsigned seed) {
    GammaOperatorSpec spec;
    spec.x0 = 3.0;
    spec.h = 0.01;
    spec.N_X = n_x;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(0.1, 60.0);
    spec.omega.resize(static_cast<std::size_t>(n_k));
    for (auto& w : spec.omega) w = dist(rng);
    std::sort(spec.omega.begin(), spec.omega.end());
    return spec;
}

// Dense normal-equations oracle: solve (Re(A^H A) + lambda L) y = Re(A^H d)
// by Gaussian elimination, with A the partial-band operator matrix and
// L = G^T G the circular Laplacian. Independent of the library's descent.
std::vector<double> normal_equations_oracle(const std::vector<cdouble>& d,
                                            const GammaOperatorSpec& spec, double lambda) {
    const int n = spec.N_X;
    const int m = static_cast<int>(spec.omega.size());
    std::vector<std::vector<cdouble>> A(m, std::vector<cdouble>(n));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c)
            A[r][c] = cdouble(0.0, 0.5 * spec.h) * std::polar(1.0, spec.omega[r] * spec.x(c));

    std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cdouble acc(0.0, 0.0);
            for (int r = 0; r < m; ++r) acc += std::conj(A[r][i]) * A[r][j];
            M[i][j] = acc.real();
        }
        cdouble rhs(0.0, 0.0);
        for (int r = 0; r < m; ++r) rhs += std::conj(A[r][i]) * d[r];
        b[i] = rhs.real();
    }
    // Circular G^T G: 2 on the diagonal, -1 on the (cyclic) off-diagonals.
    for (int i = 0; i < n; ++i) {
        M[i][i] += 2.0 * lambda;
        M[i][(i + 1) % n] -= lambda;
        M[i][(i + n - 1) % n] -= lambda;
    }
    // Partial-pivot Gaussian elimination.
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        std::swap(M[col], M[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < n; ++r) {
            const double f = M[r][col] / M[col][col];
            for (int c = col; c < n; ++c) M[r][c] -= f * M[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> y(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= M[r][c] * y[c];
        y[r] = acc / M[r][r];
    }
    return y;
}
}  // namespace

TEST_CASE("operator spec validation") {
    GammaOperatorSpec spec = random_band_spec(10, 5, 1);
    REQUIRE_NOTHROW(spec.validate());

    GammaOperatorSpec bad = spec;
    bad.N_X = 1;
    REQUIRE_THROWS_AS(bad.validate(), validation_error);
    bad = spec;
    bad.h = 0.0;
    REQUIRE_THROWS_AS(bad.validate(), validation_error);
    bad = spec;
    bad.omega[2] = bad.omega[1];  // not strictly ascending
    REQUIRE_THROWS_AS(bad.validate(), validation_error);
    bad = spec;
    bad.omega[0] = -1.0;
    REQUIRE_THROWS_AS(bad.validate(), validation_error);
}

TEST_CASE("partial-band operator and its adjoint satisfy the inner-product identity") {
    const GammaOperatorSpec spec = random_band_spec(60, 40, 11);
    for (unsigned trial = 0; trial < 3; ++trial) {
        const std::vector<cdouble> y = random_complex(60, 100 + trial);
        const std::vector<cdouble> d = random_complex(40, 200 + trial);
        const cdouble lhs = dot(d, gamma_apply(y, spec));
        const cdouble rhs = dot(gamma_adjoint(d, spec), y);
        REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("difference operator and its adjoint satisfy the inner-product identity") {
    const std::vector<cdouble> y = random_complex(33, 5);
    const std::vector<cdouble> z = random_complex(33, 6);
    const cdouble lhs = dot(z, discrete_gradient(y));
    const cdouble rhs = dot(discrete_gradient_adjoint(z), y);
    REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));

    // (G y)_j = y_j - y_{j-1} cyclically.
    const std::vector<cdouble> g = discrete_gradient(y);
    REQUIRE(std::abs(g[0] - (y[0] - y[32])) < 1e-15);
    REQUIRE(std::abs(g[5] - (y[5] - y[4])) < 1e-15);
}

TEST_CASE("objective gradient matches central differences") {
    const GammaOperatorSpec spec = random_band_spec(24, 30, 21);
    const std::vector<cdouble> d = random_complex(30, 22);
    const std::vector<cdouble> y = random_complex(24, 23);
    RegularizationConfig cfg;
    cfg.lambda = 0.37;

    const ObjectiveValue ov = objective_and_gradient(y, d, spec, cfg);
    REQUIRE(ov.gradient.size() == y.size());

    std::mt19937 rng(24);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double eps = 1e-6;
    for (int trial = 0; trial < 4; ++trial) {
        std::vector<cdouble> v(y.size());
        for (auto& c : v) c = cdouble(dist(rng), dist(rng));
        std::vector<cdouble> yp = y, ym = y;
        for (std::size_t i = 0; i < y.size(); ++i) {
            yp[i] += eps * v[i];
            ym[i] -= eps * v[i];
        }
        const double fd = (objective_and_gradient(yp, d, spec, cfg).value -
                           objective_and_gradient(ym, d, spec, cfg).value) /
                          (2.0 * eps);
        const double an = dot(ov.gradient, v).real();
        REQUIRE(fd == Catch::Approx(an).epsilon(1e-6));
    }
}

TEST_CASE("descent on zero data returns the zero profile immediately") {
    const GammaOperatorSpec spec = random_band_spec(20, 15, 31);
    RegularizationConfig cfg;
    cfg.lambda = 1e-3;
    const std::vector<cdouble> d(15, cdouble(0.0, 0.0));
    const ReconstructionResult res = steepest_descent(d, spec, cfg);
    REQUIRE(res.converged);
    for (double v : res.y.samples) REQUIRE(v == 0.0);
}

TEST_CASE("full-band unregularized descent recovers the profile exactly") {
    // With omegas filling [delta, 2 pi / h) and at least N_X of them the
    // normal matrix is well conditioned and the minimizer is the truth.
    GammaOperatorSpec spec;
    spec.x0 = 1.0;
    spec.h = 0.05;
    spec.N_X = 21;
    const int n_k = 40;
    const double w_max = 2.0 * kPi / spec.h;
    for (int i = 0; i < n_k; ++i)
        spec.omega.push_back(0.3 + (w_max - 0.6) * i / (n_k - 1));

    std::vector<double> truth(21);
    for (int j = 0; j < 21; ++j) {
        const double x = spec.x(j);
        truth[j] = std::sin(3.0 * x) * std::exp(-2.0 * (x - 1.5) * (x - 1.5));
    }
    std::vector<cdouble> yt(21);
    for (int j = 0; j < 21; ++j) yt[j] = truth[j];
    const std::vector<cdouble> d = gamma_apply(yt, spec);

    RegularizationConfig cfg;
    cfg.lambda = 0.0;
    cfg.max_iter = 20000;
    cfg.grad_tol = 1e-12;
    const ReconstructionResult res = steepest_descent(d, spec, cfg);
    REQUIRE(res.converged);
    double worst = 0.0;
    for (int j = 0; j < 21; ++j) worst = std::max(worst, std::abs(res.y.samples[j] - truth[j]));
    REQUIRE(worst < 1e-6);

    // Objective trace never increases for the plain method.
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
        REQUIRE(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-15);

    // Descent minimizer agrees with an independent dense normal-equations
    // solve of the same quadratic.
    const std::vector<double> oracle = normal_equations_oracle(d, spec, 0.0);
    for (int j = 0; j < 21; ++j)
        REQUIRE(res.y.samples[j] == Catch::Approx(oracle[j]).margin(1e-6));
}

TEST_CASE("regularized minimizer matches the dense normal-equations oracle") {
    const GammaOperatorSpec spec = random_band_spec(16, 24, 41);
    const std::vector<cdouble> d = random_complex(24, 42);
    const double lambda = 0.05;

    RegularizationConfig cfg;
    cfg.lambda = lambda;
    cfg.max_iter = 60000;
    cfg.grad_tol = 1e-13;
    const ReconstructionResult res = steepest_descent(d, spec, cfg);
    const std::vector<double> oracle = normal_equations_oracle(d, spec, lambda);
    for (int j = 0; j < 16; ++j)
        REQUIRE(res.y.samples[j] == Catch::Approx(oracle[j]).margin(5e-6));
}

TEST_CASE("single-profile positivity projection keeps iterates nonnegative") {
    GammaOperatorSpec spec;
    spec.x0 = 0.0;
    spec.h = 0.05;
    spec.N_X = 21;
    const double w_max = 2.0 * kPi / spec.h;
    for (int i = 0; i < 40; ++i) spec.omega.push_back(0.3 + (w_max - 0.6) * i / 39.0);

    std::vector<cdouble> yt(21);
    for (int j = 0; j < 21; ++j) {
        const double x = spec.x(j);
        yt[j] = std::max(0.0, std::sin(2.0 * kPi * x));
    }
    const std::vector<cdouble> d = gamma_apply(yt, spec);

    RegularizationConfig cfg;
    cfg.lambda = 0.0;
    cfg.max_iter = 20000;
    cfg.grad_tol = 1e-10;
    const ReconstructionResult res = positivity_projected_descent(d, spec, cfg);
    for (double v : res.y.samples) REQUIRE(v >= -1e-12);
    double worst = 0.0;
    for (int j = 0; j < 21; ++j) worst = std::max(worst, std::abs(res.y.samples[j] - yt[j].real()));
    REQUIRE(worst < 1e-5);
}

TEST_CASE("multi-mode descent with one uniform mode reduces to the scalar method") {
    const GammaOperatorSpec spec = random_band_spec(18, 26, 51);
    const std::vector<cdouble> d = random_complex(26, 52);
    RegularizationConfig cfg;
    cfg.lambda = 0.01;
    cfg.max_iter = 4000;
    cfg.grad_tol = 1e-9;

    const ReconstructionResult scalar = steepest_descent(d, spec, cfg);
    const MultiModeResult multi = multi_mode_descent({ModeProblem{0, spec, d}}, cfg);
    REQUIRE(multi.modes == std::vector<int>{0});
    REQUIRE(multi.profiles.size() == 1);
    for (int j = 0; j < 18; ++j)
        REQUIRE(multi.profiles[0].samples[j] ==
                Catch::Approx(scalar.y.samples[j]).margin(1e-10));
}

TEST_CASE("projected multi-mode descent yields a nonnegative recombined map") {
    // Truth: h(x, y) = f(x) (1 + phi_1(y)/2) >= 0 with a raised-cosine f.
    GammaOperatorSpec spec;
    spec.x0 = 0.0;
    spec.h = 0.05;
    spec.N_X = 21;
    const double w_max = 2.0 * kPi / spec.h;
    for (int i = 0; i < 40; ++i) spec.omega.push_back(0.3 + (w_max - 0.6) * i / 39.0);

    std::vector<cdouble> f0(21), f1(21);
    for (int j = 0; j < 21; ++j) {
        const double x = spec.x(j);
        const double f = 0.5 * (1.0 - std::cos(2.0 * kPi * x));
        f0[j] = f;
        f1[j] = 0.5 * f;
    }
    std::vector<ModeProblem> problems;
    problems.push_back({0, spec, gamma_apply(f0, spec)});
    problems.push_back({1, spec, gamma_apply(f1, spec)});

    RegularizationConfig cfg;
    cfg.lambda = 1e-6;
    cfg.max_iter = 3000;
    cfg.grad_tol = 1e-9;
    const MultiModeResult res = positivity_projected_descent(problems, cfg, 101);
    REQUIRE(res.profiles.size() == 2);

    for (int j = 0; j < 21; ++j) {
        for (int q = 0; q <= 100; ++q) {
            const double y = q / 100.0;
            const double val = res.profiles[0].samples[j] +
                               res.profiles[1].samples[j] * eigenfunction(1, y);
            REQUIRE(val >= -1e-9);
        }
    }
    // And it actually reconstructs the mode profiles.
    for (int j = 0; j < 21; ++j) {
        REQUIRE(res.profiles[0].samples[j] == Catch::Approx(f0[j].real()).margin(2e-3));
        REQUIRE(res.profiles[1].samples[j] == Catch::Approx(f1[j].real()).margin(2e-3));
    }
}
