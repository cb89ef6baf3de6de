#pragma once

#include <vector>

#include "wgt/line.hpp"
#include "wgt/modal.hpp"

namespace wgt {

// Discrete partial-band reflection operator
//   gamma(y)_omega = (i h / 2) sum_x y_x e^{i omega x}
// acting from samples on the uniform support grid X (x0 + j h, j < N_X) to
// values on the measured frequency list Omega. This is the half-Fourier
// scaling: gamma(y)(omega) = omega * Gamma(y)(omega).
struct GammaOperatorSpec {
    double x0 = 0.0;
    double h = 1.0;
    int N_X = 0;
    std::vector<double> omega;

    [[nodiscard]] double x(int j) const { return x0 + j * h; }
    [[nodiscard]] double x_end() const { return x(N_X - 1); }
    void validate() const;  // N_X >= 2, h > 0, omega strictly positive ascending
};

[[nodiscard]] std::vector<cdouble> gamma_apply(const std::vector<cdouble>& y,
                                               const GammaOperatorSpec& spec);
// Conjugate-transpose action (-i h / 2) sum_omega d_omega e^{-i omega x}.
[[nodiscard]] std::vector<cdouble> gamma_adjoint(const std::vector<cdouble>& d,
                                                 const GammaOperatorSpec& spec);

// Circular first difference (Gy)_j = y_j - y_{j-1} (index mod N) and its
// adjoint, the negative circular forward difference.
[[nodiscard]] std::vector<cdouble> discrete_gradient(const std::vector<cdouble>& y);
[[nodiscard]] std::vector<cdouble> discrete_gradient_adjoint(const std::vector<cdouble>& z);

struct RegularizationConfig {
    double lambda = 0.0;
    int max_iter = 5000;
    double grad_tol = 1e-6;
    bool positivity = false;

    void validate() const;
};

// J(y) = 1/2 ||gamma(y) - d||^2 + lambda/2 ||G y||^2 and its (complex)
// gradient gamma*(gamma(y) - d) + lambda G*(G y). The directional derivative
// along v equals Re<grad, v>.
struct ObjectiveValue {
    double value = 0.0;
    std::vector<cdouble> gradient;
};

[[nodiscard]] ObjectiveValue objective_and_gradient(const std::vector<cdouble>& y,
                                                    const std::vector<cdouble>& d,
                                                    const GammaOperatorSpec& spec,
                                                    const RegularizationConfig& cfg);

struct ReconstructionResult {
    LineFunction y;  // recovered profile on the support grid (real-valued)
    std::vector<double> objective_trace;  // non-increasing
    int iterations = 0;
    bool converged = false;
};

// Steepest descent for the penalized objective, restricted to real profiles
// (the unknowns are real geometric/index quantities): iterate
//   g = Re(gamma*(gamma y - d)) + lambda G^T G y,
//   t = ||g||^2 / (||gamma g||^2 + lambda ||G g||^2)   (exact line search),
//   y <- y - t g,
// halving t (up to 30 times) if the objective ever fails to decrease, until
// ||g|| < grad_tol * ||g_0|| or max_iter. Starting point y0 defaults to 0.
[[nodiscard]] ReconstructionResult steepest_descent(const std::vector<cdouble>& d,
                                                    const GammaOperatorSpec& spec,
                                                    const RegularizationConfig& cfg,
                                                    const std::vector<double>& y0 = {});

// One transverse mode's normalized inverse problem.
struct ModeProblem {
    int mode = 0;
    GammaOperatorSpec spec;      // shared X window, per-mode omega list
    std::vector<cdouble> data;   // prefactor-normalized targets
};

struct MultiModeResult {
    std::vector<int> modes;
    std::vector<LineFunction> profiles;  // one per mode, on the shared X grid
    // Total objective per accepted step. Non-increasing for the plain
    // variant; the projected variant may tick up by the projection's
    // non-idempotence offset (clamping in point space and re-expanding in a
    // finite mode basis is only approximately a projection).
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
};

// Joint descent over all modes with a positivity projection between steps:
// recompose h(x,y) = sum_n y_n(x) phi_n(y) on an (N_X x ny_project) grid,
// clamp negatives to zero, re-decompose. Used when the target map is known
// nonnegative.
[[nodiscard]] MultiModeResult positivity_projected_descent(const std::vector<ModeProblem>& modes,
                                                           const RegularizationConfig& cfg,
                                                           int ny_project = 101);

// Plain per-mode descent bundled with the same interface (no projection).
[[nodiscard]] MultiModeResult multi_mode_descent(const std::vector<ModeProblem>& modes,
                                                 const RegularizationConfig& cfg);

// Single-profile convenience form: project the profile itself onto
// nonnegative functions between steps (equivalent to the multi-mode variant
// with the single uniform mode).
[[nodiscard]] ReconstructionResult positivity_projected_descent(const std::vector<cdouble>& d,
                                                                const GammaOperatorSpec& spec,
                                                                const RegularizationConfig& cfg);

}  // namespace wgt
