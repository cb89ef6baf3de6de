#pragma once

#include <vector>

#include "wgt/dataset.hpp"
#include "wgt/defects.hpp"
#include "wgt/inversion.hpp"
#include "wgt/line.hpp"

namespace wgt {

// Reconstruction support window: uniform grid of `points` samples on
// [x_min, x_max], the X grid of the discrete reflection operator.
struct SupportWindow {
    double x_min = 0.0;
    double x_max = 1.0;
    int points = 501;

    [[nodiscard]] double h() const { return (x_max - x_min) / (points - 1); }
    void validate() const;
};

[[nodiscard]] GammaOperatorSpec gamma_spec_for(const SupportWindow& w,
                                               std::vector<double> omegas);

// ---------------------------------------------------------------------------
// Parametric bend fit
// ---------------------------------------------------------------------------

struct BendFitResult {
    BendList bends;
    double relative_residual = 0.0;  // ||model - data|| / ||data|| in the fit domain
    bool low_confidence = false;     // residual above threshold (not an error)
};

// Options for the coarse multi-start stage of the rectangle fit.
struct BendFitOptions {
    int n_bends = 1;
    double p2_min = 0.0, p2_max = 10.0;   // candidate bend starts
    double p3_min = 0.05, p3_max = 5.0;   // candidate support lengths
    int grid_p2 = 61, grid_p3 = 41;
    double low_confidence_threshold = 0.5;
};

// Fit rectangle source profiles -p1 * 1_[p2, p2+p3] to the mode-0 records
// (targets v/k in the half-Fourier domain at omega = 2k): coarse grid over
// (p2, p3) with the closed-form optimal amplitude, Nelder-Mead refinement,
// then conversion to geometry via bend_params_from_profile.
[[nodiscard]] BendFitResult recover_bend(const FrequencyDataset& data,
                                         const BendFitOptions& opts = {});

// ---------------------------------------------------------------------------
// Wall-profile recovery
// ---------------------------------------------------------------------------

struct BumpRecovery {
    LineFunction g_app;
    LineFunction h_app;
    bool partial = false;  // no mode-1 band: h_app then holds h - g and g_app = 0
    ReconstructionResult mode0;
    ReconstructionResult mode1;
};

// Mode-0 records give s0 = h' - g' (prefactor 2ik divided out), mode-1
// records give s1 = h' + g' (prefactor -sqrt2 ik(k1+k)/k1 divided out); both
// by steepest descent on the window grid, then integration by cumulative
// trapezoid anchored to zero at the left window edge.
[[nodiscard]] BumpRecovery recover_bump(const FrequencyDataset& data, const SupportWindow& window,
                                        const RegularizationConfig& cfg);

// ---------------------------------------------------------------------------
// Index-map recovery
// ---------------------------------------------------------------------------

struct InhomogeneityRecovery {
    InhomogeneityMap map;
    MultiModeResult descent;
    std::vector<int> skipped_modes;  // modes n <= N with an empty usable band
};

// Per-mode descent on prefactor-normalized data (k_n v / k^2 at
// omega = k + k_n) for n = 0..N, recombined as h(x,y) = sum h_n(x) phi_n(y);
// cfg.positivity enables the joint projected variant.
[[nodiscard]] InhomogeneityRecovery recover_inhomogeneity(const FrequencyDataset& data,
                                                          const SupportWindow& window, int N,
                                                          const RegularizationConfig& cfg,
                                                          int ny_out = 101);

// Cumulative trapezoid of a sampled derivative, anchored to 0 at the left
// edge (real part of the samples).
[[nodiscard]] LineFunction integrate_profile(const LineFunction& derivative);

}  // namespace wgt
