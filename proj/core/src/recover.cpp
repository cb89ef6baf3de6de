#include "wgt/recover.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>

#include "wgt/errors.hpp"
#include "wgt/log.hpp"

namespace wgt {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

void SupportWindow::validate() const {
    if (!(x_max > x_min)) throw validation_error("support window: empty interval");
    if (points < 2) throw validation_error("support window: need at least two points");
}

GammaOperatorSpec gamma_spec_for(const SupportWindow& w, std::vector<double> omegas) {
    w.validate();
    GammaOperatorSpec spec;
    spec.x0 = w.x_min;
    spec.h = w.h();
    spec.N_X = w.points;
    spec.omega = std::move(omegas);
    spec.validate();
    return spec;
}

LineFunction integrate_profile(const LineFunction& derivative) {
    LineFunction out = make_line(derivative.x0, derivative.dx, derivative.size());
    double acc = 0.0;
    out.samples[0] = 0.0;
    for (int i = 1; i < derivative.size(); ++i) {
        acc += 0.5 * (derivative.samples[i - 1].real() + derivative.samples[i].real()) *
               derivative.dx;
        out.samples[i] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bend fit
// ---------------------------------------------------------------------------

namespace {

// Solve the small real-constrained linear least-squares problem for the
// rectangle amplitudes: minimize sum_j |sum_m a_m phi_jm - t_j|^2 over real a.
std::vector<double> solve_amplitudes(const std::vector<std::vector<cdouble>>& phi,
                                     const std::vector<cdouble>& t) {
    const int m = static_cast<int>(phi.size());
    std::vector<double> N(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> b(static_cast<std::size_t>(m), 0.0);
    for (int a = 0; a < m; ++a) {
        for (int c = 0; c < m; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < t.size(); ++j)
                acc += (std::conj(phi[a][j]) * phi[c][j]).real();
            N[static_cast<std::size_t>(a) * m + c] = acc;
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j) acc += (std::conj(phi[a][j]) * t[j]).real();
        b[a] = acc;
    }
    // Gaussian elimination with partial pivoting (m is tiny).
    std::vector<double> x = b;
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(N[static_cast<std::size_t>(r) * m + col]) >
                std::abs(N[static_cast<std::size_t>(piv) * m + col]))
                piv = r;
        if (std::abs(N[static_cast<std::size_t>(piv) * m + col]) < 1e-300) {
            x[col] = 0.0;
            continue;
        }
        if (piv != col) {
            for (int c = 0; c < m; ++c)
                std::swap(N[static_cast<std::size_t>(piv) * m + c],
                          N[static_cast<std::size_t>(col) * m + c]);
            std::swap(x[piv], x[col]);
        }
        for (int r = col + 1; r < m; ++r) {
            const double f = N[static_cast<std::size_t>(r) * m + col] /
                             N[static_cast<std::size_t>(col) * m + col];
            for (int c = col; c < m; ++c)
                N[static_cast<std::size_t>(r) * m + c] -=
                    f * N[static_cast<std::size_t>(col) * m + c];
            x[r] -= f * x[col];
        }
    }
    for (int col = m - 1; col >= 0; --col) {
        const double d = N[static_cast<std::size_t>(col) * m + col];
        if (std::abs(d) < 1e-300) {
            x[col] = 0.0;
            continue;
        }
        for (int c = col + 1; c < m; ++c)
            x[col] -= N[static_cast<std::size_t>(col) * m + c] * x[c];
        x[col] /= d;
    }
    return x;
}

struct BendObjective {
    const std::vector<double>& omegas;
    const std::vector<cdouble>& targets;
    const BendFitOptions& opts;

    // params: (p2, p3) per bend, flattened. Returns residual^2 and optimal
    // amplitudes for the candidate geometry.
    double operator()(const std::vector<double>& params, std::vector<double>* amps_out) const {
        const int m = static_cast<int>(params.size()) / 2;
        for (int i = 0; i < m; ++i) {
            const double p2 = params[2 * i], p3 = params[2 * i + 1];
            if (p3 < 1e-4 || p3 > 2.0 * opts.p3_max || p2 < opts.p2_min - 2.0 ||
                p2 > opts.p2_max + 2.0)
                return std::numeric_limits<double>::max();
        }
        std::vector<std::vector<cdouble>> phi(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            phi[i].resize(omegas.size());
            for (std::size_t j = 0; j < omegas.size(); ++j)
                phi[i][j] = bend_fit_model(1.0, params[2 * i], params[2 * i + 1], omegas[j]);
        }
        const std::vector<double> a = solve_amplitudes(phi, targets);
        double res = 0.0;
        for (std::size_t j = 0; j < omegas.size(); ++j) {
            cdouble model(0.0, 0.0);
            for (int i = 0; i < m; ++i) model += a[i] * phi[i][j];
            res += std::norm(model - targets[j]);
        }
        if (amps_out) *amps_out = a;
        return res;
    }
};

// Standard Nelder-Mead on R^d with a penalized objective.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> start, double scale, int max_evals) {
    const int d = static_cast<int>(start.size());
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(d + 1), start);
    std::vector<double> fv(static_cast<std::size_t>(d + 1));
    for (int i = 0; i < d; ++i) pts[i + 1][i] += scale;
    for (int i = 0; i <= d; ++i) fv[i] = f(pts[i]);
    int evals = d + 1;
    while (evals < max_evals) {
        // order
        std::vector<int> idx(static_cast<std::size_t>(d + 1));
        for (int i = 0; i <= d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        {
            std::vector<std::vector<double>> p2(pts.size());
            std::vector<double> f2(fv.size());
            for (int i = 0; i <= d; ++i) {
                p2[i] = pts[idx[i]];
                f2[i] = fv[idx[i]];
            }
            pts = std::move(p2);
            fv = std::move(f2);
        }
        if (fv[d] - fv[0] < 1e-14 * (1.0 + std::abs(fv[0]))) break;
        std::vector<double> centroid(static_cast<std::size_t>(d), 0.0);
        for (int i = 0; i < d; ++i)
            for (int c = 0; c < d; ++c) centroid[c] += pts[i][c] / d;
        auto blend = [&](double t) {
            std::vector<double> p(static_cast<std::size_t>(d));
            for (int c = 0; c < d; ++c) p[c] = centroid[c] + t * (pts[d][c] - centroid[c]);
            return p;
        };
        const std::vector<double> xr = blend(-1.0);
        const double fr = f(xr);
        ++evals;
        if (fr < fv[0]) {
            const std::vector<double> xe = blend(-2.0);
            const double fe = f(xe);
            ++evals;
            if (fe < fr) {
                pts[d] = xe;
                fv[d] = fe;
            } else {
                pts[d] = xr;
                fv[d] = fr;
            }
        } else if (fr < fv[d - 1]) {
            pts[d] = xr;
            fv[d] = fr;
        } else {
            const std::vector<double> xc = blend(fr < fv[d] ? -0.5 : 0.5);
            const double fc = f(xc);
            ++evals;
            if (fc < std::min(fr, fv[d])) {
                pts[d] = xc;
                fv[d] = fc;
            } else {
                for (int i = 1; i <= d; ++i) {
                    for (int c = 0; c < d; ++c) pts[i][c] = pts[0][c] + 0.5 * (pts[i][c] - pts[0][c]);
                    fv[i] = f(pts[i]);
                }
                evals += d;
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= d; ++i)
        if (fv[i] < fv[best]) best = i;
    return pts[best];
}

}  // namespace

BendFitResult recover_bend(const FrequencyDataset& data, const BendFitOptions& opts) {
    if (opts.n_bends < 1) throw validation_error("bend fit: need at least one bend");
    const FrequencyDataset mode0 = data.select_mode(0);
    if (mode0.records.empty())
        throw validation_error("bend fit: dataset has no first-mode records");
    std::vector<double> omegas;
    std::vector<cdouble> targets;
    for (const auto& r : mode0.records) {
        omegas.push_back(r.omega);
        targets.push_back(r.value / r.k);  // half-Fourier domain: v/k at omega = 2k
    }
    const double data_norm2 = [&] {
        double s = 0.0;
        for (const auto& t : targets) s += std::norm(t);
        return s;
    }();
    if (!(data_norm2 > 0.0)) throw validation_error("bend fit: all-zero data");

    BendObjective obj{omegas, targets, opts};

    // Greedy seeding: fit one rectangle at a time against the residual.
    std::vector<double> params;
    std::vector<cdouble> residual = targets;
    for (int bend = 0; bend < opts.n_bends; ++bend) {
        double best = std::numeric_limits<double>::max();
        double bp2 = opts.p2_min, bp3 = opts.p3_min;
        for (int i2 = 0; i2 < opts.grid_p2; ++i2) {
            const double p2 =
                opts.p2_min + (opts.p2_max - opts.p2_min) * i2 / (opts.grid_p2 - 1);
            for (int i3 = 0; i3 < opts.grid_p3; ++i3) {
                const double p3 =
                    opts.p3_min + (opts.p3_max - opts.p3_min) * i3 / (opts.grid_p3 - 1);
                std::vector<cdouble> phi(omegas.size());
                for (std::size_t j = 0; j < omegas.size(); ++j)
                    phi[j] = bend_fit_model(1.0, p2, p3, omegas[j]);
                double pp = 0.0, pt = 0.0;
                for (std::size_t j = 0; j < omegas.size(); ++j) {
                    pp += std::norm(phi[j]);
                    pt += (std::conj(phi[j]) * residual[j]).real();
                }
                const double a = pp > 0.0 ? std::max(0.0, pt / pp) : 0.0;
                double res = 0.0;
                for (std::size_t j = 0; j < omegas.size(); ++j)
                    res += std::norm(a * phi[j] - residual[j]);
                if (res < best) {
                    best = res;
                    bp2 = p2;
                    bp3 = p3;
                }
            }
        }
        params.push_back(bp2);
        params.push_back(bp3);
        // update residual with the jointly refit amplitudes so far
        std::vector<double> amps;
        obj(params, &amps);
        residual = targets;
        for (std::size_t j = 0; j < omegas.size(); ++j) {
            for (std::size_t m = 0; m * 2 < params.size(); ++m)
                residual[j] -= amps[m] * bend_fit_model(1.0, params[2 * m], params[2 * m + 1],
                                                        omegas[j]);
        }
    }

    // Joint refinement.
    auto scalar_obj = [&](const std::vector<double>& p) { return obj(p, nullptr); };
    const double step = 0.5 * std::min(1.0, (opts.p3_max - opts.p3_min) / 4.0);
    params = nelder_mead(scalar_obj, params, step, 400 * static_cast<int>(params.size()));
    params = nelder_mead(scalar_obj, params, step / 25.0, 400 * static_cast<int>(params.size()));

    std::vector<double> amps;
    const double res2 = obj(params, &amps);

    BendFitResult out;
    out.relative_residual = std::sqrt(res2 / data_norm2);
    out.low_confidence = out.relative_residual > opts.low_confidence_threshold;
    for (std::size_t m = 0; m * 2 < params.size(); ++m) {
        double p1 = amps[m];
        if (!(p1 > 0.0)) {
            log::warn("bend fit: non-positive rectangle amplitude, clamping");
            out.low_confidence = true;
            p1 = 1e-9;
        }
        out.bends.push_back(bend_params_from_profile(p1, params[2 * m], params[2 * m + 1]));
    }
    std::sort(out.bends.begin(), out.bends.end(),
              [](const BendParams& a, const BendParams& b) { return a.x_c < b.x_c; });
    if (out.low_confidence)
        log::warn("bend fit: relative residual " + std::to_string(out.relative_residual) +
                 " above threshold");
    return out;
}

// ---------------------------------------------------------------------------
// Bump recovery
// ---------------------------------------------------------------------------

BumpRecovery recover_bump(const FrequencyDataset& data, const SupportWindow& window,
                          const RegularizationConfig& cfg) {
    window.validate();
    cfg.validate();
    const FrequencyDataset m0 = data.select_mode(0);
    const FrequencyDataset m1 = data.select_mode(1);
    if (m0.records.empty()) throw validation_error("bump recovery: no first-mode records");

    std::vector<double> om0;
    std::vector<cdouble> d0;
    for (const auto& r : m0.records) {
        om0.push_back(r.omega);
        d0.push_back(cdouble(0.0, -1.0) * r.value);  // divide out 2ik at omega = 2k
    }
    BumpRecovery out;
    out.mode0 = steepest_descent(d0, gamma_spec_for(window, om0), cfg);

    if (m1.records.empty()) {
        log::warn("bump recovery: no second-mode band, recovering h - g only");
        out.partial = true;
        out.h_app = integrate_profile(out.mode0.y);
        out.g_app = make_line(out.h_app.x0, out.h_app.dx, out.h_app.size());
        return out;
    }

    std::vector<double> om1;
    std::vector<cdouble> d1;
    for (const auto& r : m1.records) {
        const double k = r.k;
        const double k1 = std::sqrt(k * k - kPi * kPi);
        om1.push_back(r.omega);
        // divide out -sqrt2 i k (k1 + k)/k1 at omega = k + k1
        d1.push_back(cdouble(0.0, 1.0) * (k1 / (std::sqrt(2.0) * k)) * r.value);
    }
    out.mode1 = steepest_descent(d1, gamma_spec_for(window, om1), cfg);

    const int n = out.mode0.y.size();
    LineFunction hp = make_line(out.mode0.y.x0, out.mode0.y.dx, n);
    LineFunction gp = make_line(out.mode0.y.x0, out.mode0.y.dx, n);
    for (int i = 0; i < n; ++i) {
        const double s0 = out.mode0.y.samples[i].real();
        const double s1 = out.mode1.y.samples[i].real();
        hp.samples[i] = 0.5 * (s0 + s1);
        gp.samples[i] = 0.5 * (s1 - s0);
    }
    out.h_app = integrate_profile(hp);
    out.g_app = integrate_profile(gp);
    return out;
}

// ---------------------------------------------------------------------------
// Inhomogeneity recovery
// ---------------------------------------------------------------------------

InhomogeneityRecovery recover_inhomogeneity(const FrequencyDataset& data,
                                            const SupportWindow& window, int N,
                                            const RegularizationConfig& cfg, int ny_out) {
    window.validate();
    cfg.validate();
    if (N < 0) throw validation_error("inhomogeneity recovery: N must be >= 0");
    if (ny_out < 2) throw validation_error("inhomogeneity recovery: ny_out must be >= 2");

    InhomogeneityRecovery out;
    std::vector<ModeProblem> problems;
    for (int n = 0; n <= N; ++n) {
        const FrequencyDataset mn = data.select_mode(n);
        if (mn.records.empty()) {
            log::warn("inhomogeneity recovery: mode " + std::to_string(n) +
                     " has no usable band, skipped");
            out.skipped_modes.push_back(n);
            continue;
        }
        ModeProblem p;
        p.mode = n;
        std::vector<double> om;
        for (const auto& r : mn.records) {
            const double k = r.k;
            const double kn = std::sqrt(k * k - n * n * kPi * kPi);
            om.push_back(r.omega);
            p.data.push_back(kn / (k * k) * r.value);  // divide out (k+k_n) k^2 / k_n
        }
        p.spec = gamma_spec_for(window, std::move(om));
        problems.push_back(std::move(p));
    }
    if (problems.empty())
        throw validation_error("inhomogeneity recovery: no mode has usable data");

    out.descent = cfg.positivity ? positivity_projected_descent(problems, cfg, ny_out)
                                 : multi_mode_descent(problems, cfg);

    InhomogeneityMap map;
    map.x0 = window.x_min;
    map.dx = window.h();
    map.nx = window.points;
    map.ny = ny_out;
    map.values.assign(static_cast<std::size_t>(map.nx) * map.ny, 0.0);
    const double dy = 1.0 / (ny_out - 1);
    for (std::size_t m = 0; m < out.descent.profiles.size(); ++m) {
        const int mode = out.descent.modes[m];
        const LineFunction& prof = out.descent.profiles[m];
        for (int i = 0; i < map.nx; ++i) {
            const double yx = prof.samples[i].real();
            for (int j = 0; j < map.ny; ++j)
                map.values[static_cast<std::size_t>(i) * map.ny + j] +=
                    yx * eigenfunction(mode, j * dy);
        }
    }
    if (cfg.positivity) {
        for (double& v : map.values) v = std::max(0.0, v);
    }
    out.map = std::move(map);
    return out;
}

}  // namespace wgt
