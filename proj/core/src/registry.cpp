#include "wgt/registry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wgt/conditioning.hpp"
#include "wgt/config.hpp"
#include "wgt/dataset.hpp"
#include "wgt/defects.hpp"
#include "wgt/errors.hpp"
#include "wgt/inversion.hpp"
#include "wgt/line.hpp"
#include "wgt/log.hpp"
#include "wgt/modal.hpp"
#include "wgt/recover.hpp"
#include "wgt/svg.hpp"

namespace wgt {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

const json& registry_root() {
    static const json root = json::parse(registry_json_text());
    return root;
}

const json& entry_for(const std::string& id) {
    const json& root = registry_root();
    auto it = root.find(id);
    if (it != root.end()) return *it;
    std::ostringstream msg;
    msg << "unknown experiment id '" << id << "'; known ids:";
    for (const auto& item : root.items()) msg << ' ' << item.key();
    throw validation_error(msg.str());
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string num_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void add_check(ReproduceReport& rep, bool ok, const std::string& text) {
    rep.checks.push_back({ok, text});
    if (!ok) rep.passed = false;
}

void add_note(ReproduceReport& rep, const std::string& text) {
    rep.checks.push_back({true, "note: " + text});
}

std::string save_artifact(ReproduceReport& rep, const fs::path& dir, const std::string& name,
                          const std::string& content) {
    fs::path p = dir / name;
    write_text_file(p.string(), content);
    rep.artifacts.push_back(p.string());
    return p.string();
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

const char* palette(std::size_t i) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};
    return kColors[i % 8];
}

PlotSeries line_series(const LineFunction& f, const std::string& label, const std::string& color,
                       bool dashed = false) {
    PlotSeries s;
    s.x.resize(static_cast<std::size_t>(f.size()));
    s.y.resize(static_cast<std::size_t>(f.size()));
    for (int i = 0; i < f.size(); ++i) {
        s.x[static_cast<std::size_t>(i)] = f.x(i);
        s.y[static_cast<std::size_t>(i)] = f.samples[static_cast<std::size_t>(i)].real();
    }
    s.label = label;
    s.color = color;
    s.dashed = dashed;
    return s;
}

PlotSeries fn_series(double a, double b, int n, const std::function<double(double)>& f,
                     const std::string& label, const std::string& color, bool dashed = false) {
    PlotSeries s;
    s.x = linspace(a, b, n);
    s.y.resize(s.x.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) s.y[i] = f(s.x[i]);
    s.label = label;
    s.color = color;
    s.dashed = dashed;
    return s;
}

LineFunction sample_fn(double x0, double dx, int n, const std::function<double(double)>& f) {
    LineFunction out = make_line(x0, dx, n);
    for (int i = 0; i < n; ++i) out.samples[static_cast<std::size_t>(i)] = f(out.x(i));
    return out;
}

// (x-a)(b-x) on (a,b), zero outside.
double quad_profile(double x, double a, double b) {
    return (x > a && x < b) ? (x - a) * (b - x) : 0.0;
}

// amp * ((x-a)(b-x))^2 on (a,b), zero outside.
double quartic_profile(double x, double a, double b, double amp) {
    if (x <= a || x >= b) return 0.0;
    double u = (x - a) * (b - x);
    return amp * u * u;
}

double rel_l2_error(const LineFunction& rec, const std::function<double(double)>& truth) {
    double nume = 0.0, deno = 0.0;
    for (int i = 0; i < rec.size(); ++i) {
        double t = truth(rec.x(i));
        double d = rec.samples[static_cast<std::size_t>(i)].real() - t;
        nume += d * d;
        deno += t * t;
    }
    if (deno == 0.0) throw numerical_error("relative error undefined: reference vanishes on grid");
    return std::sqrt(nume / deno);
}

// Linear interpolation with zero extension outside the sampled window.
double line_at(const LineFunction& f, double x) {
    double t = (x - f.x0) / f.dx;
    if (t < 0.0 || t > f.size() - 1) return 0.0;
    int i = std::min(static_cast<int>(t), f.size() - 2);
    double a = t - i;
    return (1.0 - a) * f.samples[static_cast<std::size_t>(i)].real() +
           a * f.samples[static_cast<std::size_t>(i) + 1].real();
}

// Exact-model data for the half-line reflection transform, evaluated by
// quadrature on a grid much finer than (and independent of) the inversion
// grid.
std::vector<cdouble> gamma_data(const std::function<double(double)>& f, double a, double b,
                                const std::vector<double>& omegas, int quad_points = 4001) {
    LineFunction fine = sample_fn(a, (b - a) / (quad_points - 1), quad_points, f);
    std::vector<cdouble> d(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i)
        d[i] = omegas[i] * gamma_point(fine, omegas[i]);
    return d;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    const auto n = static_cast<double>(x.size());
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(std::max(y[i], 1e-300));
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (lx[i] - mx) * (ly[i] - my);
        var += (lx[i] - mx) * (lx[i] - mx);
    }
    return cov / var;
}

SupportWindow window_from(const json& j) {
    SupportWindow w;
    w.x_min = j.at("x_min").get<double>();
    w.x_max = j.at("x_max").get<double>();
    w.points = j.at("points").get<int>();
    w.validate();
    return w;
}

// Shared scaffolding for the defect experiments: frequency grid and solver
// geometry from the registry entry, no noise, fixed seed.
ExperimentConfig base_config(const std::string& id, const json& e, DefectDescriptor defect) {
    ExperimentConfig c;
    c.id = id;
    c.defect = std::move(defect);
    const json& f = e.at("frequencies");
    c.frequencies.min = f.at("min").get<double>();
    c.frequencies.max = f.at("max").get<double>();
    c.frequencies.count = f.at("count").get<int>();
    c.frequencies.guard = f.value("guard", c.frequencies.guard);
    if (e.contains("discretization")) {
        const json& d = e.at("discretization");
        c.discretization.dy = d.value("dy", c.discretization.dy);
        c.discretization.closure = d.value("closure", std::string("modal")) == "pml"
                                       ? BoundaryClosure::pml
                                       : BoundaryClosure::modal;
        c.discretization.margin = d.value("margin", c.discretization.margin);
        c.discretization.measure_offset = d.value("measure_offset", c.discretization.measure_offset);
        c.discretization.dispersion_budget =
            d.value("dispersion_budget", c.discretization.dispersion_budget);
    }
    c.provenance = e.value("provenance", std::string("fdfd"));
    c.inversion.modes = e.value("modes", 0);
    c.seed = 0;
    c.noise = 0.0;
    return c;
}

// ---------------------------------------------------------------------------
// Source-recovery studies (pure 1D transform experiments)
// ---------------------------------------------------------------------------

struct SourceRun {
    LineFunction recon;
    double error = 0.0;
    int iterations = 0;
};

SourceRun run_source_case(double fa, double fb, const SupportWindow& w, double omega0,
                          double omega1, int omega_count, double lambda) {
    auto truth = [fa, fb](double x) { return quad_profile(x, fa, fb); };
    std::vector<double> omegas = linspace(omega0, omega1, omega_count);
    std::vector<cdouble> d = gamma_data(truth, fa, fb, omegas);
    GammaOperatorSpec spec = gamma_spec_for(w, omegas);
    RegularizationConfig cfg;
    cfg.lambda = lambda;
    ReconstructionResult res = steepest_descent(d, spec, cfg);
    SourceRun out;
    out.error = rel_l2_error(res.y, truth);
    out.recon = std::move(res.y);
    out.iterations = res.iterations;
    return out;
}

void run_band(const json& e, ReproduceReport& rep, const fs::path& dir) {
    const double fa = e.at("f_support")[0], fb = e.at("f_support")[1];
    const double xa = e.at("window_span")[0], xb = e.at("window_span")[1];
    const int ppo = e.at("points_per_omega").get<int>();
    const double lambda = e.at("lambda");
    const double omega_min = e.at("omega_min");
    const int count = e.at("omega_count").get<int>();
    const auto tops = e.at("omega_tops").get<std::vector<double>>();

    ResultTable table;
    table.caption = "relative L2 recovery error per band top";
    table.columns = {"omega_top", "grid_points", "relative_error", "iterations"};
    PlotSpec plot;
    plot.title = "source recovery for growing band tops";
    plot.x_label = "x";
    plot.y_label = "f";
    plot.series.push_back(fn_series(
        xa, xb, 401, [&](double x) { return quad_profile(x, fa, fb); }, "true profile", "#000000",
        true));
    double final_error = 0.0;
    for (std::size_t i = 0; i < tops.size(); ++i) {
        const int n = static_cast<int>(std::lround(ppo * tops[i])) + 1;
        SupportWindow w{xa, xb, n};
        SourceRun run = run_source_case(fa, fb, w, omega_min, tops[i], count, lambda);
        table.rows.push_back({tops[i], static_cast<double>(n), run.error,
                              static_cast<double>(run.iterations)});
        rep.metrics["error_top_" + num(tops[i])] = run.error;
        plot.series.push_back(line_series(run.recon, "band top " + num(tops[i]), palette(i)));
        final_error = run.error;
    }
    const double lim = e.at("accept").at("final_error_max");
    add_check(rep, final_error <= lim,
              "relative error at band top " + num(tops.back()) + " = " + num(final_error) +
                  " (limit " + num(lim) + ")");
    save_artifact(rep, dir, "errors.csv", table.to_csv());
    save_artifact(rep, dir, "profiles.svg", render_line_plot(plot));
}

void run_slope(const json& e, ReproduceReport& rep, const fs::path& dir) {
    const double fa = e.at("f_support")[0], fb = e.at("f_support")[1];
    const double xa = e.at("window_span")[0], xb = e.at("window_span")[1];
    const int ppo = e.at("points_per_omega").get<int>();
    const double lambda = e.at("lambda");
    const double omega_min = e.at("omega_min");
    const int count = e.at("omega_count").get<int>();
    const auto tops = e.at("omega_tops").get<std::vector<double>>();

    ResultTable table;
    table.caption = "relative L2 recovery error versus band top";
    table.columns = {"omega_top", "grid_points", "relative_error"};
    std::vector<double> errors;
    for (double top : tops) {
        const int n = static_cast<int>(std::lround(ppo * top)) + 1;
        SupportWindow w{xa, xb, n};
        SourceRun run = run_source_case(fa, fb, w, omega_min, top, count, lambda);
        errors.push_back(run.error);
        table.rows.push_back({top, static_cast<double>(n), run.error});
    }
    const double slope = fit_loglog_slope(tops, errors);
    rep.metrics["slope"] = slope;
    const double lo = e.at("accept").at("slope_min"), hi = e.at("accept").at("slope_max");
    add_check(rep, slope >= lo && slope <= hi,
              "log-log error slope over band tops = " + num(slope) + " (expected within [" +
                  num(lo) + ", " + num(hi) + "])");

    PlotSpec plot;
    plot.title = "recovery error versus band top";
    plot.x_label = "band top";
    plot.y_label = "relative error";
    plot.log_x = true;
    plot.log_y = true;
    PlotSeries err_series;
    err_series.x = tops;
    err_series.y = errors;
    err_series.color = "#1f77b4";
    err_series.label = "measured error";
    plot.series.push_back(err_series);
    // reference line with slope -1 through the last point
    PlotSeries ref;
    ref.x = tops;
    ref.y.resize(tops.size());
    for (std::size_t i = 0; i < tops.size(); ++i)
        ref.y[i] = errors.back() * tops.back() / tops[i];
    ref.color = "#000000";
    ref.dashed = true;
    ref.label = "slope -1 reference";
    plot.series.push_back(ref);
    save_artifact(rep, dir, "errors.csv", table.to_csv());
    save_artifact(rep, dir, "error_slope.svg", render_line_plot(plot));
}

// Shared monotone-degradation check used by the gap and support studies.
void check_monotone_errors(ReproduceReport& rep, const std::vector<double>& labels,
                           const std::vector<double>& errors, const std::string& label_name) {
    bool ok = errors.back() > errors.front();
    std::ostringstream seq;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (i) {
            ok = ok && errors[i] >= 0.9 * errors[i - 1];
            seq << " <= ";
        }
        seq << num(errors[i]);
    }
    add_check(rep, ok,
              "recovery error grows with " + label_name + ": " + seq.str());
    (void)labels;
}

void run_lowgap(const json& e, ReproduceReport& rep, const fs::path& dir) {
    const double fa = e.at("f_support")[0], fb = e.at("f_support")[1];
    SupportWindow w = window_from(e.at("window"));
    const double lambda = e.at("lambda");
    const double top = e.at("omega_top");
    const int count = e.at("omega_count").get<int>();
    const auto gaps = e.at("omega0_over_pi").get<std::vector<double>>();

    ResultTable table;
    table.caption = "recovery error versus low-frequency gap";
    table.columns = {"omega0_over_pi", "relative_error", "iterations"};
    PlotSpec plot;
    plot.title = "source recovery with a growing low-frequency gap";
    plot.x_label = "x";
    plot.y_label = "f";
    plot.series.push_back(fn_series(
        w.x_min, w.x_max, 401, [&](double x) { return quad_profile(x, fa, fb); }, "true profile",
        "#000000", true));
    std::vector<double> errors;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double omega0 = std::max(gaps[i] * kPi, 0.01);
        SourceRun run = run_source_case(fa, fb, w, omega0, top, count, lambda);
        errors.push_back(run.error);
        table.rows.push_back({gaps[i], run.error, static_cast<double>(run.iterations)});
        rep.metrics["error_gap_" + num(gaps[i]) + "pi"] = run.error;
        plot.series.push_back(
            line_series(run.recon, "gap " + num(gaps[i]) + " pi", palette(i)));
    }
    if (e.at("accept").value("monotone_nondecreasing_error", false))
        check_monotone_errors(rep, gaps, errors, "the low-frequency gap");
    save_artifact(rep, dir, "errors.csv", table.to_csv());
    save_artifact(rep, dir, "profiles.svg", render_line_plot(plot));
}

void run_support(const json& e, ReproduceReport& rep, const fs::path& dir) {
    const double fa = e.at("f_support")[0], fb = e.at("f_support")[1];
    const double center = e.at("center");
    const int ppr = e.at("points_per_unit_r").get<int>();
    const double lambda = e.at("lambda");
    const double omega0 = e.at("omega0_over_pi").get<double>() * kPi;
    const double top = e.at("omega_top");
    const int count = e.at("omega_count").get<int>();
    const auto rs = e.at("r_values").get<std::vector<double>>();

    ResultTable table;
    table.caption = "recovery error versus support radius";
    table.columns = {"r", "grid_points", "relative_error"};
    PlotSpec plot;
    plot.title = "source recovery for growing support windows";
    plot.x_label = "x";
    plot.y_label = "f";
    plot.series.push_back(fn_series(
        center - rs.back(), center + rs.back(), 401,
        [&](double x) { return quad_profile(x, fa, fb); }, "true profile", "#000000", true));
    std::vector<double> errors;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const int n = static_cast<int>(std::lround(ppr * rs[i])) + 1;
        SupportWindow w{center - rs[i], center + rs[i], n};
        SourceRun run = run_source_case(fa, fb, w, omega0, top, count, lambda);
        errors.push_back(run.error);
        table.rows.push_back({rs[i], static_cast<double>(n), run.error});
        rep.metrics["error_r_" + num(rs[i])] = run.error;
        plot.series.push_back(line_series(run.recon, "r = " + num(rs[i]), palette(i)));
    }
    if (e.at("accept").value("monotone_nondecreasing_error", false))
        check_monotone_errors(rep, rs, errors, "the support radius");
    save_artifact(rep, dir, "errors.csv", table.to_csv());
    save_artifact(rep, dir, "profiles.svg", render_line_plot(plot));
}

// ---------------------------------------------------------------------------
// Conditioning study
// ---------------------------------------------------------------------------

void run_conditioning(const json& e, ReproduceReport& rep, const fs::path& dir) {
    const auto rs = e.at("r_values").get<std::vector<double>>();
    const auto gaps = e.at("omega0_over_pi").get<std::vector<double>>();
    std::vector<double> omega0s;
    omega0s.reserve(gaps.size());
    for (double g : gaps) omega0s.push_back(g * kPi);

    const std::vector<ConditioningEntry> entries = conditioning_study(rs, omega0s);
    auto cond_at = [&](double r, double omega0) -> const ConditioningEntry& {
        for (const auto& en : entries)
            if (std::abs(en.r - r) < 1e-12 && std::abs(en.omega0 - omega0) < 1e-9) return en;
        throw numerical_error("conditioning sweep is missing a requested (r, omega0) pair");
    };

    ResultTable table;
    table.caption = "condition number of the band-restricted normal matrix";
    table.columns = {"r"};
    for (double g : gaps) table.columns.push_back("cond_omega0_" + num(g) + "pi");
    PlotSpec plot;
    plot.title = "conditioning of band-restricted recovery";
    plot.x_label = "support radius r";
    plot.y_label = "condition number";
    plot.log_y = true;
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        PlotSeries s;
        s.color = palette(j);
        s.label = "omega0 = " + num(gaps[j]) + " pi";
        for (double r : rs) {
            s.x.push_back(r);
            s.y.push_back(cond_at(r, omega0s[j]).cond);
        }
        plot.series.push_back(s);
    }
    for (double r : rs) {
        std::vector<double> row{r};
        for (double o : omega0s) row.push_back(cond_at(r, o).cond);
        table.rows.push_back(row);
    }

    for (const json& a : e.at("accept").at("anchors")) {
        const double r = a.at("r"), g = a.at("omega0_over_pi"), want = a.at("value");
        const ConditioningEntry& en = cond_at(r, g * kPi);
        bool ok;
        std::string how;
        if (a.contains("rel_tol")) {
            const double tol = a.at("rel_tol");
            ok = std::abs(en.cond - want) <= tol * want;
            how = "within " + num(tol * 100.0) + "% of " + num(want);
        } else {
            const double f = a.at("factor");
            ok = en.cond >= want / f && en.cond <= want * f;
            how = "within a factor " + num(f) + " of " + num(want);
        }
        rep.metrics["cond_r_" + num(r) + "_omega0_" + num(g) + "pi"] = en.cond;
        add_check(rep, ok,
                  "cond(r=" + num(r) + ", omega0=" + num(g) + " pi) = " + num(en.cond) + " " + how);
        if (en.numerically_singular)
            add_note(rep, "entry (r=" + num(r) + ", omega0=" + num(g) +
                              " pi) hit the numerical-singularity floor");
    }
    if (e.at("accept").value("monotone_in_r", false)) {
        bool ok = true;
        for (std::size_t j = 0; j < gaps.size(); ++j)
            for (std::size_t i = 1; i < rs.size(); ++i)
                ok = ok && cond_at(rs[i], omega0s[j]).cond >=
                               0.999 * cond_at(rs[i - 1], omega0s[j]).cond;
        add_check(rep, ok, "condition number is non-decreasing in r for every band gap");
    }
    save_artifact(rep, dir, "condition_numbers.csv", table.to_csv());
    save_artifact(rep, dir, "condition_numbers.svg", render_line_plot(plot));
}

// ---------------------------------------------------------------------------
// Bend experiments
// ---------------------------------------------------------------------------

BendParams bend_from(const json& j) {
    BendParams p;
    p.x_c = j.at("x_c").get<double>();
    p.r = j.at("r").get<double>();
    p.theta = j.at("theta_over_pi").get<double>() * kPi;
    return p;
}

std::array<double, 3> bend_errors(const BendParams& got, const BendParams& want) {
    return {std::abs(got.x_c - want.x_c) / std::abs(want.x_c),
            std::abs(got.r - want.r) / std::abs(want.r),
            std::abs(std::abs(got.theta) - std::abs(want.theta)) / std::abs(want.theta)};
}

std::string bend_label(const BendParams& p) {
    return "(x_c=" + num(p.x_c) + ", r=" + num(p.r) + ", theta=" + num(p.theta / kPi) + " pi)";
}

// Check one fitted bend against per-parameter bounds or a reference row with
// a tolerance factor; emits one report line.
void check_bend_case(ReproduceReport& rep, const json& cj, const BendParams& truth,
                     const std::array<double, 3>& errs, const std::string& tag) {
    std::string etxt =
        "(" + num(errs[0]) + ", " + num(errs[1]) + ", " + num(errs[2]) + ")";
    if (cj.contains("bounds")) {
        const auto b = cj.at("bounds").get<std::vector<double>>();
        bool ok = errs[0] <= b[0] && errs[1] <= b[1] && errs[2] <= b[2];
        add_check(rep, ok,
                  tag + " " + bend_label(truth) + ": parameter errors " + etxt + " within (" +
                      num(b[0]) + ", " + num(b[1]) + ", " + num(b[2]) + ") [data: fdfd]");
    } else {
        const auto refv = cj.at("reference").get<std::vector<double>>();
        const double f = cj.at("factor");
        bool ok = errs[0] <= f * refv[0] && errs[1] <= f * refv[1] && errs[2] <= f * refv[2];
        add_check(rep, ok,
                  tag + " " + bend_label(truth) + ": parameter errors " + etxt + " within " +
                      num(f) + "x of reference (" + num(refv[0]) + ", " + num(refv[1]) + ", " +
                      num(refv[2]) + ") [data: fdfd]");
    }
}

void run_bend_table(const json& e, ReproduceReport& rep, const fs::path& dir, int jobs) {
    add_note(rep, "scattering data computed by the bundled finite-difference solver "
                  "(provenance 'fdfd'); round-trip rows use the closed-form model");
    ResultTable table;
    table.caption = "relative errors of the recovered bend parameters (fdfd data)";
    table.columns = {"x_c", "r", "theta", "err_x_c", "err_r", "err_theta", "model_roundtrip_err"};
    const double rt_lim = e.at("roundtrip_max");
    int idx = 0;
    for (const json& cj : e.at("cases")) {
        ++idx;
        const BendParams truth = bend_from(cj);
        const std::string tag = "case " + std::to_string(idx);
        const std::string stem = "case" + std::to_string(idx);

        ExperimentConfig mc = base_config(rep.id + "-" + stem + "-model", e, truth);
        mc.provenance = "born-model";
        const BendFitResult mfit = recover_bend(generate_dataset(mc, 1));
        const std::array<double, 3> rterr = bend_errors(mfit.bends.front(), truth);
        const double rt = std::max({rterr[0], rterr[1], rterr[2]});

        ExperimentConfig fc = base_config(rep.id + "-" + stem, e, truth);
        const FrequencyDataset data = generate_dataset(fc, jobs);
        save_artifact(rep, dir, stem + "-data.json", to_json_string(data));
        const BendFitResult fit = recover_bend(data);
        const std::array<double, 3> errs = bend_errors(fit.bends.front(), truth);

        table.rows.push_back(
            {truth.x_c, truth.r, truth.theta, errs[0], errs[1], errs[2], rt});
        rep.metrics[stem + "_err_x_c"] = errs[0];
        rep.metrics[stem + "_err_r"] = errs[1];
        rep.metrics[stem + "_err_theta"] = errs[2];
        rep.metrics[stem + "_roundtrip"] = rt;
        add_check(rep, rt <= rt_lim,
                  tag + " " + bend_label(truth) + ": model-data round trip error " + num(rt) +
                      " <= " + num(rt_lim));
        check_bend_case(rep, cj, truth, errs, tag);
    }
    save_artifact(rep, dir, "errors.csv", table.to_csv());
}

void run_bend_figure(const json& e, ReproduceReport& rep, const fs::path& dir, int jobs) {
    add_note(rep, "scattering data computed by the bundled finite-difference solver "
                  "(provenance 'fdfd')");
    ResultTable table;
    table.caption = "true and recovered bend parameters";
    table.columns = {"x_c", "r", "theta", "x_c_fit", "r_fit", "theta_fit"};
    int idx = 0;
    for (const json& cj : e.at("cases")) {
        ++idx;
        const BendParams truth = bend_from(cj);
        const std::string tag = "case " + std::to_string(idx);
        const std::string stem = "case" + std::to_string(idx);
        ExperimentConfig fc = base_config(rep.id + "-" + stem, e, truth);
        const FrequencyDataset data = generate_dataset(fc, jobs);
        save_artifact(rep, dir, stem + "-data.json", to_json_string(data));
        const BendFitResult fit = recover_bend(data);
        const BendParams got = fit.bends.front();
        table.rows.push_back({truth.x_c, truth.r, truth.theta, got.x_c, got.r, got.theta});
        check_bend_case(rep, cj, truth, bend_errors(got, truth), tag);

        const RectangleProfile tp = bend_source_profile(truth);
        const RectangleProfile fp = bend_source_profile(got);
        const double x0 = std::min(tp.x_start, fp.x_start) - 0.5;
        const double x1 = std::max(tp.x_end, fp.x_end) + 0.5;
        PlotSpec plot;
        plot.title = "equivalent bend source, true vs recovered (" + stem + ")";
        plot.x_label = "x";
        plot.y_label = "source amplitude";
        plot.series.push_back(
            line_series(tp.sampled(x0, (x1 - x0) / 800, 801), "true", "#000000", true));
        plot.series.push_back(
            line_series(fp.sampled(x0, (x1 - x0) / 800, 801), "recovered", "#d62728"));
        save_artifact(rep, dir, stem + ".svg", render_line_plot(plot));
    }
    save_artifact(rep, dir, "parameters.csv", table.to_csv());
}

void run_bends_figure(const json& e, ReproduceReport& rep, const fs::path& dir, int jobs) {
    add_note(rep, "scattering data computed by the bundled finite-difference solver "
                  "(provenance 'fdfd')");
    if (e.contains("note")) add_note(rep, e.at("note").get<std::string>());
    BendList truths;
    for (const json& bj : e.at("bends")) truths.push_back(bend_from(bj));

    ExperimentConfig fc = base_config(rep.id, e, truths);
    const FrequencyDataset data = generate_dataset(fc, jobs);
    save_artifact(rep, dir, "data.json", to_json_string(data));

    BendFitOptions opts;
    opts.n_bends = static_cast<int>(truths.size());
    opts.p2_min = e.at("fit").at("p2_min").get<double>();
    opts.p2_max = e.at("fit").at("p2_max").get<double>();
    const BendFitResult fit = recover_bend(data, opts);

    ResultTable table;
    table.caption = "true and recovered bend parameters (angle sign not identifiable)";
    table.columns = {"x_c", "r", "theta", "x_c_fit", "r_fit", "theta_fit_magnitude"};
    const double pos_tol = e.at("accept").value("position_tol", 0.5);
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const BendParams& t = truths[i];
        const BendParams& g = fit.bends[i];
        table.rows.push_back({t.x_c, t.r, t.theta, g.x_c, g.r, std::abs(g.theta)});
        rep.metrics["bend" + std::to_string(i + 1) + "_x_c"] = g.x_c;
        rep.metrics["bend" + std::to_string(i + 1) + "_theta_mag"] = std::abs(g.theta);
        add_check(rep, std::abs(g.x_c - t.x_c) <= pos_tol,
                  "bend " + std::to_string(i + 1) + " located at x_c=" + num(g.x_c) +
                      " (true " + num(t.x_c) + ", tolerance " + num(pos_tol) + ") [data: fdfd]");
    }
    rep.metrics["fit_relative_residual"] = fit.relative_residual;
    const double res_lim = e.at("accept").at("max_relative_residual");
    add_check(rep, fit.relative_residual <= res_lim,
              "two-rectangle fit residual " + num(fit.relative_residual) + " <= " + num(res_lim) +
                  " [data: fdfd]");

    double x0 = truths.front().x_c - 0.5, x1 = 0.0;
    for (const BendParams& t : truths) x1 = std::max(x1, bend_source_profile(t).x_end);
    for (const BendParams& g : fit.bends) x1 = std::max(x1, bend_source_profile(g).x_end);
    x1 += 0.5;
    const int n = 801;
    LineFunction true_prof = make_line(x0, (x1 - x0) / (n - 1), n);
    LineFunction fit_prof = make_line(x0, (x1 - x0) / (n - 1), n);
    for (const BendParams& t : truths) {
        LineFunction s = bend_source_profile(t).sampled(x0, (x1 - x0) / (n - 1), n);
        for (int i = 0; i < n; ++i) true_prof.samples[static_cast<std::size_t>(i)] +=
            s.samples[static_cast<std::size_t>(i)];
    }
    for (const BendParams& g : fit.bends) {
        LineFunction s = bend_source_profile(g).sampled(x0, (x1 - x0) / (n - 1), n);
        for (int i = 0; i < n; ++i) fit_prof.samples[static_cast<std::size_t>(i)] +=
            s.samples[static_cast<std::size_t>(i)];
    }
    PlotSpec plot;
    plot.title = "equivalent source of two successive bends, true vs recovered";
    plot.x_label = "x";
    plot.y_label = "source amplitude";
    plot.series.push_back(line_series(true_prof, "true", "#000000", true));
    plot.series.push_back(line_series(fit_prof, "recovered", "#d62728"));
    save_artifact(rep, dir, "sources.svg", render_line_plot(plot));
    save_artifact(rep, dir, "parameters.csv", table.to_csv());
}

// ---------------------------------------------------------------------------
// Wall-profile experiments
// ---------------------------------------------------------------------------

void run_bump_table(const json& e, ReproduceReport& rep, const fs::path& dir, int jobs) {
    add_note(rep, "scattering data computed by the bundled finite-difference solver "
                  "(provenance 'fdfd')");
    const double a = e.at("bump_support")[0], b = e.at("bump_support")[1];
    const int pn = e.at("profile_points").get<int>();
    const SupportWindow w = window_from(e.at("window"));
    RegularizationConfig cfg;
    cfg.lambda = e.at("lambda");
    const auto amps = e.at("amplitudes").get<std::vector<double>>();
    const auto refs = e.at("accept").at("reference").get<std::vector<double>>();
    const double factor = e.at("accept").at("factor");

    ResultTable table;
    table.caption = "relative error of the recovered top-wall profile (fdfd data)";
    table.columns = {"amplitude", "relative_error", "reference"};
    PlotSpec plot;
    plot.title = "top-wall profiles, true (dashed) vs recovered";
    plot.x_label = "x";
    plot.y_label = "h";
    std::vector<double> errors;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double A = amps[i];
        auto truth = [=](double x) { return quartic_profile(x, a, b, A); };
        BumpProfiles bp;
        bp.h = sample_fn(a, (b - a) / (pn - 1), pn, truth);
        bp.g = make_line(a, (b - a) / (pn - 1), pn);
        ExperimentConfig c = base_config(rep.id + "-amp" + std::to_string(i + 1), e, bp);
        const FrequencyDataset data = generate_dataset(c, jobs);
        save_artifact(rep, dir, "amp" + std::to_string(i + 1) + "-data.json",
                      to_json_string(data));
        const BumpRecovery rec = recover_bump(data, w, cfg);
        if (rec.partial)
            add_check(rep, false, "amplitude " + num(A) + ": second-mode band missing");
        const double err = rel_l2_error(rec.h_app, truth);
        errors.push_back(err);
        table.rows.push_back({A, err, refs[i]});
        rep.metrics["error_amp_" + num(A)] = err;
        add_check(rep, err <= factor * refs[i],
                  "amplitude " + num(A) + ": profile error " + num(err) + " within " +
                      num(factor) + "x of reference " + num(refs[i]) + " [data: fdfd]");
        plot.series.push_back(
            fn_series(w.x_min, w.x_max, 401, truth, "true A=" + num(A), palette(i), true));
        plot.series.push_back(line_series(rec.h_app, "recovered A=" + num(A), palette(i)));
    }
    if (e.at("accept").value("strict_monotone", false)) {
        bool ok = true;
        std::ostringstream seq;
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (i) {
                ok = ok && errors[i] > errors[i - 1];
                seq << " < ";
            }
            seq << num(errors[i]);
        }
        add_check(rep, ok, "profile error grows strictly with the amplitude: " + seq.str());
    }
    save_artifact(rep, dir, "errors.csv", table.to_csv());
    save_artifact(rep, dir, "profiles.svg", render_line_plot(plot));
}

void run_bump_figure(const json& e, ReproduceReport& rep, const fs::path& dir, int jobs) {
    add_note(rep, "scattering data computed by the bundled finite-difference solver "
                  "(provenance 'fdfd')");
    const SupportWindow w = window_from(e.at("window"));
    RegularizationConfig cfg;
    cfg.lambda = e.at("lambda");
    const int pn = e.at("profile_points").get<int>();

    ResultTable table;
    table.caption = "relative errors of the recovered wall profiles (fdfd data)";
    table.columns = {"case", "h_error", "g_error"};
    int idx = 0;
    for (const json& cj : e.at("cases")) {
        ++idx;
        const std::string name = cj.at("name").get<std::string>();
        const json& hj = cj.at("h");
        const json& gj = cj.at("g");
        const double ha = hj.at("support")[0], hb = hj.at("support")[1];
        const double ga = gj.at("support")[0], gb = gj.at("support")[1];
        const double hamp = hj.at("amplitude"), gamp = gj.at("amplitude");
        auto htruth = [=](double x) { return quartic_profile(x, ha, hb, hamp); };
        auto gtruth = [=](double x) { return quartic_profile(x, ga, gb, gamp); };
        const double pa = std::min(ha, ga), pb = std::max(hb, gb);
        BumpProfiles bp;
        bp.h = sample_fn(pa, (pb - pa) / (pn - 1), pn, htruth);
        bp.g = sample_fn(pa, (pb - pa) / (pn - 1), pn, gtruth);
        ExperimentConfig c = base_config(rep.id + "-" + name, e, bp);
        const FrequencyDataset data = generate_dataset(c, jobs);
        save_artifact(rep, dir, name + "-data.json", to_json_string(data));
        const BumpRecovery rec = recover_bump(data, w, cfg);
        if (rec.partial)
            add_check(rep, false, name + " pair: second-mode band missing");
        const double herr = rel_l2_error(rec.h_app, htruth);
        const double gerr = rel_l2_error(rec.g_app, gtruth);
        table.rows.push_back({static_cast<double>(idx), herr, gerr});
        rep.metrics[name + "_h_error"] = herr;
        rep.metrics[name + "_g_error"] = gerr;
        if (cj.contains("accept_h_error_max")) {
            const double lim = cj.at("accept_h_error_max");
            add_check(rep, herr <= lim,
                      name + " pair: top profile error " + num(herr) + " <= " + num(lim) +
                          " [data: fdfd]");
        } else {
            add_note(rep, name + " pair: profile errors h " + num(herr) + ", g " + num(gerr) +
                              " [data: fdfd]");
        }
        PlotSpec plot;
        plot.title = "wall profiles, true (dashed) vs recovered (" + name + " pair)";
        plot.x_label = "x";
        plot.y_label = "wall offset";
        plot.series.push_back(fn_series(w.x_min, w.x_max, 401, htruth, "h true", "#1f77b4", true));
        plot.series.push_back(line_series(rec.h_app, "h recovered", "#1f77b4"));
        plot.series.push_back(fn_series(w.x_min, w.x_max, 401, gtruth, "g true", "#d62728", true));
        plot.series.push_back(line_series(rec.g_app, "g recovered", "#d62728"));
        save_artifact(rep, dir, name + ".svg", render_line_plot(plot));
    }
    save_artifact(rep, dir, "errors.csv", table.to_csv());
}

// ---------------------------------------------------------------------------
// Index-perturbation experiments
// ---------------------------------------------------------------------------

struct EllipseSpec {
    double cx = 0.0, cy = 0.0, sx = 1.0, sy = 1.0, amp = 0.0;
};

EllipseSpec ellipse_from(const json& j) {
    EllipseSpec el;
    el.cx = j.at("center")[0];
    el.cy = j.at("center")[1];
    el.sx = j.at("semi")[0];
    el.sy = j.at("semi")[1];
    el.amp = j.at("amplitude");
    return el;
}

// amp * rho^2 inside the ellipse rho <= 1, zero outside.
double ellipse_value(const EllipseSpec& el, double x, double y) {
    const double u = (x - el.cx) / el.sx, v = (y - el.cy) / el.sy;
    const double rho2 = u * u + v * v;
    return rho2 <= 1.0 ? el.amp * rho2 : 0.0;
}

InhomogeneityMap map_from(const EllipseSpec& el, const json& grid) {
    InhomogeneityMap m;
    m.x0 = grid.at("x0");
    m.dx = grid.at("dx");
    m.nx = grid.at("nx").get<int>();
    m.ny = grid.at("ny").get<int>();
    m.values.assign(static_cast<std::size_t>(m.nx) * m.ny, 0.0);
    for (int i = 0; i < m.nx; ++i)
        for (int j = 0; j < m.ny; ++j)
            m.values[static_cast<std::size_t>(i) * m.ny + j] =
                ellipse_value(el, m.x0 + i * m.dx, j * m.dy());
    return m;
}

double map_rel_error(const InhomogeneityMap& rec, const EllipseSpec& el) {
    double nume = 0.0, deno = 0.0;
    for (int i = 0; i < rec.nx; ++i)
        for (int j = 0; j < rec.ny; ++j) {
            const double t = ellipse_value(el, rec.x0 + i * rec.dx, j * rec.dy());
            const double d = rec.at(i, j) - t;
            nume += d * d;
            deno += t * t;
        }
    if (deno == 0.0)
        throw numerical_error("relative map error undefined: reference vanishes on grid");
    return std::sqrt(nume / deno);
}

// N-mode transverse part of the ellipse map on the same grid as `like`.  The
// exact map jumps across the ellipse rim, so it carries transverse-mode energy
// far beyond any finite reconstruction basis; this reference removes exactly
// the part no N-mode method can represent.
InhomogeneityMap banded_ellipse_like(const EllipseSpec& el, const InhomogeneityMap& like,
                                     int n_modes) {
    constexpr int ny_fine = 2001;
    constexpr double dyf = 1.0 / (ny_fine - 1);
    InhomogeneityMap out = like;
    std::vector<double> coeff(static_cast<std::size_t>(n_modes));
    for (int i = 0; i < out.nx; ++i) {
        const double x = out.x0 + i * out.dx;
        std::fill(coeff.begin(), coeff.end(), 0.0);
        for (int q = 0; q < ny_fine; ++q) {
            const double y = q * dyf;
            const double v = ellipse_value(el, x, y);
            if (v == 0.0) continue;
            const double w = (q == 0 || q == ny_fine - 1) ? 0.5 : 1.0;
            for (int n = 0; n < n_modes; ++n) coeff[n] += w * v * eigenfunction(n, y) * dyf;
        }
        for (int j = 0; j < out.ny; ++j) {
            double s = 0.0;
            for (int n = 0; n < n_modes; ++n) s += coeff[n] * eigenfunction(n, j * out.dy());
            out.values[static_cast<std::size_t>(i) * out.ny + j] = s;
        }
    }
    return out;
}

// ||a - b|| / ||b|| over a shared grid.
double map_rel_diff(const InhomogeneityMap& a, const InhomogeneityMap& b) {
    double nume = 0.0, deno = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        nume += d * d;
        deno += b.values[i] * b.values[i];
    }
    if (deno == 0.0)
        throw numerical_error("relative map error undefined: reference vanishes on grid");
    return std::sqrt(nume / deno);
}

std::array<double, 2> nonneg_centroid(const InhomogeneityMap& m) {
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (int i = 0; i < m.nx; ++i)
        for (int j = 0; j < m.ny; ++j) {
            const double v = std::max(m.at(i, j), 0.0);
            sw += v;
            sx += v * (m.x0 + i * m.dx);
            sy += v * (j * m.dy());
        }
    if (sw <= 0.0) return {m.x0 + 0.5 * (m.nx - 1) * m.dx, 0.5};
    return {sx / sw, sy / sw};
}

std::string heatmap_svg(const InhomogeneityMap& m, const std::string& title, double v_min,
                        double v_max) {
    HeatmapSpec hs;
    hs.title = title;
    hs.x0 = m.x0;
    hs.x1 = m.x_end();
    hs.y0 = 0.0;
    hs.y1 = 1.0;
    hs.nx = m.nx;
    hs.ny = m.ny;
    hs.values = m.values;
    hs.v_min = v_min;
    hs.v_max = v_max;
    return render_heatmap(hs);
}

void run_inhom_modes(const json& e, ReproduceReport& rep, const fs::path& dir) {
    add_note(rep, "scattering data from the closed-form single-scattering model "
                  "(provenance 'born-model')");
    const EllipseSpec el = ellipse_from(e.at("ellipse"));
    const InhomogeneityMap truth = map_from(el, e.at("map"));
    const int N = e.at("modes").get<int>();

    ExperimentConfig c = base_config(rep.id, e, truth);
    const FrequencyDataset data = generate_dataset(c, 1);
    save_artifact(rep, dir, "data.json", to_json_string(data));

    const SupportWindow w = window_from(e.at("window"));
    RegularizationConfig cfg;
    cfg.lambda = e.at("lambda");
    const InhomogeneityRecovery rec = recover_inhomogeneity(data, w, N, cfg, truth.ny);

    ResultTable table;
    table.caption = "per-mode relative recovery error (single-scattering data)";
    table.columns = {"mode", "relative_error"};
    PlotSpec plot;
    plot.title = "modal components, true (dashed) vs recovered";
    plot.x_label = "x";
    plot.y_label = "component amplitude";
    double err0 = -1.0;
    for (std::size_t m = 0; m < rec.descent.modes.size(); ++m) {
        const int mode = rec.descent.modes[m];
        const LineFunction tcomp = truth.modal_component(mode);
        const LineFunction& rcomp = rec.descent.profiles[m];
        const double err =
            rel_l2_error(rcomp, [&](double x) { return line_at(tcomp, x); });
        if (mode == 0) err0 = err;
        table.rows.push_back({static_cast<double>(mode), err});
        rep.metrics["error_mode_" + std::to_string(mode)] = err;
        if (mode <= 2) {
            plot.series.push_back(line_series(tcomp, "mode " + std::to_string(mode) + " true",
                                              palette(static_cast<std::size_t>(mode)), true));
            plot.series.push_back(line_series(rcomp, "mode " + std::to_string(mode) + " rec",
                                              palette(static_cast<std::size_t>(mode))));
        }
    }
    for (int s : rec.skipped_modes)
        add_note(rep, "mode " + std::to_string(s) + " skipped: no usable band");
    const double lim = e.at("accept").at("mode0_error_max");
    add_check(rep, err0 >= 0.0 && err0 <= lim,
              "uniform-mode component error " + num(err0) + " <= " + num(lim) +
                  " [data: born-model]");
    save_artifact(rep, dir, "mode_errors.csv", table.to_csv());
    save_artifact(rep, dir, "modes.svg", render_line_plot(plot));
}

void run_inhom_figure(const json& e, ReproduceReport& rep, const fs::path& dir, int jobs) {
    add_note(rep, "scattering data computed by the bundled finite-difference solver "
                  "(provenance 'fdfd')");
    if (e.contains("note")) add_note(rep, e.at("note").get<std::string>());
    const EllipseSpec el = ellipse_from(e.at("ellipse"));
    const InhomogeneityMap truth = map_from(el, e.at("map"));
    const int N = e.at("modes").get<int>();

    ExperimentConfig c = base_config(rep.id, e, truth);
    const FrequencyDataset data = generate_dataset(c, jobs);
    save_artifact(rep, dir, "data.json", to_json_string(data));

    const SupportWindow w = window_from(e.at("window"));
    RegularizationConfig cfg;
    cfg.lambda = e.at("lambda");
    cfg.max_iter = e.value("max_iter", cfg.max_iter);
    cfg.positivity = false;
    const InhomogeneityRecovery plain = recover_inhomogeneity(data, w, N, cfg, truth.ny);
    cfg.positivity = true;
    const InhomogeneityRecovery projected = recover_inhomogeneity(data, w, N, cfg, truth.ny);

    const double err_plain = map_rel_error(plain.map, el);
    const double err_proj = map_rel_error(projected.map, el);
    const InhomogeneityMap banded = banded_ellipse_like(el, projected.map, N);
    const double err_plain_banded = map_rel_diff(plain.map, banded);
    const double err_proj_banded = map_rel_diff(projected.map, banded);
    const double floor = map_rel_error(banded, el);
    const std::array<double, 2> cen = nonneg_centroid(projected.map);
    const double cdist = std::hypot(cen[0] - el.cx, cen[1] - el.cy);
    rep.metrics["error_unprojected"] = err_plain;
    rep.metrics["error_projected"] = err_proj;
    rep.metrics["error_unprojected_banded"] = err_plain_banded;
    rep.metrics["error_projected_banded"] = err_proj_banded;
    rep.metrics["mode_truncation_floor"] = floor;
    rep.metrics["centroid_x"] = cen[0];
    rep.metrics["centroid_y"] = cen[1];
    for (int s : projected.skipped_modes)
        add_note(rep, "mode " + std::to_string(s) + " skipped: no usable band");

    const json& acc = e.at("accept");
    if (acc.contains("error_max")) {
        const double lim = acc.at("error_max");
        add_note(rep, "the exact map jumps across the ellipse rim, leaving " + num(floor) +
                          " of its norm in transverse modes beyond the " + std::to_string(N) +
                          " reconstructed ones; the error bound is therefore applied against "
                          "the " + std::to_string(N) + "-mode part of the map and the exact-map "
                          "error is reported alongside");
        add_check(rep, err_proj_banded <= lim,
                  "positivity-projected error vs the " + std::to_string(N) +
                      "-mode part of the map " + num(err_proj_banded) + " <= " + num(lim) +
                      " (vs exact map " + num(err_proj) + ", truncation floor " + num(floor) +
                      ") [data: fdfd]");
    }
    if (acc.contains("centroid_tol")) {
        const double tol = acc.at("centroid_tol");
        add_check(rep, cdist <= tol,
                  "recovered centroid (" + num(cen[0]) + ", " + num(cen[1]) +
                      ") within " + num(tol) + " of (" + num(el.cx) + ", " + num(el.cy) +
                      ") [data: fdfd]");
    }
    if (acc.value("projected_le_unprojected", false))
        add_check(rep, err_proj <= err_plain,
                  "projected error " + num(err_proj) + " <= unprojected error " +
                      num(err_plain) + " [data: fdfd]");

    ResultTable table;
    table.caption = "index-map recovery errors (fdfd data)";
    table.columns = {"variant", "relative_error"};
    table.rows.push_back({0.0, err_plain});
    table.rows.push_back({1.0, err_proj});
    save_artifact(rep, dir, "errors.csv", table.to_csv());
    const double vmin = -0.2 * el.amp, vmax = el.amp;
    save_artifact(rep, dir, "map_true.svg", heatmap_svg(truth, "true index perturbation",
                                                        vmin, vmax));
    save_artifact(rep, dir, "map_unprojected.svg",
                  heatmap_svg(plain.map, "recovered (no positivity)", vmin, vmax));
    save_artifact(rep, dir, "map_projected.svg",
                  heatmap_svg(projected.map, "recovered (positivity projected)", vmin, vmax));
}

}  // namespace

// ---------------------------------------------------------------------------
// Public interface
// ---------------------------------------------------------------------------

std::string ResultTable::to_csv() const {
    std::ostringstream out;
    if (!caption.empty()) out << "# " << caption << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num_full(row[i]);
        out << '\n';
    }
    return out.str();
}

std::string ReproduceReport::to_text() const {
    std::ostringstream out;
    out << "experiment: " << id << '\n';
    out << "status: " << (passed ? "PASS" : "FAIL") << '\n';
    out << "checks:\n";
    for (const CheckLine& c : checks)
        out << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.text << '\n';
    if (!metrics.empty()) {
        out << "metrics:\n";
        for (const auto& [key, value] : metrics) out << "  " << key << " = " << num(value) << '\n';
    }
    if (!artifacts.empty()) {
        out << "artifacts:\n";
        for (const std::string& a : artifacts) out << "  " << a << '\n';
    }
    return out.str();
}

std::vector<std::string> registry_ids() {
    std::vector<std::string> ids;
    for (const auto& item : registry_root().items()) ids.push_back(item.key());
    return ids;
}

std::string registry_title(const std::string& id) {
    return entry_for(id).at("title").get<std::string>();
}

ReproduceReport run_reproduction(const std::string& id, const std::string& out_dir, int jobs) {
    const json& e = entry_for(id);
    if (jobs < 1) throw validation_error("reproduce: jobs must be >= 1");
    ReproduceReport rep;
    rep.id = id;
    const fs::path dir = fs::path(out_dir) / id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw validation_error("reproduce: cannot create output directory " + dir.string() + ": " +
                               ec.message());
    jobs = std::min(jobs, e.value("max_jobs", 1 << 20));
    const std::string kind = e.at("kind").get<std::string>();
    log::info("reproduce " + id + " (" + kind + ") -> " + dir.string());

    if (kind == "source-recovery-band")
        run_band(e, rep, dir);
    else if (kind == "source-recovery-slope")
        run_slope(e, rep, dir);
    else if (kind == "source-recovery-lowgap")
        run_lowgap(e, rep, dir);
    else if (kind == "source-recovery-support")
        run_support(e, rep, dir);
    else if (kind == "conditioning")
        run_conditioning(e, rep, dir);
    else if (kind == "bend-table")
        run_bend_table(e, rep, dir, jobs);
    else if (kind == "bend-figure")
        run_bend_figure(e, rep, dir, jobs);
    else if (kind == "bends-figure")
        run_bends_figure(e, rep, dir, jobs);
    else if (kind == "bump-table")
        run_bump_table(e, rep, dir, jobs);
    else if (kind == "bump-figure")
        run_bump_figure(e, rep, dir, jobs);
    else if (kind == "inhom-modes")
        run_inhom_modes(e, rep, dir);
    else if (kind == "inhom-figure")
        run_inhom_figure(e, rep, dir, jobs);
    else
        throw numerical_error("registry entry " + id + " has unsupported kind " + kind);

    save_artifact(rep, dir, "report.txt", rep.to_text());
    log::info("reproduce " + id + ": " + (rep.passed ? "PASS" : "FAIL"));
    return rep;
}

}  // namespace wgt
