// Command-line front end: dataset generation, inversion, conditioning
// sweeps, bundled experiment reproduction, and input validation.
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wgt/conditioning.hpp"
#include "wgt/config.hpp"
#include "wgt/dataset.hpp"
#include "wgt/defects.hpp"
#include "wgt/errors.hpp"
#include "wgt/inversion.hpp"
#include "wgt/line.hpp"
#include "wgt/log.hpp"
#include "wgt/recover.hpp"
#include "wgt/registry.hpp"
#include "wgt/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitAcceptance = 4;

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec)
        throw wgt::validation_error("cannot create output directory " + p.string() + ": " +
                                    ec.message());
}

bool want(const std::string& format, const char* which) {
    return format.empty() || format == which;
}

double dataset_rms(const wgt::FrequencyDataset& d) {
    if (d.records.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : d.records) s += std::norm(r.value);
    return std::sqrt(s / static_cast<double>(d.records.size()));
}

json line_to_json(const wgt::LineFunction& f) {
    json j;
    j["x0"] = f.x0;
    j["dx"] = f.dx;
    json re = json::array(), im = json::array();
    for (const auto& v : f.samples) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

std::string line_to_csv(const wgt::LineFunction& f) {
    std::ostringstream out;
    out << "x,re,im\n";
    char buf[96];
    for (int i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", f.x(i),
                      f.samples[static_cast<std::size_t>(i)].real(),
                      f.samples[static_cast<std::size_t>(i)].imag());
        out << buf;
    }
    return out.str();
}

// Linear interpolation with zero extension outside the sampled window.
double line_at(const wgt::LineFunction& f, double x) {
    const double t = (x - f.x0) / f.dx;
    if (t < 0.0 || t > f.size() - 1) return 0.0;
    const int i = std::min(static_cast<int>(t), f.size() - 2);
    const double a = t - i;
    return (1.0 - a) * f.samples[static_cast<std::size_t>(i)].real() +
           a * f.samples[static_cast<std::size_t>(i) + 1].real();
}

double rel_l2_vs(const wgt::LineFunction& rec, const wgt::LineFunction& truth) {
    double nume = 0.0, deno = 0.0;
    for (int i = 0; i < rec.size(); ++i) {
        const double t = line_at(truth, rec.x(i));
        const double d = rec.samples[static_cast<std::size_t>(i)].real() - t;
        nume += d * d;
        deno += t * t;
    }
    return deno > 0.0 ? std::sqrt(nume / deno) : 0.0;
}

// Bilinear interpolation of an index map, zero outside its x-window.
double map_at(const wgt::InhomogeneityMap& m, double x, double y) {
    const double tx = (x - m.x0) / m.dx;
    if (tx < 0.0 || tx > m.nx - 1) return 0.0;
    const double ty = std::clamp(y / m.dy(), 0.0, static_cast<double>(m.ny - 1));
    const int i = std::min(static_cast<int>(tx), m.nx - 2);
    const int j = std::min(static_cast<int>(ty), m.ny - 2);
    const double a = tx - i, b = ty - j;
    return (1 - a) * (1 - b) * m.at(i, j) + a * (1 - b) * m.at(i + 1, j) +
           (1 - a) * b * m.at(i, j + 1) + a * b * m.at(i + 1, j + 1);
}

wgt::PlotSeries series_of(const wgt::LineFunction& f, const std::string& label,
                          const std::string& color, bool dashed = false) {
    wgt::PlotSeries s;
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

// ---------------------------------------------------------------------------
// forward
// ---------------------------------------------------------------------------

int cmd_forward(const std::string& config_path, const std::string& out_flag,
                std::optional<std::uint64_t> seed, const std::string& format, int jobs) {
    wgt::ExperimentConfig c = wgt::load_config(config_path);
    if (seed) c.seed = *seed;
    const fs::path dir = fs::path(out_flag.empty() ? c.output_dir : out_flag) / c.id;
    const wgt::FrequencyDataset d = wgt::generate_dataset(c, jobs);
    ensure_dir(dir);
    if (want(format, "json")) wgt::save_dataset(d, (dir / "data.json").string());
    if (want(format, "csv")) wgt::save_dataset(d, (dir / "data.csv").string());
    std::cout << "forward: wrote " << d.records.size() << " records (provenance '" << d.provenance
              << "') under " << dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// invert
// ---------------------------------------------------------------------------

void require_modes_subset(const wgt::FrequencyDataset& d, int max_mode, const char* kind) {
    for (int m : d.modes())
        if (m > max_mode)
            throw wgt::validation_error(std::string("invert: dataset carries mode ") +
                                        std::to_string(m) + " but " + kind +
                                        " recovery uses modes up to " + std::to_string(max_mode));
    if (d.select_mode(0).records.empty())
        throw wgt::validation_error("invert: dataset has no first-mode records");
}

int invert_bend(const wgt::ExperimentConfig& c, const wgt::FrequencyDataset& d,
                const fs::path& dir, const std::string& format, bool near_zero) {
    require_modes_subset(d, 0, "bend");
    wgt::BendFitOptions opts;
    opts.n_bends = std::holds_alternative<wgt::BendList>(*c.defect)
                       ? static_cast<int>(std::get<wgt::BendList>(*c.defect).size())
                       : c.inversion.n_bends;
    const wgt::BendFitResult fit = wgt::recover_bend(d, opts);

    json res;
    res["type"] = "bend";
    res["near_zero_data"] = near_zero;
    res["low_confidence"] = fit.low_confidence;
    res["relative_residual"] = fit.relative_residual;
    json arr = json::array();
    for (const auto& b : fit.bends)
        arr.push_back({{"x_c", b.x_c}, {"r", b.r}, {"theta", b.theta}});
    res["bends"] = std::move(arr);
    if (want(format, "json"))
        wgt::write_text_file((dir / "result.json").string(), res.dump(2) + "\n");
    if (want(format, "csv")) {
        std::ostringstream csv;
        csv << "index,x_c,r,theta\n";
        char buf[96];
        for (std::size_t i = 0; i < fit.bends.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i + 1, fit.bends[i].x_c,
                          fit.bends[i].r, fit.bends[i].theta);
            csv << buf;
        }
        wgt::write_text_file((dir / "result.csv").string(), csv.str());
    }

    // recovered equivalent sources, plus truth overlay and error table
    std::vector<wgt::RectangleProfile> fitted, truths;
    for (const auto& b : fit.bends) fitted.push_back(wgt::bend_source_profile(b));
    wgt::BendList true_list;
    if (std::holds_alternative<wgt::BendParams>(*c.defect))
        true_list.push_back(std::get<wgt::BendParams>(*c.defect));
    else
        true_list = std::get<wgt::BendList>(*c.defect);
    for (const auto& b : true_list) truths.push_back(wgt::bend_source_profile(b));
    double x0 = 1e300, x1 = -1e300;
    for (const auto& rp : fitted) {
        x0 = std::min(x0, rp.x_start);
        x1 = std::max(x1, rp.x_end);
    }
    for (const auto& rp : truths) {
        x0 = std::min(x0, rp.x_start);
        x1 = std::max(x1, rp.x_end);
    }
    x0 -= 0.5;
    x1 += 0.5;
    const int n = 801;
    wgt::LineFunction fit_prof = wgt::make_line(x0, (x1 - x0) / (n - 1), n);
    wgt::LineFunction true_prof = wgt::make_line(x0, (x1 - x0) / (n - 1), n);
    for (const auto& rp : fitted) {
        const wgt::LineFunction s = rp.sampled(x0, (x1 - x0) / (n - 1), n);
        for (int i = 0; i < n; ++i)
            fit_prof.samples[static_cast<std::size_t>(i)] += s.samples[static_cast<std::size_t>(i)];
    }
    for (const auto& rp : truths) {
        const wgt::LineFunction s = rp.sampled(x0, (x1 - x0) / (n - 1), n);
        for (int i = 0; i < n; ++i)
            true_prof.samples[static_cast<std::size_t>(i)] +=
                s.samples[static_cast<std::size_t>(i)];
    }
    wgt::PlotSpec plot;
    plot.title = "equivalent bend source, true vs recovered";
    plot.x_label = "x";
    plot.y_label = "source amplitude";
    plot.series.push_back(series_of(true_prof, "true", "#000000", true));
    plot.series.push_back(series_of(fit_prof, "recovered", "#d62728"));
    wgt::write_text_file((dir / "result.svg").string(), wgt::render_line_plot(plot));

    if (true_list.size() == fit.bends.size()) {
        wgt::ResultTable table;
        table.caption = "relative parameter errors against the configured defect";
        table.columns = {"bend", "err_x_c", "err_r", "err_theta_magnitude"};
        for (std::size_t i = 0; i < true_list.size(); ++i) {
            const auto& t = true_list[i];
            const auto& g = fit.bends[i];
            table.rows.push_back({static_cast<double>(i + 1),
                                  std::abs(g.x_c - t.x_c) / std::abs(t.x_c),
                                  std::abs(g.r - t.r) / std::abs(t.r),
                                  std::abs(std::abs(g.theta) - std::abs(t.theta)) /
                                      std::abs(t.theta)});
        }
        wgt::write_text_file((dir / "errors.csv").string(), table.to_csv());
    }
    std::cout << "invert: fitted " << fit.bends.size() << " bend(s), relative residual "
              << fit.relative_residual << (fit.low_confidence ? " (low confidence)" : "") << "\n";
    return 0;
}

int invert_bump(const wgt::ExperimentConfig& c, const wgt::FrequencyDataset& d,
                const fs::path& dir, const std::string& format, bool near_zero) {
    if (!c.inversion.window)
        throw wgt::validation_error(
            "config: $.inversion.window: required for wall-profile recovery");
    require_modes_subset(d, 1, "wall-profile");
    const wgt::BumpRecovery rec = wgt::recover_bump(d, *c.inversion.window, c.inversion.reg);

    json res;
    res["type"] = "bump";
    res["near_zero_data"] = near_zero;
    res["partial"] = rec.partial;
    res["iterations"] = {{"mode0", rec.mode0.iterations}, {"mode1", rec.mode1.iterations}};
    res["converged"] = {{"mode0", rec.mode0.converged}, {"mode1", rec.mode1.converged}};
    res["h_app"] = line_to_json(rec.h_app);
    res["g_app"] = line_to_json(rec.g_app);
    if (want(format, "json"))
        wgt::write_text_file((dir / "result.json").string(), res.dump(2) + "\n");
    if (want(format, "csv")) {
        wgt::write_text_file((dir / "h_app.csv").string(), line_to_csv(rec.h_app));
        wgt::write_text_file((dir / "g_app.csv").string(), line_to_csv(rec.g_app));
    }

    wgt::PlotSpec plot;
    plot.title = rec.partial ? "recovered wall offset difference h - g"
                             : "recovered wall profiles";
    plot.x_label = "x";
    plot.y_label = "wall offset";
    const bool truth_known = std::holds_alternative<wgt::BumpProfiles>(*c.defect);
    if (truth_known) {
        const auto& bp = std::get<wgt::BumpProfiles>(*c.defect);
        plot.series.push_back(series_of(bp.h, "h true", "#1f77b4", true));
        plot.series.push_back(series_of(bp.g, "g true", "#d62728", true));
        wgt::ResultTable table;
        table.caption = "relative profile errors against the configured defect";
        table.columns = {"profile", "relative_error"};
        table.rows.push_back({0.0, rel_l2_vs(rec.h_app, bp.h)});
        table.rows.push_back({1.0, rel_l2_vs(rec.g_app, bp.g)});
        wgt::write_text_file((dir / "errors.csv").string(), table.to_csv());
    }
    plot.series.push_back(series_of(rec.h_app, rec.partial ? "h - g recovered" : "h recovered",
                                    "#1f77b4"));
    if (!rec.partial) plot.series.push_back(series_of(rec.g_app, "g recovered", "#d62728"));
    wgt::write_text_file((dir / "result.svg").string(), wgt::render_line_plot(plot));

    std::cout << "invert: recovered wall profiles"
              << (rec.partial ? " (partial: single-mode data, h - g only)" : "")
              << (near_zero ? " [near-zero data]" : "") << "\n";
    return 0;
}

int invert_inhomogeneity(const wgt::ExperimentConfig& c, const wgt::FrequencyDataset& d,
                         const fs::path& dir, const std::string& format, bool near_zero) {
    if (!c.inversion.window)
        throw wgt::validation_error("config: $.inversion.window: required for index-map recovery");
    require_modes_subset(d, c.inversion.modes, "index-map");
    const auto& truth = std::get<wgt::InhomogeneityMap>(*c.defect);
    const int ny_out = truth.ny >= 2 ? truth.ny : 101;
    const wgt::InhomogeneityRecovery rec =
        wgt::recover_inhomogeneity(d, *c.inversion.window, c.inversion.modes, c.inversion.reg,
                                   ny_out);

    json res;
    res["type"] = "inhomogeneity";
    res["near_zero_data"] = near_zero;
    res["iterations"] = rec.descent.iterations;
    res["converged"] = rec.descent.converged;
    res["skipped_modes"] = rec.skipped_modes;
    res["map"] = json::parse(wgt::to_json_string(wgt::DefectDescriptor{rec.map}));
    if (want(format, "json"))
        wgt::write_text_file((dir / "result.json").string(), res.dump(2) + "\n");
    if (want(format, "csv")) {
        std::ostringstream csv;
        csv << "x,y,value\n";
        char buf[96];
        for (int i = 0; i < rec.map.nx; ++i)
            for (int j = 0; j < rec.map.ny; ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", rec.map.x0 + i * rec.map.dx,
                              j * rec.map.dy(), rec.map.at(i, j));
                csv << buf;
            }
        wgt::write_text_file((dir / "result.csv").string(), csv.str());
    }

    wgt::HeatmapSpec hm;
    hm.title = "recovered index perturbation";
    hm.x0 = rec.map.x0;
    hm.x1 = rec.map.x_end();
    hm.y0 = 0.0;
    hm.y1 = 1.0;
    hm.nx = rec.map.nx;
    hm.ny = rec.map.ny;
    hm.values = rec.map.values;
    wgt::write_text_file((dir / "result.svg").string(), wgt::render_heatmap(hm));

    if (truth.nx > 0) {
        double nume = 0.0, deno = 0.0;
        for (int i = 0; i < rec.map.nx; ++i)
            for (int j = 0; j < rec.map.ny; ++j) {
                const double t =
                    map_at(truth, rec.map.x0 + i * rec.map.dx, j * rec.map.dy());
                const double dv = rec.map.at(i, j) - t;
                nume += dv * dv;
                deno += t * t;
            }
        if (deno > 0.0) {
            wgt::ResultTable table;
            table.caption = "relative map error against the configured defect";
            table.columns = {"relative_error"};
            table.rows.push_back({std::sqrt(nume / deno)});
            wgt::write_text_file((dir / "errors.csv").string(), table.to_csv());
        }
    }
    std::cout << "invert: recovered index map on " << rec.map.nx << " x " << rec.map.ny
              << " grid" << (near_zero ? " [near-zero data]" : "") << "\n";
    return 0;
}

int cmd_invert(const std::string& data_path, const std::string& config_path,
               const std::string& out_flag, const std::string& format) {
    wgt::ExperimentConfig c = wgt::load_config(config_path);
    const wgt::FrequencyDataset d = wgt::load_dataset(data_path);
    if (!c.defect)
        throw wgt::validation_error(
            "invert: config declares no defect; a descriptor is required to select the "
            "recovery pipeline");
    const fs::path dir = fs::path(out_flag.empty() ? c.output_dir : out_flag) / c.id;
    ensure_dir(dir);
    const bool near_zero = dataset_rms(d) < 1e-14;
    if (near_zero) wgt::log::warn("invert: dataset is numerically zero");
    if (std::holds_alternative<wgt::BendParams>(*c.defect) ||
        std::holds_alternative<wgt::BendList>(*c.defect))
        return invert_bend(c, d, dir, format, near_zero);
    if (std::holds_alternative<wgt::BumpProfiles>(*c.defect))
        return invert_bump(c, d, dir, format, near_zero);
    return invert_inhomogeneity(c, d, dir, format, near_zero);
}

// ---------------------------------------------------------------------------
// condition-study
// ---------------------------------------------------------------------------

int cmd_condition_study(const std::string& out_flag, std::vector<double> rs,
                        std::vector<double> gaps) {
    const fs::path dir = fs::path(out_flag.empty() ? "out" : out_flag) / "condition-study";
    ensure_dir(dir);
    std::vector<double> omega0s;
    omega0s.reserve(gaps.size());
    for (double g : gaps) omega0s.push_back(g * kPi);
    const auto entries = wgt::conditioning_study(rs, omega0s);

    wgt::ResultTable table;
    table.caption = "condition number of the band-restricted normal matrix";
    table.columns = {"r", "omega0_over_pi", "cond", "numerically_singular"};
    for (const auto& en : entries)
        table.rows.push_back(
            {en.r, en.omega0 / kPi, en.cond, en.numerically_singular ? 1.0 : 0.0});
    wgt::write_text_file((dir / "condition_numbers.csv").string(), table.to_csv());

    wgt::PlotSpec plot;
    plot.title = "conditioning of band-restricted recovery";
    plot.x_label = "support radius r";
    plot.y_label = "condition number";
    plot.log_y = true;
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        wgt::PlotSeries s;
        s.color = kColors[j % 6];
        std::ostringstream lbl;
        lbl << "omega0 = " << gaps[j] << " pi";
        s.label = lbl.str();
        for (std::size_t i = 0; i < rs.size(); ++i) {
            s.x.push_back(rs[i]);
            s.y.push_back(entries[i * gaps.size() + j].cond);
        }
        plot.series.push_back(s);
    }
    wgt::write_text_file((dir / "condition_numbers.svg").string(), wgt::render_line_plot(plot));
    std::cout << "condition-study: wrote " << entries.size() << " entries under " << dir.string()
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// reproduce / validate
// ---------------------------------------------------------------------------

int cmd_reproduce(const std::string& id, const std::string& out_flag, int jobs) {
    const wgt::ReproduceReport rep =
        wgt::run_reproduction(id, out_flag.empty() ? "out" : out_flag, jobs);
    std::cout << rep.to_text();
    return rep.passed ? 0 : kExitAcceptance;
}

int cmd_validate(const std::string& config_path, const std::string& data_path) {
    if (config_path.empty() && data_path.empty())
        throw wgt::validation_error("validate: provide --config and/or --data");
    if (!config_path.empty()) {
        const wgt::ExperimentConfig c = wgt::load_config(config_path);
        std::cout << "config ok: id '" << c.id << "', defect "
                  << (c.defect ? wgt::defect_type_name(*c.defect) : std::string("none")) << "\n";
    }
    if (!data_path.empty()) {
        const wgt::FrequencyDataset d = wgt::load_dataset(data_path);
        std::cout << "dataset ok: " << d.records.size() << " records, provenance '"
                  << d.provenance << "'\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"waveguide defect tomography toolkit"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_dir, format, repro_id;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::vector<double> rs = {0.02, 0.06, 0.14, 0.22, 0.3, 0.4, 0.5, 0.62, 0.74, 0.86, 1.0};
    std::vector<double> gaps = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};

    auto* fwd = app.add_subcommand("forward", "Generate a scattering dataset from a config");
    fwd->add_option("--config", config_path, "Experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    fwd->add_option("--out", out_dir, "Output directory (default: config output_dir)");
    auto* seed_opt = fwd->add_option("--seed", seed, "Override the config RNG seed");
    fwd->add_option("--format", format, "Restrict outputs to one format")
        ->check(CLI::IsMember({"json", "csv"}));
    fwd->add_option("--jobs", jobs, "Parallel forward solves")->check(CLI::PositiveNumber);

    auto* inv = app.add_subcommand("invert", "Recover a defect from a dataset");
    inv->add_option("data", data_path, "Dataset file (.json or .csv)")
        ->required()
        ->check(CLI::ExistingFile);
    inv->add_option("--config", config_path, "Experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    inv->add_option("--out", out_dir, "Output directory (default: config output_dir)");
    inv->add_option("--format", format, "Restrict outputs to one format")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* cond = app.add_subcommand("condition-study",
                                    "Sweep the conditioning of band-restricted recovery");
    cond->add_option("--out", out_dir, "Output directory (default: out)");
    cond->add_option("--r", rs, "Support radii")->delimiter(',');
    cond->add_option("--omega0-over-pi", gaps, "Band gaps as multiples of pi")->delimiter(',');

    auto* rep = app.add_subcommand("reproduce", "Run a bundled experiment end to end");
    std::ostringstream id_help;
    id_help << "Experiment id (one of:";
    for (const auto& known : wgt::registry_ids()) id_help << ' ' << known;
    id_help << ')';
    rep->add_option("id", repro_id, id_help.str())->required();
    rep->add_option("--out", out_dir, "Output directory (default: out)");
    rep->add_option("--jobs", jobs, "Parallel forward solves")->check(CLI::PositiveNumber);

    auto* val = app.add_subcommand("validate", "Validate a config and/or dataset file");
    val->add_option("--config", config_path, "Experiment config JSON")->check(CLI::ExistingFile);
    val->add_option("--data", data_path, "Dataset file")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*fwd)
            return cmd_forward(config_path, out_dir,
                               seed_opt->count() ? std::optional<std::uint64_t>(seed)
                                                 : std::nullopt,
                               format, jobs);
        if (*inv) return cmd_invert(data_path, config_path, out_dir, format);
        if (*cond) return cmd_condition_study(out_dir, rs, gaps);
        if (*rep) return cmd_reproduce(repro_id, out_dir, jobs);
        if (*val) return cmd_validate(config_path, data_path);
    } catch (const wgt::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const wgt::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
