#include "wgt/defects.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

#include <json.hpp>

#include "wgt/errors.hpp"

namespace wgt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Linear interpolation with clamping beyond the sampled range.
double interp(const LineFunction& f, double x) {
    if (f.samples.empty()) throw validation_error("interp: empty profile");
    if (x <= f.x0) return f.samples.front().real();
    const double xe = f.x_end();
    if (x >= xe) return f.samples.back().real();
    const double t = (x - f.x0) / f.dx;
    const auto i = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(i);
    if (i + 1 >= f.samples.size()) return f.samples.back().real();
    return f.samples[i].real() * (1.0 - frac) + f.samples[i + 1].real() * frac;
}

void validate_bend(const BendParams& p) {
    if (!(p.r > 0.0)) throw validation_error("bend: curvature radius r must be positive");
    if (!std::isfinite(p.x_c) || !std::isfinite(p.theta))
        throw validation_error("bend: non-finite parameter");
}

}  // namespace

double BendParams::arc_length() const { return std::abs(theta) * (r + 1.0); }

double InhomogeneityMap::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

LineFunction InhomogeneityMap::modal_component(int n) const {
    if (nx < 2 || ny < 2) throw validation_error("inhomogeneity map: grid too small");
    if (values.size() != static_cast<std::size_t>(nx) * ny)
        throw validation_error("inhomogeneity map: sample count does not match grid");
    LineFunction out = make_line(x0, dx, nx);
    const double h = dy();
    for (int i = 0; i < nx; ++i) {
        double acc = 0.0;
        for (int j = 0; j < ny; ++j) {
            const double w = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            acc += w * at(i, j) * eigenfunction(n, j * h);
        }
        out.samples[i] = acc * h;
    }
    return out;
}

std::string defect_type_name(const DefectDescriptor& d) {
    struct Visitor {
        std::string operator()(const BendParams&) const { return "bend"; }
        std::string operator()(const BendList&) const { return "bends"; }
        std::string operator()(const BumpProfiles&) const { return "bump"; }
        std::string operator()(const InhomogeneityMap&) const { return "inhomogeneity"; }
    };
    return std::visit(Visitor{}, d);
}

// ---------------------------------------------------------------------------
// Bend geometry
// ---------------------------------------------------------------------------

namespace {

// Map for theta > 0 (guide curving toward the bottom wall, curvature center
// at (x_c, -r)). The general map mirrors in y for theta < 0.
std::array<double, 2> bend_map_positive(const BendParams& p, double x, double y) {
    const double xe = p.x_c + p.theta * (p.r + 1.0);
    if (x <= p.x_c) return {x, y};
    const double rho = p.r + y;
    if (x <= xe) {
        const double alpha = (x - p.x_c) / (p.r + 1.0);
        return {p.x_c + rho * std::sin(alpha), -p.r + rho * std::cos(alpha)};
    }
    const double s = std::sin(p.theta);
    const double c = std::cos(p.theta);
    return {p.x_c + rho * s + (x - xe) * c, -p.r + rho * c - (x - xe) * s};
}

}  // namespace

std::array<double, 2> bend_map(const BendParams& p, double x, double y) {
    validate_bend(p);
    if (y < 0.0 || y > 1.0) throw validation_error("bend_map: y outside [0,1]");
    if (p.theta >= 0.0) return bend_map_positive(p, x, y);
    BendParams q{p.x_c, p.r, -p.theta};
    const auto m = bend_map_positive(q, x, 1.0 - y);
    return {m[0], 1.0 - m[1]};
}

MetricData bend_metric(const BendParams& p, double x, double y) {
    validate_bend(p);
    MetricData out;
    if (p.theta == 0.0) return out;
    if (x < p.x_c || x > p.x_end()) return out;
    const double yy = p.theta > 0.0 ? y : 1.0 - y;
    const double rho = p.r + yy;
    const double R = p.r + 1.0;
    out.S[0][0] = R / rho;
    out.S[1][1] = rho / R;
    out.tau = rho / R;
    // Wall arc-length factors: the wall at distance r from the curvature
    // center is shortened by r/(r+1).
    if (p.theta > 0.0) {
        out.t1 = 1.0;
        out.t2 = p.r / R;
    } else {
        out.t1 = p.r / R;
        out.t2 = 1.0;
    }
    return out;
}

MetricData bends_metric(const BendList& list, double x, double y) {
    for (std::size_t i = 0; i + 1 < list.size(); ++i) {
        if (list[i + 1].x_c < list[i].x_end())
            throw validation_error("bends: arc sections must be disjoint and ordered");
    }
    for (const auto& p : list) {
        if (x >= p.x_c && x <= p.x_end() && p.theta != 0.0) return bend_metric(p, x, y);
    }
    return MetricData{};
}

LineFunction RectangleProfile::sampled(double x0, double dx, int n) const {
    LineFunction out = make_line(x0, dx, n);
    for (int i = 0; i < n; ++i) {
        const double x = out.x(i);
        if (x >= x_start && x <= x_end) out.samples[i] = amplitude;
    }
    return out;
}

double bend_amplitude(double r) {
    if (!(r > 0.0)) throw validation_error("bend_amplitude: r must be positive");
    const double R = r + 1.0;
    return 1.0 - 0.5 / R - R * std::log(R / r);
}

double bend_transverse_profile(double r, double y) {
    return (y - 1.0) * (1.0 / (r + y) + 1.0 / (r + 1.0));
}

RectangleProfile bend_source_profile(const BendParams& p) {
    validate_bend(p);
    RectangleProfile out;
    out.x_start = p.x_c;
    out.x_end = p.x_end();
    out.amplitude = bend_amplitude(p.r);
    return out;
}

cdouble bend_data_model(const BendParams& p, double k) {
    validate_bend(p);
    if (!(k > 0.0)) throw validation_error("bend_data_model: k must be positive");
    if (p.theta == 0.0) return {0.0, 0.0};
    const RectangleProfile f = bend_source_profile(p);
    // 2 k^2 Gamma(amp * 1_[a,b])(2k) = amp (e^{2ikb} - e^{2ika}) / 4.
    const cdouble eb = std::polar(1.0, 2.0 * k * f.x_end);
    const cdouble ea = std::polar(1.0, 2.0 * k * f.x_start);
    return f.amplitude * (eb - ea) / 4.0;
}

cdouble bend_fit_model(double p1, double p2, double p3, double omega) {
    if (!(omega > 0.0)) throw validation_error("bend_fit_model: omega must be positive");
    const cdouble phase = std::polar(1.0, omega * (2.0 * p2 + p3) / 2.0);
    return cdouble(0.0, -p1 / omega) * phase * std::sin(p3 * omega / 2.0);
}

BendParams bend_params_from_profile(double p1, double p2, double p3) {
    if (!(p1 > 0.0)) throw validation_error("bend fit: rectangle depth p1 must be positive");
    if (!(p3 > 0.0)) throw validation_error("bend fit: rectangle width p3 must be positive");
    double lo = 1e-3, hi = 1e9;
    const double target = -p1;
    if (bend_amplitude(lo) > target || bend_amplitude(hi) < target)
        throw validation_error("bend fit: amplitude outside representable range");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bend_amplitude(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    BendParams out;
    out.r = 0.5 * (lo + hi);
    out.x_c = p2;
    out.theta = p3 / (out.r + 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Bump geometry
// ---------------------------------------------------------------------------

LineFunction profile_derivative(const LineFunction& f) {
    const int n = static_cast<int>(f.samples.size());
    if (n < 2) throw validation_error("profile_derivative: need at least two samples");
    LineFunction out = make_line(f.x0, f.dx, n);
    for (int i = 0; i < n; ++i) {
        if (i == 0)
            out.samples[i] = (f.samples[1] - f.samples[0]) / f.dx;
        else if (i == n - 1)
            out.samples[i] = (f.samples[n - 1] - f.samples[n - 2]) / f.dx;
        else
            out.samples[i] = (f.samples[i + 1] - f.samples[i - 1]) / (2.0 * f.dx);
    }
    return out;
}

BumpEvaluator::BumpEvaluator(const BumpProfiles& b)
    : h_(b.h), g_(b.g), dh_(profile_derivative(b.h)), dg_(profile_derivative(b.g)) {
    if (b.h.samples.size() != b.g.samples.size() || b.h.x0 != b.g.x0 || b.h.dx != b.g.dx)
        throw validation_error("bump profiles: h and g must share one grid");
    for (std::size_t i = 0; i < b.h.samples.size(); ++i) {
        const double w = 1.0 + b.h.samples[i].real() - b.g.samples[i].real();
        if (!(w > 0.0)) throw validation_error("bump profiles: channel width must stay positive");
    }
}

double BumpEvaluator::h(double x) const { return interp(h_, x); }
double BumpEvaluator::g(double x) const { return interp(g_, x); }
double BumpEvaluator::dh(double x) const { return interp(dh_, x); }
double BumpEvaluator::dg(double x) const { return interp(dg_, x); }

MetricData BumpEvaluator::at(double x, double y) const {
    MetricData out;
    const double hv = h(x), gv = g(x), hp = dh(x), gp = dg(x);
    const double a = 1.0 + hv - gv;
    const double b = -((hp - gp) * y + gp);
    out.S[0][0] = a;
    out.S[0][1] = b;
    out.S[1][0] = b;
    out.S[1][1] = (b * b + 1.0) / a;
    out.tau = a;
    out.t1 = std::sqrt(1.0 + hp * hp);
    out.t2 = std::sqrt(1.0 + gp * gp);
    return out;
}

MetricData bump_metric(const BumpProfiles& b, double x, double y) {
    return BumpEvaluator(b).at(x, y);
}

BumpData bump_data_model(const BumpProfiles& b, double k, double cutoff_guard) {
    if (!(k > 0.0)) throw validation_error("bump_data_model: k must be positive");
    BumpEvaluator ev(b);
    const int n = static_cast<int>(b.h.samples.size());
    LineFunction diff = make_line(b.h.x0, b.h.dx, n);
    LineFunction sum = make_line(b.h.x0, b.h.dx, n);
    for (int i = 0; i < n; ++i) {
        const double x = diff.x(i);
        diff.samples[i] = ev.dh(x) - ev.dg(x);
        sum.samples[i] = ev.dh(x) + ev.dg(x);
    }
    BumpData out;
    out.d0 = cdouble(0.0, 2.0 * k) * gamma_point(diff, 2.0 * k);
    if (k > kPi) {
        if (k - kPi < cutoff_guard)
            throw numerical_error("bump_data_model: k inside the cutoff guard band of mode 1");
        const cdouble k1 = longitudinal_wavenumber(k, 1).value;
        const cdouble pref =
            -std::sqrt(2.0) * cdouble(0.0, k) * (k1 + k) / k1;
        out.d1 = pref * gamma_point(sum, k + k1.real());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inhomogeneity data
// ---------------------------------------------------------------------------

cdouble inhomogeneity_data_model(const InhomogeneityMap& m, double k, int n,
                                 double cutoff_guard) {
    if (!(k > 0.0)) throw validation_error("inhomogeneity_data_model: k must be positive");
    if (n < 0) throw validation_error("inhomogeneity_data_model: mode index must be >= 0");
    if (!(k > n * kPi + cutoff_guard))
        throw numerical_error(
            "inhomogeneity_data_model: mode not safely propagative at this frequency");
    const double kn = longitudinal_wavenumber(k, n).value.real();
    const LineFunction hn = m.modal_component(n);
    return ((k + kn) * k * k / kn) * gamma_point(hn, k + kn);
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json line_to_json(const LineFunction& f) {
    json out;
    out["x0"] = f.x0;
    out["dx"] = f.dx;
    out["n"] = f.samples.size();
    std::vector<double> vals;
    vals.reserve(f.samples.size());
    for (const auto& v : f.samples) vals.push_back(v.real());
    out["values"] = vals;
    return out;
}

LineFunction line_from_json(const json& j) {
    LineFunction f = make_line(j.at("x0").get<double>(), j.at("dx").get<double>(),
                               j.at("n").get<int>());
    const auto vals = j.at("values").get<std::vector<double>>();
    if (vals.size() != f.samples.size())
        throw validation_error("profile: value count does not match declared size");
    for (std::size_t i = 0; i < vals.size(); ++i) f.samples[i] = vals[i];
    return f;
}

json bend_to_json(const BendParams& p) {
    return json{{"type", "bend"}, {"x_c", p.x_c}, {"r", p.r}, {"theta", p.theta}};
}

BendParams bend_from_json(const json& j) {
    BendParams p;
    p.x_c = j.at("x_c").get<double>();
    p.r = j.at("r").get<double>();
    p.theta = j.at("theta").get<double>();
    validate_bend(p);
    return p;
}

}  // namespace

std::string to_json_string(const DefectDescriptor& d, int indent) {
    json j;
    if (const auto* p = std::get_if<BendParams>(&d)) {
        j = bend_to_json(*p);
    } else if (const auto* list = std::get_if<BendList>(&d)) {
        j["type"] = "bends";
        j["bends"] = json::array();
        for (const auto& p : *list) {
            json e = bend_to_json(p);
            e.erase("type");
            j["bends"].push_back(e);
        }
    } else if (const auto* b = std::get_if<BumpProfiles>(&d)) {
        j["type"] = "bump";
        j["h"] = line_to_json(b->h);
        j["g"] = line_to_json(b->g);
    } else if (const auto* m = std::get_if<InhomogeneityMap>(&d)) {
        j["type"] = "inhomogeneity";
        j["x0"] = m->x0;
        j["dx"] = m->dx;
        j["nx"] = m->nx;
        j["ny"] = m->ny;
        j["values"] = m->values;
    }
    return j.dump(indent);
}

DefectDescriptor defect_from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("defect descriptor: invalid JSON: ") + e.what());
    }
    try {
        const auto type = j.at("type").get<std::string>();
        if (type == "bend") return bend_from_json(j);
        if (type == "bends") {
            BendList list;
            for (const auto& e : j.at("bends")) list.push_back(bend_from_json(e));
            return list;
        }
        if (type == "bump") {
            BumpProfiles b;
            b.h = line_from_json(j.at("h"));
            b.g = line_from_json(j.at("g"));
            (void)BumpEvaluator{b};  // validates grids and channel width
            return b;
        }
        if (type == "inhomogeneity") {
            InhomogeneityMap m;
            m.x0 = j.at("x0").get<double>();
            m.dx = j.at("dx").get<double>();
            m.nx = j.at("nx").get<int>();
            m.ny = j.at("ny").get<int>();
            m.values = j.at("values").get<std::vector<double>>();
            if (m.values.size() != static_cast<std::size_t>(m.nx) * m.ny)
                throw validation_error("inhomogeneity: value count does not match grid");
            return m;
        }
        throw validation_error("defect descriptor: unknown type \"" + type + "\"");
    } catch (const json::exception& e) {
        throw validation_error(std::string("defect descriptor: missing or ill-typed field: ") +
                               e.what());
    }
}

}  // namespace wgt
