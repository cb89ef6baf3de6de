#include "wgt/config.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wgt/errors.hpp"
#include "wgt/log.hpp"

namespace wgt {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw validation_error("config: " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
    }
}

double get_number(const json& j, const std::string& path, const std::string& key, double fallback,
                  bool required = false) {
    if (!j.contains(key)) {
        if (required) fail(path + "." + key, "missing required field");
        return fallback;
    }
    if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key, int fallback,
            bool required = false) {
    if (!j.contains(key)) {
        if (required) fail(path + "." + key, "missing required field");
        return fallback;
    }
    if (!j.at(key).is_number_integer()) fail(path + "." + key, "expected an integer");
    return j.at(key).get<int>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) fail(path + "." + key, "expected a boolean");
    return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key,
                       const std::string& fallback, bool required = false) {
    if (!j.contains(key)) {
        if (required) fail(path + "." + key, "missing required field");
        return fallback;
    }
    if (!j.at(key).is_string()) fail(path + "." + key, "expected a string");
    return j.at(key).get<std::string>();
}

void check_profile_keys(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"x0", "dx", "n", "values"});
    for (const char* key : {"x0", "dx", "n", "values"})
        if (!j.contains(key)) fail(path + "." + key, "missing required field");
}

// Validates key sets per defect type, then delegates the value-level checks
// to the defect parser.
std::optional<DefectDescriptor> parse_defect(const json& j, const std::string& path) {
    require_object(j, path);
    const std::string type = get_string(j, path, "type", "", true);
    if (type == "none") {
        check_keys(j, path, {"type"});
        return std::nullopt;
    }
    if (type == "bend") {
        check_keys(j, path, {"type", "x_c", "r", "theta"});
    } else if (type == "bends") {
        check_keys(j, path, {"type", "bends"});
        if (!j.contains("bends") || !j.at("bends").is_array())
            fail(path + ".bends", "expected an array of bends");
        int idx = 0;
        for (const auto& e : j.at("bends")) {
            const std::string sub = path + ".bends[" + std::to_string(idx++) + "]";
            require_object(e, sub);
            check_keys(e, sub, {"x_c", "r", "theta"});
        }
    } else if (type == "bump") {
        check_keys(j, path, {"type", "h", "g"});
        if (j.contains("h")) check_profile_keys(j.at("h"), path + ".h");
        if (j.contains("g")) check_profile_keys(j.at("g"), path + ".g");
    } else if (type == "inhomogeneity") {
        check_keys(j, path, {"type", "x0", "dx", "nx", "ny", "values"});
    } else {
        fail(path + ".type", "unknown defect type \"" + type + "\"");
    }
    return defect_from_json_string(j.dump());
}

}  // namespace

void FrequencyGridRule::validate() const {
    if (!(min > 0.0)) throw validation_error("config: $.frequencies.min: must be > 0");
    if (!(max > min)) throw validation_error("config: $.frequencies.max: must exceed min");
    if (count < 1) throw validation_error("config: $.frequencies.count: must be >= 1");
    if (guard < 0.0) throw validation_error("config: $.frequencies.guard: must be >= 0");
}

std::vector<double> FrequencyGridRule::raw_points() const {
    validate();
    std::vector<double> k(static_cast<std::size_t>(count));
    if (count == 1) {
        k[0] = min;
        return k;
    }
    const double step = (max - min) / (count - 1);
    for (int i = 0; i < count; ++i) k[i] = min + i * step;
    return k;
}

std::vector<double> FrequencyGridRule::points() const {
    std::vector<double> out;
    for (double k : raw_points()) {
        if (!is_near_cutoff(k, guard)) out.push_back(k);
    }
    return out;
}

void DiscretizationRule::validate() const {
    if (!(dy > 0.0) || dy > 0.5) throw validation_error("config: $.discretization.dy: out of range");
    if (!(margin > 0.0)) throw validation_error("config: $.discretization.margin: must be > 0");
    if (!(measure_offset > 0.0) || measure_offset >= margin)
        throw validation_error(
            "config: $.discretization.measure_offset: must be in (0, margin)");
    if (!(dispersion_budget > 0.0))
        throw validation_error("config: $.discretization.dispersion_budget: must be > 0");
    if (!(pml_width > 0.0))
        throw validation_error("config: $.discretization.pml_width: must be > 0");
    if (!(dx > 0.0)) throw validation_error("config: $.discretization.dx: must be > 0");
}

void InversionSettings::validate() const {
    reg.validate();
    if (window) window->validate();
    if (modes < 0) throw validation_error("config: $.inversion.modes: must be >= 0");
    if (n_bends < 1) throw validation_error("config: $.inversion.n_bends: must be >= 1");
}

void ExperimentConfig::validate() const {
    if (id.empty()) throw validation_error("config: $.id: must be nonempty");
    for (char c : id) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
            throw validation_error("config: $.id: only alphanumerics, '-' and '_' allowed");
    }
    frequencies.validate();
    discretization.validate();
    inversion.validate();
    if (provenance != "fdfd" && provenance != "born-model")
        throw validation_error("config: $.provenance: must be \"fdfd\" or \"born-model\"");
    if (noise < 0.0) throw validation_error("config: $.noise: must be >= 0");
    if (output_dir.empty()) throw validation_error("config: $.output_dir: must be nonempty");
}

ExperimentConfig config_from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("config: invalid JSON: ") + e.what());
    }
    const std::string root = "$";
    require_object(j, root);
    check_keys(j, root,
               {"id", "defect", "frequencies", "discretization", "inversion", "output_dir",
                "seed", "provenance", "noise"});

    ExperimentConfig c;
    c.id = get_string(j, root, "id", "", true);

    if (!j.contains("defect")) fail(root + ".defect", "missing required field");
    c.defect = parse_defect(j.at("defect"), root + ".defect");

    if (j.contains("frequencies")) {
        const json& f = j.at("frequencies");
        const std::string p = root + ".frequencies";
        require_object(f, p);
        check_keys(f, p, {"min", "max", "count", "guard"});
        c.frequencies.min = get_number(f, p, "min", c.frequencies.min);
        c.frequencies.max = get_number(f, p, "max", c.frequencies.max);
        c.frequencies.count = get_int(f, p, "count", c.frequencies.count);
        c.frequencies.guard = get_number(f, p, "guard", c.frequencies.guard);
    }

    if (j.contains("discretization")) {
        const json& d = j.at("discretization");
        const std::string p = root + ".discretization";
        require_object(d, p);
        check_keys(d, p,
                   {"dy", "closure", "margin", "measure_offset", "dispersion_budget", "pml_width",
                    "dx", "auto_refine_dx"});
        c.discretization.dy = get_number(d, p, "dy", c.discretization.dy);
        const std::string closure = get_string(d, p, "closure", "modal");
        if (closure == "modal")
            c.discretization.closure = BoundaryClosure::modal;
        else if (closure == "pml")
            c.discretization.closure = BoundaryClosure::pml;
        else
            fail(p + ".closure", "must be \"modal\" or \"pml\"");
        c.discretization.margin = get_number(d, p, "margin", c.discretization.margin);
        c.discretization.measure_offset =
            get_number(d, p, "measure_offset", c.discretization.measure_offset);
        c.discretization.dispersion_budget =
            get_number(d, p, "dispersion_budget", c.discretization.dispersion_budget);
        c.discretization.pml_width = get_number(d, p, "pml_width", c.discretization.pml_width);
        c.discretization.dx = get_number(d, p, "dx", c.discretization.dx);
        c.discretization.auto_refine_dx =
            get_bool(d, p, "auto_refine_dx", c.discretization.auto_refine_dx);
    }

    if (j.contains("inversion")) {
        const json& v = j.at("inversion");
        const std::string p = root + ".inversion";
        require_object(v, p);
        check_keys(v, p,
                   {"lambda", "max_iter", "grad_tol", "positivity", "window", "modes", "n_bends"});
        c.inversion.reg.lambda = get_number(v, p, "lambda", c.inversion.reg.lambda);
        c.inversion.reg.max_iter = get_int(v, p, "max_iter", c.inversion.reg.max_iter);
        c.inversion.reg.grad_tol = get_number(v, p, "grad_tol", c.inversion.reg.grad_tol);
        c.inversion.reg.positivity = get_bool(v, p, "positivity", c.inversion.reg.positivity);
        if (v.contains("window")) {
            const json& w = v.at("window");
            const std::string pw = p + ".window";
            require_object(w, pw);
            check_keys(w, pw, {"x_min", "x_max", "points"});
            SupportWindow win;
            win.x_min = get_number(w, pw, "x_min", 0.0, true);
            win.x_max = get_number(w, pw, "x_max", 0.0, true);
            win.points = get_int(w, pw, "points", 0, true);
            c.inversion.window = win;
        }
        c.inversion.modes = get_int(v, p, "modes", c.inversion.modes);
        c.inversion.n_bends = get_int(v, p, "n_bends", c.inversion.n_bends);
    }

    c.output_dir = get_string(j, root, "output_dir", c.output_dir);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            fail(root + ".seed", "expected a nonnegative integer");
        const auto s = j.at("seed").get<long long>();
        if (s < 0) fail(root + ".seed", "expected a nonnegative integer");
        c.seed = static_cast<std::uint64_t>(s);
    }
    c.provenance = get_string(j, root, "provenance", c.provenance);
    c.noise = get_number(j, root, "noise", c.noise);

    c.validate();
    return c;
}

std::string to_json_string(const ExperimentConfig& c, int indent) {
    c.validate();
    json j;
    j["id"] = c.id;
    j["defect"] = c.defect ? json::parse(to_json_string(*c.defect)) : json{{"type", "none"}};
    j["frequencies"] = {{"min", c.frequencies.min},
                        {"max", c.frequencies.max},
                        {"count", c.frequencies.count},
                        {"guard", c.frequencies.guard}};
    j["discretization"] = {
        {"dy", c.discretization.dy},
        {"closure", c.discretization.closure == BoundaryClosure::modal ? "modal" : "pml"},
        {"margin", c.discretization.margin},
        {"measure_offset", c.discretization.measure_offset},
        {"dispersion_budget", c.discretization.dispersion_budget},
        {"pml_width", c.discretization.pml_width},
        {"dx", c.discretization.dx},
        {"auto_refine_dx", c.discretization.auto_refine_dx}};
    j["inversion"] = {{"lambda", c.inversion.reg.lambda},
                      {"max_iter", c.inversion.reg.max_iter},
                      {"grad_tol", c.inversion.reg.grad_tol},
                      {"positivity", c.inversion.reg.positivity},
                      {"modes", c.inversion.modes},
                      {"n_bends", c.inversion.n_bends}};
    if (c.inversion.window) {
        j["inversion"]["window"] = {{"x_min", c.inversion.window->x_min},
                                    {"x_max", c.inversion.window->x_max},
                                    {"points", c.inversion.window->points}};
    }
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["provenance"] = c.provenance;
    j["noise"] = c.noise;
    return j.dump(indent) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
    return config_from_json_string(read_text_file(path));
}

ForwardPlan plan_forward(const ExperimentConfig& c) {
    c.validate();
    if (!c.defect) throw validation_error("forward plan: empty-guide config has no defect support");
    const auto [lo, hi] = defect_support(*c.defect);

    ForwardPlan plan;
    plan.fdfd.dy = c.discretization.dy;
    plan.fdfd.dx = c.discretization.dx;
    plan.fdfd.auto_refine_dx = c.discretization.auto_refine_dx;
    plan.fdfd.dispersion_budget = c.discretization.dispersion_budget;
    plan.fdfd.cutoff_guard = c.frequencies.guard;
    plan.fdfd.closure = c.discretization.closure;
    const double x_left = lo - c.discretization.margin;
    const double x_right = hi + c.discretization.margin;
    if (c.discretization.closure == BoundaryClosure::pml) {
        plan.fdfd.pml = PmlProfile{x_left, x_right};
        plan.fdfd.x_min = x_left - c.discretization.pml_width;
        plan.fdfd.x_max = x_right + c.discretization.pml_width;
    } else {
        plan.fdfd.pml = PmlProfile{x_left, x_right};
        plan.fdfd.x_min = x_left;
        plan.fdfd.x_max = x_right;
    }
    // Snap dx so the (defect-dependent, generally irrational) window length
    // is an exact number of cells; keeps the step within one cell of the
    // configured value.
    const double length = plan.fdfd.x_max - plan.fdfd.x_min;
    const int n_cells = std::max(1, static_cast<int>(std::lround(length / plan.fdfd.dx)));
    plan.fdfd.dx = length / n_cells;
    plan.measure_x = lo - c.discretization.measure_offset;

    if (std::holds_alternative<BendParams>(*c.defect) ||
        std::holds_alternative<BendList>(*c.defect)) {
        plan.n_modes = 1;
    } else if (std::holds_alternative<BumpProfiles>(*c.defect)) {
        plan.n_modes = 2;
    } else {
        plan.n_modes = c.inversion.modes + 1;
    }
    return plan;
}

namespace {

FrequencyDataset born_model_dataset(const ExperimentConfig& c, const std::vector<double>& K) {
    FrequencyDataset out;
    out.provenance = "born-model";
    const DefectDescriptor& d = *c.defect;
    for (double k : K) {
        if (std::holds_alternative<BendParams>(d)) {
            const auto& b = std::get<BendParams>(d);
            out.records.push_back({0, k, 2.0 * k, bend_data_model(b, k)});
        } else if (std::holds_alternative<BendList>(d)) {
            cdouble v(0.0, 0.0);
            for (const auto& b : std::get<BendList>(d)) v += bend_data_model(b, k);
            out.records.push_back({0, k, 2.0 * k, v});
        } else if (std::holds_alternative<BumpProfiles>(d)) {
            const BumpData bd = bump_data_model(std::get<BumpProfiles>(d), k, c.frequencies.guard);
            out.records.push_back({0, k, 2.0 * k, bd.d0});
            if (bd.d1) {
                const double k1 = std::sqrt(k * k - kPi * kPi);
                out.records.push_back({1, k, k + k1, *bd.d1});
            }
        } else {
            const auto& m = std::get<InhomogeneityMap>(d);
            for (int n = 0; n <= c.inversion.modes; ++n) {
                if (k <= n * kPi + c.frequencies.guard) continue;
                const double kn = std::sqrt(k * k - n * n * kPi * kPi);
                out.records.push_back({n, k, k + kn, inhomogeneity_data_model(m, k, n,
                                                                              c.frequencies.guard)});
            }
        }
    }
    out.sort();
    return out;
}

void add_measurement_noise(FrequencyDataset& d, double level, std::uint64_t seed) {
    if (level <= 0.0 || d.records.empty()) return;
    double rms = 0.0;
    for (const auto& r : d.records) rms += std::norm(r.value);
    rms = std::sqrt(rms / d.records.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double s = level * rms / std::sqrt(2.0);
    for (auto& r : d.records) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        r.value += cdouble(s * re, s * im);
    }
}

}  // namespace

FrequencyDataset generate_dataset(const ExperimentConfig& c, int jobs) {
    c.validate();
    if (!c.defect) throw validation_error("generate: empty-guide config has no data model");
    if (jobs < 1) jobs = 1;
    const std::vector<double> K = c.frequencies.points();
    if (K.empty()) throw validation_error("generate: frequency grid is empty after guard bands");

    FrequencyDataset out;
    if (c.provenance == "born-model") {
        out = born_model_dataset(c, K);
    } else {
        const ForwardPlan plan = plan_forward(c);
        if (jobs == 1) {
            out = synthesize_measurements(*c.defect, K, plan.measure_x, plan.n_modes, plan.fdfd);
        } else {
            // Independent single-k tasks; merged result is sorted, so the
            // output does not depend on scheduling.
            std::vector<FrequencyDataset> parts(K.size());
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            const int n_threads = std::min<std::size_t>(jobs, K.size());
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
            for (int t = 0; t < n_threads; ++t) {
                pool.emplace_back([&, t] {
                    try {
                        for (;;) {
                            const std::size_t i = next.fetch_add(1);
                            if (i >= K.size()) break;
                            parts[i] = synthesize_measurements(*c.defect, {K[i]}, plan.measure_x,
                                                               plan.n_modes, plan.fdfd);
                        }
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (const auto& e : errors)
                if (e) std::rethrow_exception(e);
            for (auto& p : parts)
                out.records.insert(out.records.end(), p.records.begin(), p.records.end());
            out.provenance = "fdfd";
            out.sort();
        }
    }
    add_measurement_noise(out, c.noise, c.seed);
    out.validate();
    return out;
}

}  // namespace wgt
