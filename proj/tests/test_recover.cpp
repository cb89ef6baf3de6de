#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "wgt/config.hpp"
#include "wgt/dataset.hpp"
#include "wgt/defects.hpp"
#include "wgt/errors.hpp"
#include "wgt/recover.hpp"

using namespace wgt;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> standard_band() {
    FrequencyGridRule rule;
    rule.min = 0.3;
    rule.max = 40.0;
    rule.count = 100;
    rule.guard = 0.25;
    return rule.points();
}

FrequencyDataset bend_model_dataset(const BendParams& p) {
    FrequencyDataset ds;
    ds.provenance = "born-model";
    for (double k : standard_band())
        ds.records.push_back({0, k, 2.0 * k, bend_data_model(p, k)});
    ds.sort();
    return ds;
}

BumpProfiles wall_pair(double amp_h, double amp_g) {
    BumpProfiles b;
    b.h = make_line(2.5, 0.0025, 1201);  // [2.5, 5.5]
    b.g = make_line(2.5, 0.0025, 1201);
    for (int i = 0; i < b.h.size(); ++i) {
        const double x = b.h.x(i);
        if (x > 3.0 && x < 5.0) b.h.samples[i] = amp_h * (x - 3.0) * (x - 3.0) * (5.0 - x) * (5.0 - x);
        if (x > 3.4 && x < 4.6) b.g.samples[i] = amp_g * (x - 3.4) * (x - 3.4) * (4.6 - x) * (4.6 - x);
    }
    return b;
}

double rel_l2(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return std::sqrt(num / den);
}
}  // namespace

TEST_CASE("support window maps onto the operator grid") {
    SupportWindow w{2.0, 4.0, 201};
    REQUIRE(w.h() == Catch::Approx(0.01));
    const GammaOperatorSpec spec = gamma_spec_for(w, {1.0, 2.0, 5.5});
    REQUIRE(spec.x0 == 2.0);
    REQUIRE(spec.N_X == 201);
    REQUIRE(spec.x_end() == Catch::Approx(4.0));
    REQUIRE(spec.omega == std::vector<double>{1.0, 2.0, 5.5});

    SupportWindow bad{4.0, 2.0, 201};
    REQUIRE_THROWS_AS(bad.validate(), validation_error);
    REQUIRE_THROWS_AS(gamma_spec_for(w, {2.0, 1.0}), validation_error);
}

TEST_CASE("bend geometry is recovered from first-order reflection data") {
    const BendParams truth{4.0, 10.0, kPi / 12.0};
    const BendFitResult fit = recover_bend(bend_model_dataset(truth));
    REQUIRE(fit.bends.size() == 1);
    REQUIRE_FALSE(fit.low_confidence);
    REQUIRE(fit.relative_residual < 1e-3);
    const BendParams& got = fit.bends.front();
    REQUIRE(got.x_c == Catch::Approx(truth.x_c).epsilon(1e-4));
    REQUIRE(got.r == Catch::Approx(truth.r).epsilon(1e-3));
    REQUIRE(got.theta == Catch::Approx(truth.theta).epsilon(1e-3));
}

TEST_CASE("bend sign is unobservable: negative angles fit as positive") {
    const BendParams pos{4.0, 10.0, kPi / 12.0};
    const BendParams neg{4.0, 10.0, -kPi / 12.0};
    for (double k : {2.0, 7.0, 23.0})
        REQUIRE(bend_data_model(pos, k) == bend_data_model(neg, k));

    const BendFitResult fit = recover_bend(bend_model_dataset(neg));
    REQUIRE(fit.bends.front().theta > 0.0);
    REQUIRE(fit.bends.front().theta == Catch::Approx(pos.theta).epsilon(1e-3));
}

TEST_CASE("bend fit refuses all-zero data") {
    FrequencyDataset ds;
    ds.provenance = "born-model";
    for (double k : standard_band()) ds.records.push_back({0, k, 2.0 * k, cdouble(0.0, 0.0)});
    ds.sort();
    REQUIRE_THROWS_AS(recover_bend(ds), validation_error);
}

TEST_CASE("mode-0-only bump data yields the partial difference profile") {
    const BumpProfiles truth = wall_pair(0.2, 0.0);  // flat bottom: h - g = h
    FrequencyDataset ds;
    ds.provenance = "born-model";
    for (double k : standard_band()) {
        const BumpData d = bump_data_model(truth, k);
        ds.records.push_back({0, k, 2.0 * k, d.d0});
    }
    ds.sort();

    const SupportWindow window{2.8, 5.2, 241};
    RegularizationConfig cfg;
    cfg.lambda = 1e-4;
    cfg.max_iter = 4000;
    cfg.grad_tol = 1e-8;
    const BumpRecovery rec = recover_bump(ds, window, cfg);
    REQUIRE(rec.partial);
    for (double v : rec.g_app.samples) REQUIRE(v == 0.0);

    std::vector<double> want(241);
    for (int j = 0; j < 241; ++j) {
        const double x = window.x_min + j * window.h();
        want[j] = (x > 3.0 && x < 5.0) ? 0.2 * (x - 3.0) * (x - 3.0) * (5.0 - x) * (5.0 - x) : 0.0;
    }
    REQUIRE(rel_l2(rec.h_app.samples, want) < 0.05);
}

TEST_CASE("two-band bump data separates the two walls", "[slow]") {
    const BumpProfiles truth = wall_pair(0.25, -0.15);
    FrequencyDataset ds;
    ds.provenance = "born-model";
    for (double k : standard_band()) {
        const BumpData d = bump_data_model(truth, k);
        ds.records.push_back({0, k, 2.0 * k, d.d0});
        if (d.d1.has_value()) {
            const double k1 = std::sqrt(k * k - kPi * kPi);
            ds.records.push_back({1, k, k + k1, *d.d1});
        }
    }
    ds.sort();

    const SupportWindow window{2.8, 5.2, 241};
    RegularizationConfig cfg;
    cfg.lambda = 1e-4;
    cfg.max_iter = 5000;
    cfg.grad_tol = 1e-8;
    const BumpRecovery rec = recover_bump(ds, window, cfg);
    REQUIRE_FALSE(rec.partial);

    std::vector<double> want_h(241), want_g(241);
    for (int j = 0; j < 241; ++j) {
        const double x = window.x_min + j * window.h();
        want_h[j] = (x > 3.0 && x < 5.0) ? 0.25 * (x - 3.0) * (x - 3.0) * (5.0 - x) * (5.0 - x) : 0.0;
        want_g[j] = (x > 3.4 && x < 4.6) ? -0.15 * (x - 3.4) * (x - 3.4) * (4.6 - x) * (4.6 - x) : 0.0;
    }
    REQUIRE(rel_l2(rec.h_app.samples, want_h) < 0.10);
    REQUIRE(rel_l2(rec.g_app.samples, want_g) < 0.10);
}

TEST_CASE("a y-independent index map lands in the uniform mode", "[slow]") {
    InhomogeneityMap truth;
    truth.x0 = 3.0;
    truth.dx = 0.0025;
    truth.nx = 401;  // [3, 4]
    truth.ny = 41;
    truth.values.assign(static_cast<std::size_t>(truth.nx) * truth.ny, 0.0);
    auto f = [](double x) {
        return (x > 3.2 && x < 3.8) ? 0.05 * 0.5 * (1.0 - std::cos(2.0 * kPi * (x - 3.2) / 0.6))
                                    : 0.0;
    };
    for (int i = 0; i < truth.nx; ++i)
        for (int j = 0; j < truth.ny; ++j)
            truth.values[static_cast<std::size_t>(i) * truth.ny + j] = f(truth.x0 + i * truth.dx);

    FrequencyDataset ds;
    ds.provenance = "born-model";
    for (int n = 0; n <= 2; ++n) {
        for (double k : standard_band()) {
            if (k <= n * kPi + 0.25) continue;
            const double kn = std::sqrt(k * k - n * n * kPi * kPi);
            ds.records.push_back({n, k, k + kn, inhomogeneity_data_model(truth, k, n)});
        }
    }
    ds.sort();

    const SupportWindow window{3.0, 4.0, 101};
    RegularizationConfig cfg;
    cfg.lambda = 1e-3;
    cfg.max_iter = 2000;
    cfg.grad_tol = 1e-8;
    const InhomogeneityRecovery rec = recover_inhomogeneity(ds, window, 3, cfg, 41);

    // Mode 3 had no records at all.
    REQUIRE(rec.skipped_modes == std::vector<int>{3});
    REQUIRE(rec.map.nx == 101);
    REQUIRE(rec.map.ny == 41);

    const LineFunction c0 = rec.map.modal_component(0);
    std::vector<double> want(101);
    for (int j = 0; j < 101; ++j) want[j] = f(window.x_min + j * window.h());
    REQUIRE(rel_l2(c0.samples, want) < 0.05);

    const double e0 = l2_norm(c0);
    REQUIRE(l2_norm(rec.map.modal_component(1)) < 0.05 * e0);
    REQUIRE(l2_norm(rec.map.modal_component(2)) < 0.05 * e0);
}

TEST_CASE("profile integration inverts the sampled derivative") {
    LineFunction fline = make_line(0.0, 0.002, 1001);  // [0, 2]
    for (int i = 0; i < fline.size(); ++i) {
        const double x = fline.x(i);
        fline.samples[i] = (x > 0.5 && x < 1.5) ? std::pow(std::sin(kPi * (x - 0.5)), 2) : 0.0;
    }
    const LineFunction back = integrate_profile(profile_derivative(fline));
    REQUIRE(back.size() == fline.size());
    double worst = 0.0;
    for (int i = 0; i < fline.size(); ++i)
        worst = std::max(worst, std::abs(back.samples[i] - fline.samples[i]));
    REQUIRE(worst < 1e-4);
}
