#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "sns/fields.hpp"
#include "sns/rng.hpp"
#include "sns/operators.hpp"
#include "sns/theory.hpp"

using namespace sns;

namespace {
const double kTwoPi = 2.0 * std::numbers::pi;

AnalysisParams unit_params() {
    AnalysisParams p;
    p.viscosity = 1.0;
    p.horizon = 1.0;
    p.k0 = 1.0;
    p.k1 = 0.0;
    p.l1 = 0.0;
    p.c_bar = 1.0;
    p.c_tilde = 1.0;
    return p;
}
}  // namespace

TEST_CASE("c_beta closed form and homogeneity") {
    CHECK(c_beta(1.0, 1.0) == doctest::Approx(27.0 / 256.0).epsilon(1e-14));
    CHECK(c_beta(1.0, 2.0) == doctest::Approx(27.0 / 64.0).epsilon(1e-14));
    const double b = 0.37;
    CHECK(c_beta(b / 2.0, 1.3) == doctest::Approx(8.0 * c_beta(b, 1.3)).epsilon(1e-13));
    CHECK_THROWS_AS(c_beta(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(c_beta(-0.1, 1.0), std::invalid_argument);
}

TEST_CASE("splitting constants: slope of C(M) and its nu^-3 scaling") {
    AnalysisParams p = unit_params();
    p.beta = 0.5;
    const RateConstants rc = splitting_constants(p);
    CHECK(rc.c_tilde_slope == doctest::Approx(6.75).epsilon(1e-13));
    CHECK(rc.c_tilde_m(2.0) - rc.c_tilde_m(1.0) == doctest::Approx(6.75).epsilon(1e-12));

    AnalysisParams p2 = p;
    p2.viscosity = 2.0;
    const RateConstants rc2 = splitting_constants(p2);
    CHECK(rc2.c_tilde_slope == doctest::Approx(6.75 / 8.0).epsilon(1e-12));
}

TEST_CASE("splitting linear-growth threshold matches the displayed formula") {
    // beta chosen so that 2 (1 + eps) C_{nu beta} T = 1
    AnalysisParams p = unit_params();
    p.q_moment = 3.0;
    p.eps_bar = 0.05;
    p.beta = std::cbrt(27.0 * 2.0 * 1.05 / 256.0);
    const double a2 = 2.0 * 1.05 * c_beta(p.viscosity * p.beta, p.c_bar) * p.horizon;
    REQUIRE(a2 == doctest::Approx(1.0).epsilon(1e-12));

    const RateConstants rc = splitting_constants(p);
    const double n = std::exp(10.0);
    CHECK(rc.threshold_lin_growth(n) ==
          doctest::Approx(10.0 - std::log(10.0)).epsilon(1e-12));
    CHECK(rc.threshold_lin_growth(n) == doctest::Approx(7.69741490700596).epsilon(1e-10));
}

TEST_CASE("splitting additive threshold is the positive quadratic root squared") {
    AnalysisParams p = unit_params();
    const RateConstants rc = splitting_constants(p);
    const double alpha0 = 0.25;
    const double a2 = 2.0 * (1.0 + p.eps_bar) * c_beta(p.viscosity * p.beta, p.c_bar) * p.horizon;
    const double a1 = 2.0 * alpha0 / (p.holder_p * p.c_bar);
    for (double n : {1e2, 1e4, 1e6}) {
        const double m = rc.threshold_additive(n);
        const double x = std::sqrt(m);
        CHECK(a2 * x * x + a1 * x - std::log(n) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("splitting additive exponent bound") {
    AnalysisParams p = unit_params();
    const RateConstants rc = splitting_constants(p);
    CHECK(rc.alpha0 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rc.gamma_sup == doctest::Approx(0.25 * std::sqrt(512.0 / 27.0)).epsilon(1e-13));
    CHECK(rc.gamma_sup == doctest::Approx(1.0886621079036347).epsilon(1e-12));
}

TEST_CASE("euler constants: alpha0, C1 slope scaling, gamma_sup") {
    AnalysisParams p = unit_params();
    const RateConstants rc = euler_constants(p);
    CHECK(rc.alpha0 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rc.gamma_sup == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(rc.c1_slope == doctest::Approx((1.0 + p.eps_bar) / 2.0).epsilon(1e-13));

    AnalysisParams p2 = p;
    p2.viscosity = 2.0;
    const RateConstants rc2 = euler_constants(p2);
    CHECK(rc2.c1_slope == doctest::Approx(rc.c1_slope / 2.0).epsilon(1e-12));
}

TEST_CASE("euler gamma_sup increases toward 1/2 with the viscosity") {
    AnalysisParams p = unit_params();
    double prev = 0.0;
    for (double nu : {1.0, 10.0, 100.0, 1000.0}) {
        p.viscosity = nu;
        const RateConstants rc = euler_constants(p);
        CHECK(rc.gamma_sup > prev);
        CHECK(rc.gamma_sup < 0.5);
        prev = rc.gamma_sup;
    }
    CHECK(prev > 0.49);
}

TEST_CASE("euler thresholds diverge and approach the leading coefficient") {
    AnalysisParams p = unit_params();
    p.eta = 0.45;
    p.q_moment = 2.0;
    const RateConstants rc = euler_constants(p);
    const double lead = 2.0 * p.viscosity / ((1.0 + p.eps_bar) * p.c_bar * p.c_bar * p.horizon);

    double prev_dev = std::numeric_limits<double>::infinity();
    for (double n : {1e6, 1e12, 1e24, 1e48}) {
        const double ratio = rc.threshold_lin_growth(n) / std::log(n);
        const double dev = std::abs(ratio - lead * p.eta);
        CHECK(dev < prev_dev);  // converges to the leading coefficient
        prev_dev = dev;
    }
    CHECK(rc.threshold_lin_growth(1e40) > rc.threshold_lin_growth(1e20));
    CHECK(rc.threshold_lin_growth(1e40) > 30.0);

    // additive regime: exact linearity in ln N
    const double denom = rc.alpha0 / p.holder_p +
                         (1.0 + p.eps_bar) * p.c_bar * p.c_bar * p.horizon / (2.0 * p.viscosity);
    CHECK(rc.threshold_additive(1e6) ==
          doctest::Approx(p.eta * std::log(1e6) / denom).epsilon(1e-12));
}

TEST_CASE("additive-regime requests demand K1 = 0") {
    AnalysisParams p = unit_params();
    p.k1 = 0.5;
    const RateConstants rc = euler_constants(p);
    CHECK(std::isnan(rc.gamma_sup));
    CHECK_THROWS_AS(rc.threshold_additive(100.0), std::domain_error);
    const RateConstants sp = splitting_constants(p);
    CHECK(std::isnan(sp.gamma_sup));
    CHECK_THROWS_AS(sp.threshold_additive(100.0), std::domain_error);
}

TEST_CASE("analysis parameter validation") {
    AnalysisParams p = unit_params();
    p.beta = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = unit_params();
    p.eta = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = unit_params();
    p.q_moment = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("GN estimator reproduces the single-mode closed form") {
    // For u = e A cos(k.x + phi): ||u||_{L4}^2 / (|u| |grad u|) = sqrt(3/2) / (L |k|)
    const Grid g = make_grid(32, kTwoPi);
    SpectralField f(g);
    f.c2(1, 0) = {0.35, 0.1};
    f.c2(-1, 0) = {0.35, -0.1};
    const NormBundle nb = norm_bundle(f);
    const double ratio = nb.l4 * nb.l4 / (nb.l2 * nb.grad_l2);
    CHECK(ratio == doctest::Approx(std::sqrt(1.5) / kTwoPi).epsilon(1e-12));

    // scale invariance of the ratio
    const SpectralField f2 = 2.0 * f;
    const NormBundle nb2 = norm_bundle(f2);
    CHECK(nb2.l4 * nb2.l4 / (nb2.l2 * nb2.grad_l2) == doctest::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("estimated GN constant certifies the interpolation inequality on its samples") {
    const Grid g = make_grid(32, kTwoPi);
    const double c_hat = estimate_gn_constant(g, 300, 555);
    CHECK(c_hat > 0.0);
    // fields from the estimator's own sample family satisfy the bound
    for (int s = 0; s < 100; ++s) {
        const auto r = Philox4x32::block(555, {static_cast<std::uint32_t>(s), 0u, 0u, 3u});
        const double decay =
            1.0 + 2.0 * uniform_open((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
        const NormBundle nb = norm_bundle(
            random_solenoidal_field(g, decay, 555, static_cast<std::uint32_t>(s + 1)));
        CHECK(nb.l4 * nb.l4 <= c_hat * nb.l2 * nb.grad_l2 * (1.0 + 1e-12));
    }
}

TEST_CASE("GN estimate is a running maximum, non-decreasing in the sample count") {
    const Grid g = make_grid(16, kTwoPi);
    const double a = estimate_gn_constant(g, 10, 99);
    const double b = estimate_gn_constant(g, 20, 99);
    const double c = estimate_gn_constant(g, 40, 99);
    CHECK(a > 0.0);
    CHECK(b >= a);
    CHECK(c >= b);
    CHECK_THROWS_AS(estimate_gn_constant(g, 0, 1), std::invalid_argument);
}

TEST_CASE("localization indicators: sentinels and monotonicity") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 0.4, 3.0, GKind::additive);
    SchemeParams p;
    p.viscosity = 1.0;
    p.horizon = 0.5;
    p.n_steps = 8;
    p.kind = SchemeKind::fully_implicit;
    const SpectralField u0 = taylor_green_field(g, 1.0);
    const WienerPath path = sample_wiener_path(m, p.horizon, 8, 313);
    const TrajectoryRecord rec = run_trajectory(u0, p, m, path);

    const auto all = localization_indicator(rec, std::numeric_limits<double>::infinity(),
                                            LocalizationVariant::grad_sup);
    for (auto v : all) CHECK(v == 1);

    const auto none = localization_indicator(rec, 0.0, LocalizationVariant::grad_sup);
    for (auto v : none) CHECK(v == 0);

    for (LocalizationVariant variant :
         {LocalizationVariant::grad_sup, LocalizationVariant::x_norm_sup}) {
        for (double mth : {0.5, 2.0, 10.0}) {
            const auto ind = localization_indicator(rec, mth, variant);
            for (size_t k = 1; k < ind.size(); ++k) CHECK(ind[k] <= ind[k - 1]);
        }
    }

    // the X-norm variant watches t_0 as well
    const double x0 = norm_bundle(rec.states[0]).x_norm;
    const auto strict = localization_indicator(rec, 0.99 * std::pow(x0, 4),
                                               LocalizationVariant::x_norm_sup);
    CHECK(strict[0] == 0);
}

TEST_CASE("running sup indicator on plain values") {
    const std::vector<double> vals = {1.0, 3.0, 2.0, 5.0};
    const auto ind = running_sup_indicator(vals, 3.5);
    CHECK(ind == std::vector<std::uint8_t>{1, 1, 1, 0});
}
