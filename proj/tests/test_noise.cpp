#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <numbers>

#include "sns/fields.hpp"
#include "sns/noise.hpp"
#include "sns/operators.hpp"

using namespace sns;

namespace {
const double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("trace of the covariance equals the direct lattice sum") {
    const Grid g = make_grid(32, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::additive);

    double expected = 0.0;
    const int c = g.dealias_cutoff;
    for (int k1 = -c; k1 <= c; ++k1)
        for (int k2 = -c; k2 <= c; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            expected += std::pow(static_cast<double>(k1 * k1 + k2 * k2), -3.0);
        }
    CHECK(m.trace_q == doctest::Approx(expected).epsilon(1e-13));
    CHECK(m.n_retained() == (2 * c + 1) * (2 * c + 1) - 1);
}

TEST_CASE("additive kind has K1 = 0 and L1 = 0, K0 = trace") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 2.0, 3.0, GKind::additive);
    CHECK(m.k0 == doctest::Approx(m.trace_q));
    CHECK(m.k1 == 0.0);
    CHECK(m.l1 == 0.0);
}

TEST_CASE("multiplicative constants follow the modulation bounds") {
    const Grid g = make_grid(16, kTwoPi);
    const double sigma = 0.7;
    const NoiseModel m =
        build_noise_model(g, 1.0, 3.0, GKind::scalar_multiplicative, sigma, Modulation::sine);
    CHECK(m.k0 == doctest::Approx(sigma * sigma * m.trace_q));
    CHECK(m.k1 == 0.0);
    CHECK(m.l1 == doctest::Approx(sigma * sigma * m.trace_q));

    const NoiseModel mc = build_noise_model(g, 1.0, 3.0, GKind::scalar_multiplicative, sigma,
                                            Modulation::constant, 0.5);
    CHECK(mc.k0 == doctest::Approx(sigma * sigma * 0.25 * mc.trace_q));
    CHECK(mc.l1 == 0.0);
}

TEST_CASE("zero amplitude gives zero noise") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 0.0, 3.0, GKind::additive);
    CHECK(m.trace_q == 0.0);
    const WienerPath p = sample_wiener_path(m, 1.0, 16, 42);
    for (const auto& c : p.increments) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("invalid spectra are rejected") {
    const Grid g = make_grid(16, kTwoPi);
    CHECK_THROWS_AS(build_noise_model(g, -1.0, 3.0, GKind::additive), std::invalid_argument);
    CHECK_THROWS_AS(build_noise_model(g, 1.0, -0.5, GKind::additive), std::invalid_argument);
}

TEST_CASE("same seed reproduces the path bit-exactly") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::additive);
    const WienerPath a = sample_wiener_path(m, 0.5, 64, 9001);
    const WienerPath b = sample_wiener_path(m, 0.5, 64, 9001);
    REQUIRE(a.increments.size() == b.increments.size());
    CHECK(std::memcmp(a.increments.data(), b.increments.data(),
                      a.increments.size() * sizeof(Complex)) == 0);
    const WienerPath c = sample_wiener_path(m, 0.5, 64, 9002);
    CHECK(std::memcmp(a.increments.data(), c.increments.data(),
                      a.increments.size() * sizeof(Complex)) != 0);
}

TEST_CASE("increments carry the Hermitian pairing") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 2.0, GKind::additive);
    const WienerPath p = sample_wiener_path(m, 1.0, 4, 7);
    for (int step = 0; step < p.n_fine; ++step) {
        const auto row = p.row(step);
        for (int mi = 0; mi < m.n_retained(); ++mi) {
            const auto& mode = m.modes[mi];
            CHECK(std::abs(row[mode.mirror] - std::conj(row[mi])) == 0.0);
        }
    }
}

TEST_CASE("per-mode increment variance matches lambda_k dt") {
    const Grid g = make_grid(8, kTwoPi);  // 24 retained modes keeps this quick
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::additive);
    const int steps = 20000;
    const double horizon = 2.0;
    const double dt = horizon / steps;
    const WienerPath p = sample_wiener_path(m, horizon, steps, 31337);
    for (int mi = 0; mi < m.n_retained(); mi += 5) {
        double acc = 0.0;
        for (int s = 0; s < steps; ++s) acc += std::norm(p.row(s)[mi]);
        const double sample_var = acc / steps;
        const double target = m.modes[mi].lambda * dt;
        const double se = target / std::sqrt(static_cast<double>(steps));
        CHECK(std::abs(sample_var - target) <= 5.0 * se);
    }
}

TEST_CASE("coarsen_path sums pairs exactly") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::additive);
    const WienerPath p = sample_wiener_path(m, 1.0, 4, 55);
    const WienerPath c2 = coarsen_path(p, 2);
    REQUIRE(c2.n_fine == 2);
    CHECK(c2.dt_fine == doctest::Approx(2.0 * p.dt_fine));
    for (int mi = 0; mi < m.n_retained(); ++mi) {
        const Complex want0 = p.row(0)[mi] + p.row(1)[mi];
        const Complex want1 = p.row(2)[mi] + p.row(3)[mi];
        CHECK(c2.row(0)[mi] == want0);
        CHECK(c2.row(1)[mi] == want1);
    }

    const WienerPath c1 = coarsen_path(p, 1);
    CHECK(std::memcmp(c1.increments.data(), p.increments.data(),
                      p.increments.size() * sizeof(Complex)) == 0);

    const WienerPath whole = coarsen_path(p, 4);
    REQUIRE(whole.n_fine == 1);
    for (int mi = 0; mi < m.n_retained(); ++mi) {
        const Complex want = p.row(0)[mi] + p.row(1)[mi] + p.row(2)[mi] + p.row(3)[mi];
        CHECK(whole.row(0)[mi] == want);
    }

    CHECK_THROWS_AS(coarsen_path(p, 3), std::invalid_argument);
}

TEST_CASE("coarsening composes bit-exactly") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::additive);
    const WienerPath p = sample_wiener_path(m, 1.0, 64, 1234);
    const WienerPath a = coarsen_path(p, 8);
    const WienerPath b = coarsen_path(coarsen_path(p, 2), 4);
    REQUIRE(a.increments.size() == b.increments.size());
    CHECK(std::memcmp(a.increments.data(), b.increments.data(),
                      a.increments.size() * sizeof(Complex)) == 0);
}

TEST_CASE("additive apply_g ignores the state") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::additive);
    const WienerPath p = sample_wiener_path(m, 1.0, 1, 3);
    const SpectralField u1 = taylor_green_field(g, 1.0);
    const SpectralField u2 = random_solenoidal_field(g, 1.0, 4, 0);
    const SpectralField a = apply_g(m, u1, p.row(0));
    const SpectralField b = apply_g(m, u2, p.row(0));
    CHECK(norm_l2(a - b) == 0.0);
    CHECK(divergence_defect(a) <= 1e-13);
    CHECK(hermitian_defect(a) <= 1e-13);
}

TEST_CASE("zero increment maps to the zero field") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::additive);
    const std::vector<Complex> zero_row(m.n_retained(), Complex(0.0, 0.0));
    const SpectralField f = apply_g(m, SpectralField(g), zero_row);
    CHECK(norm_l2(f) == 0.0);
}

TEST_CASE("multiplicative apply_g vanishes at u = 0 with the sine modulation") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::scalar_multiplicative, 2.0);
    const WienerPath p = sample_wiener_path(m, 1.0, 1, 17);
    const SpectralField f = apply_g(m, SpectralField(g), p.row(0));
    CHECK(norm_l2(f) == 0.0);  // sin(0) = 0
}

TEST_CASE("constant modulation reduces to additive scaled by sigma * c") {
    const Grid g = make_grid(16, kTwoPi);
    const double sigma = 1.3, cmod = 0.8;
    const NoiseModel add = build_noise_model(g, 1.0, 3.0, GKind::additive);
    const NoiseModel mul = build_noise_model(g, 1.0, 3.0, GKind::scalar_multiplicative, sigma,
                                             Modulation::constant, cmod);
    const WienerPath p = sample_wiener_path(add, 1.0, 1, 21);
    const SpectralField u = random_solenoidal_field(g, 1.0, 5, 0);
    const SpectralField a = apply_g(add, u, p.row(0));
    const SpectralField b = apply_g(mul, u, p.row(0));
    CHECK(norm_l2(b - sigma * cmod * a) <= 1e-14 * norm_l2(a));
}

TEST_CASE("Lipschitz certificate for the scalar-multiplicative kind") {
    const Grid g = make_grid(16, kTwoPi);
    const double sigma = 0.9;
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::scalar_multiplicative, sigma);
    const NoiseModel unit = build_noise_model(g, 1.0, 3.0, GKind::additive);
    const WienerPath p = sample_wiener_path(m, 1.0, 8, 77);
    for (int s = 0; s < 8; ++s) {
        const SpectralField u = random_solenoidal_field(g, 1.0, 6, 2 * s);
        const SpectralField v = random_solenoidal_field(g, 1.0, 6, 2 * s + 1);
        const auto row = p.row(s);
        const double lhs = norm_l2(apply_g(m, u, row) - apply_g(m, v, row));
        const double image = norm_l2(apply_g(unit, u, row));
        const double bound = sigma * std::abs(norm_l2(u) - norm_l2(v)) * image;
        CHECK(lhs <= bound * (1.0 + 1e-12));

        // aggregate (G1) Lipschitz bound on the Hilbert-Schmidt norm
        const double du = norm_l2(u) - norm_l2(v);
        const double mod_gap = m.modulate(norm_l2(u)) - m.modulate(norm_l2(v));
        const double hs_gap_sq = sigma * sigma * mod_gap * mod_gap * m.trace_q;
        const double l2_gap = norm_l2(u - v);
        CHECK(hs_gap_sq <= m.l1 * l2_gap * l2_gap * (1.0 + 1e-12));
        CHECK(std::abs(mod_gap) <= std::abs(du) * (1.0 + 1e-12));
    }
}

TEST_CASE("growth certificate: HS norm bounded by K0 + K1 |u|^2") {
    const Grid g = make_grid(16, kTwoPi);
    for (GKind kind : {GKind::additive, GKind::scalar_multiplicative}) {
        const NoiseModel m = build_noise_model(g, 1.0, 3.0, kind, 1.1);
        for (int s = 0; s < 10; ++s) {
            const SpectralField u = random_solenoidal_field(g, 1.0, 8, s);
            const double n2 = norm_l2(u) * norm_l2(u);
            CHECK(g_hs_norm_sq(m, u) <= m.k0 + m.k1 * n2 + 1e-12);
        }
    }
}

TEST_CASE("apply_g output is a real field (physical space)") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 2.0, GKind::additive);
    const WienerPath p = sample_wiener_path(m, 1.0, 1, 5);
    const SpectralField f = apply_g(m, SpectralField(g), p.row(0));
    CHECK(hermitian_defect(f) <= 1e-14);
}

TEST_CASE("path dump round trips") {
    const Grid g = make_grid(16, kTwoPi);
    const NoiseModel m = build_noise_model(g, 1.0, 3.0, GKind::additive);
    const WienerPath p = sample_wiener_path(m, 0.25, 8, 4242);
    const auto file = std::filesystem::temp_directory_path() / "sns2d_path_test.snsw";
    write_path(file.string(), p);
    const WienerPath back = read_path(file.string());
    CHECK(back.seed == p.seed);
    CHECK(back.n_fine == p.n_fine);
    CHECK(back.dt_fine == p.dt_fine);
    REQUIRE(back.increments.size() == p.increments.size());
    CHECK(std::memcmp(back.increments.data(), p.increments.data(),
                      p.increments.size() * sizeof(Complex)) == 0);
    std::filesystem::remove(file);
}
