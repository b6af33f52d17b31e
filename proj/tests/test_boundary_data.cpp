#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lensjet/boundary_data.hpp"
#include "lensjet/errors.hpp"
#include "lensjet/fd.hpp"
#include "lensjet/warp.hpp"

using namespace lensjet;

namespace {
BoundaryDataset exp_dataset(NormalDerivativeMode mode = NormalDerivativeMode::solver) {
    return BoundaryDataset::oracle(StripMetric{make_exp_decay_warp(1.0)}, 0.0, 0.05, mode);
}
}  // namespace

TEST_CASE("mu is the boundary arclength") {
    const auto ds = exp_dataset();
    CHECK(ds.mu(0.0, 0.2 * 0.05 / 0.2) == doctest::Approx(0.05));
    CHECK(ds.mu(0.01, -0.01) == ds.mu(-0.01, 0.01));

    // A scaled boundary metric stretches mu accordingly.
    const auto ds4 = BoundaryDataset::oracle(StripMetric{make_exp_decay_warp(1.0, 4.0)}, 0.0, 0.2);
    CHECK(ds4.mu(0.0, 0.1) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("tau basics") {
    const auto ds = exp_dataset();
    CHECK(ds.tau(0.01, 0.01) == 0.0);
    CHECK(ds.tau(0.0, 0.05) < 0.05);           // interior chord beats the boundary
    CHECK(ds.tau(0.0, 0.05) == ds.tau(0.05, 0.0));
    CHECK(ds.tau(-0.02, 0.03) <= ds.mu(-0.02, 0.03));
    CHECK_THROWS_AS(ds.tau(0.0, 0.2), std::invalid_argument);  // outside the window

    const auto flat = BoundaryDataset::oracle(StripMetric{make_flat_warp(1.0)}, 0.0, 0.05);
    CHECK(flat.tau(0.0, 0.04) == doctest::Approx(0.04));  // no chord: tau = mu
}

TEST_CASE("tau never exceeds mu across the window") {
    const auto ds = exp_dataset();
    for (int i = -8; i <= 8; ++i)
        for (int j = i + 1; j <= 8; ++j) {
            const double a = 0.05 * i / 8.0, b = 0.05 * j / 8.0;
            CHECK(ds.tau(a, b) <= ds.mu(a, b) + 1e-15);
        }
}

TEST_CASE("concavity detection matches the second fundamental form") {
    struct Case {
        WarpFunction w;
        bool expect_evidence;
    };
    const Case cases[] = {
        {make_flat_warp(1.0), false},        {make_cos_warp(1), false},
        {make_cos_warp(2), false},           {make_exp_decay_warp(1.0), true},
        {WarpFunction::preset("sec5-f1"), false},
    };
    for (const auto& c : cases) {
        StripMetric m{c.w};
        const auto ds = BoundaryDataset::oracle(m, 0.0, 0.05 * m.length());
        const bool evidence = ds.detect_nonconcave() == ConcavityVerdict::nonconcave_evidence;
        CAPTURE(c.w.name());
        CHECK(evidence == c.expect_evidence);
        CHECK(evidence == (second_fundamental_form(m, Side::lower) > 1e-12));
    }
}

TEST_CASE("normal derivative: solver and finite-difference routes agree") {
    const auto ds = exp_dataset();
    const auto ds_fd = exp_dataset(NormalDerivativeMode::finite_difference);
    for (double x : {0.04, 0.02, -0.03}) {
        const double a = ds.normal_derivative_tau(x, 0.0);
        const double b = ds_fd.normal_derivative_tau(x, 0.0);
        CHECK(a > -1.0);
        CHECK(a < 0.0);
        CHECK(a == doctest::Approx(b).epsilon(1e-4));
    }
}

TEST_CASE("normal derivative equals the chord momentum data") {
    StripMetric m{make_exp_decay_warp(1.0)};
    const auto ds = exp_dataset();
    const double x = 0.04;
    const auto geo = chord_for_separation(m, x);
    // Tangential FD of tau recovers the Clairaut constant...
    const double u = fd::d1_richardson([&](double t) { return ds.tau(t, 0.0); }, x, 1e-3);
    CHECK(u == doctest::Approx(geo.c).epsilon(1e-6));
    // ...and the normal derivative closes the unit gradient.
    const double p = ds.normal_derivative_tau(x, 0.0);
    CHECK(u * u / ds.boundary_g11() + p * p == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("normal derivative against displaced interior distances") {
    StripMetric m{make_exp_decay_warp(1.0)};
    const auto ds = exp_dataset();
    const double x = 0.04, y = 0.0;
    const double p = ds.normal_derivative_tau(x, y);
    const double h = 1e-3;
    const double fd_inward = fd::d1_one_sided(
        [&](double t) { return interior_distance(m, {x, t}, {y, 0.0}); }, 0.0, h);
    CHECK(p == doctest::Approx(fd_inward).epsilon(1e-5));
}

TEST_CASE("fd_partial: symmetry, curvature of rho, Richardson rate") {
    const auto ds = exp_dataset();
    const double h = 1e-3;
    // Antisymmetric about the midpoint of the two slots.
    const double dplus = fd_tangential_tau(ds, 0, 1, 0.01, -0.01, h);
    const double dminus = fd_tangential_tau(ds, 1, 1, 0.01, -0.01, h);
    CHECK(dplus == doctest::Approx(-dminus).epsilon(1e-8));

    // Second difference of rho through the base point gives 2 g11.
    const double curv = fd_tangential_rho(ds, 0, 2, 0.0, 0.0, h);
    CHECK(curv == doctest::Approx(2.0 * ds.boundary_g11()).epsilon(1e-5));

    // Plain central differences converge at second order.
    auto raw = [&](double step) {
        auto f = [&](double t) { return ds.rho(t, 0.0); };
        return (f(step) - 2.0 * f(0.0) + f(-step)) / (step * step);
    };
    const double e1 = std::abs(raw(2e-3) - 2.0);
    const double e2 = std::abs(raw(1e-3) - 2.0);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("tabulated round trip through CSV") {
    namespace fs = std::filesystem;
    const auto ds = exp_dataset();
    const fs::path csv = fs::temp_directory_path() / "lensjet_ds_test.csv";
    const fs::path side = fs::temp_directory_path() / "lensjet_ds_test.csv.json";
    ds.export_csv(csv.string(), side.string(), 201);
    const auto tab = BoundaryDataset::tabulated_from_csv(csv.string(), side.string());
    CHECK(tab.boundary_g11() == doctest::Approx(1.0));
    CHECK(tab.window() == doctest::Approx(0.05));

    double worst = 0.0;
    for (int i = -5; i <= 5; ++i)
        for (int j = -5; j <= 5; ++j) {
            const double a = 0.041 * i / 5.0, b = 0.041 * j / 5.0;
            worst = std::max(worst, std::abs(tab.tau(a, b) - ds.tau(a, b)));
        }
    CHECK(worst <= 1e-9);
    fs::remove(csv);
    fs::remove(side);
}
