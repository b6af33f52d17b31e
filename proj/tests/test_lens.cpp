#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lensjet/errors.hpp"
#include "lensjet/lens.hpp"
#include "lensjet/warp.hpp"

using namespace lensjet;

TEST_CASE("chebyshev grid shape") {
    const auto g = chebyshev_grid(101);
    CHECK(g.size() == 101);
    CHECK(g.front() > -0.99);
    CHECK(g.back() < 0.99);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(g[i] < g[i + 1]);
    CHECK(g[50] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("single straight record in the flat strip") {
    StripMetric flat{make_flat_warp(1.0)};
    const auto t = build_lens_table(flat, {0.0}, LensMethod::quadrature);
    CHECK(t.records.size() == 1);
    CHECK(t.records[0].T == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(t.records[0].delta_x == doctest::Approx(0.0));
    CHECK(t.records[0].exit_u == doctest::Approx(0.0));
}

TEST_CASE("lens equivalence of the two cosine strips") {
    const auto grid = chebyshev_grid(101);
    const auto t1 = build_lens_table(StripMetric{make_cos_warp(1)}, grid, LensMethod::quadrature);
    const auto t2 = build_lens_table(StripMetric{make_cos_warp(2)}, grid, LensMethod::quadrature);
    for (const auto& r : t1.records) CHECK(std::isfinite(r.T));
    const auto d = compare_lens(t1, t2);
    CHECK(d.max_dT <= 1e-8);
    CHECK(d.max_ddx <= 1e-8);
    CHECK(d.max_dexit <= 1e-8);

    const auto self = compare_lens(t1, t1);
    CHECK(self.max_dT == 0.0);
    CHECK(self.max_ddx == 0.0);
    CHECK(self.max_dexit == 0.0);

    const auto tf = build_lens_table(StripMetric{make_flat_warp(2.0 * M_PI)}, grid,
                                     LensMethod::quadrature);
    CHECK(compare_lens(t1, tf).max_dT > 1.0);

    LensTable other = t1;
    other.grid[0] += 1e-3;
    CHECK_THROWS_AS(compare_lens(t1, other), std::invalid_argument);
}

TEST_CASE("both table methods agree record by record") {
    const auto grid = chebyshev_grid(25);
    for (const auto& w : {make_cos_warp(1), make_cos_warp(2)}) {
        StripMetric m{w};
        const auto tq = build_lens_table(m, grid, LensMethod::quadrature);
        const auto to = build_lens_table(m, grid, LensMethod::ode);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(tq.records[i].T - to.records[i].T) <= 1e-7);
            CHECK(std::abs(tq.records[i].delta_x - to.records[i].delta_x) <= 1e-7);
            CHECK(std::abs(tq.records[i].exit_u - to.records[i].exit_u) <= 1e-7);
        }
    }
}

TEST_CASE("record invariants: transversality and conserved momentum") {
    const auto grid = chebyshev_grid(25);
    StripMetric m{make_cos_warp(2)};
    const auto t = build_lens_table(m, grid, LensMethod::ode);
    const double f0 = m.f(0.0);
    for (const auto& r : t.records) {
        CHECK(std::abs(r.entry_u) * std::sqrt(f0) < 1.0);
        const double fexit = m.f(r.exit_side == Side::lower ? 0.0 : m.length());
        CHECK(std::abs(std::abs(r.exit_u * fexit) - std::abs(r.entry_u * f0)) <= 1e-8);
    }
}

TEST_CASE("reversing an exit reproduces the entry") {
    StripMetric m{make_cos_warp(1)};
    const auto t = build_lens_table(m, chebyshev_grid(9), LensMethod::ode);
    for (const auto& r : t.records) {
        const double fL = m.f(m.length());
        const double vy = -std::sqrt(1.0 - fL * r.exit_u * r.exit_u);
        const auto back = integrate_to_boundary(m, {r.delta_x, m.length(), -r.exit_u, vy});
        CHECK(back.exit_side == Side::lower);
        CHECK(back.T == doctest::Approx(r.T).epsilon(1e-8));
        CHECK(std::abs(back.exit_x - 0.0) <= 1e-7);
        CHECK(std::abs(-back.exit_vx - r.entry_u) <= 1e-7);
    }
}

TEST_CASE("reflection symmetry: entry from the far side of a symmetric strip") {
    StripMetric m{make_cos_warp(1)};  // f(y) = f(L - y)
    const auto grid = chebyshev_grid(9);
    const auto bottom = build_lens_table(m, grid, LensMethod::ode);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = grid[i];
        const double vy = -std::sqrt(1.0 - m.f(m.length()) * u * u);
        const auto ev = integrate_to_boundary(m, {0.0, m.length(), u, vy});
        CHECK(ev.exit_side == Side::lower);
        CHECK(ev.T == doctest::Approx(bottom.records[i].T).epsilon(1e-9));
        CHECK(ev.exit_x == doctest::Approx(bottom.records[i].delta_x).epsilon(1e-8));
    }
}

TEST_CASE("lens CSV round trip") {
    const auto t = build_lens_table(StripMetric{make_cos_warp(1)}, chebyshev_grid(7),
                                    LensMethod::quadrature);
    std::stringstream ss;
    write_lens_csv(ss, t);
    const auto back = read_lens_csv(ss);
    REQUIRE(back.records.size() == t.records.size());
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        CHECK(back.records[i].T == t.records[i].T);  // 17 digits: bit-exact
        CHECK(back.records[i].delta_x == t.records[i].delta_x);
        CHECK(back.records[i].exit_side == t.records[i].exit_side);
    }
}

TEST_CASE("sublevel measures: closed forms for the cosine warps") {
    const WarpFunction c1 = make_cos_warp(1);
    const WarpFunction c2 = make_cos_warp(2);
    CHECK(sublevel_measure(c1, 2.0) == doctest::Approx(M_PI).epsilon(1e-9));
    CHECK(sublevel_measure(c2, 2.0) == doctest::Approx(M_PI).epsilon(1e-9));
    for (double r : {1.2, 1.7, 2.4, 2.9}) {
        const double expect = 2.0 * std::acos(2.0 - r);
        CHECK(sublevel_measure(c1, r) == doctest::Approx(expect).epsilon(1e-8));
        CHECK(sublevel_measure(c2, r) == doctest::Approx(expect).epsilon(1e-8));
    }
    CHECK(sublevel_measure(c1, 0.5) == 0.0);
    CHECK(sublevel_measure(c1, 3.5) == doctest::Approx(2.0 * M_PI));
}

TEST_CASE("equimeasurability verdicts") {
    const WarpFunction c1 = make_cos_warp(1);
    const WarpFunction c2 = make_cos_warp(2);
    const auto eq = equimeasurable_check(c1, c2, 256, 1e-8);
    CHECK(eq.pass);
    CHECK(eq.max_gap <= 1e-8);

    const auto self = equimeasurable_check(c1, c1, 64, 1e-12);
    CHECK(self.max_gap == 0.0);

    const auto off = equimeasurable_check(c1, make_flat_warp(2.0 * M_PI), 256, 1e-8);
    CHECK_FALSE(off.pass);
    CHECK(off.max_gap > 1.0);

    CHECK_THROWS_AS(equimeasurable_check(c1, make_flat_warp(1.0), 16, 1e-8),
                    std::invalid_argument);
}

TEST_CASE("distribution form of the exit-time integral") {
    const WarpFunction c1 = make_cos_warp(1);
    const WarpFunction c2 = make_cos_warp(2);
    StripMetric m1{c1};

    CHECK(distribution_integral(c1, 0.0, 100) == doctest::Approx(2.0 * M_PI).epsilon(1e-9));

    const double direct = crossing_time(m1, 0.5);
    CHECK(std::abs(distribution_integral(c1, 0.5, 10000) - direct) <= 1e-5);

    // Identical pushforward measures give identical sums at every refinement.
    for (int n : {64, 512, 4096}) {
        const double a = distribution_integral(c1, 0.5, n);
        const double b = distribution_integral(c2, 0.5, n);
        CHECK(a == doctest::Approx(b).epsilon(1e-8));
    }
}

TEST_CASE("equimeasurable warps produce equivalent lens data") {
    // The computational content of the equal-sublevel-measure mechanism.
    const WarpFunction c1 = make_cos_warp(1);
    const WarpFunction c2 = make_cos_warp(2);
    REQUIRE(equimeasurable_check(c1, c2, 512, 1e-9).pass);
    const auto grid = chebyshev_grid(51);
    const auto d = compare_lens(build_lens_table(StripMetric{c1}, grid, LensMethod::quadrature),
                                build_lens_table(StripMetric{c2}, grid, LensMethod::quadrature));
    CHECK(d.sup() <= 1e-6);
}
