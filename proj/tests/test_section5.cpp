#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lensjet/errors.hpp"
#include "lensjet/section5.hpp"
#include "lensjet/strip_metric.hpp"

using namespace lensjet;

namespace {
const Section5Profile& profile() {
    static const Section5Profile p = build_f1();
    return p;
}
}  // namespace

TEST_CASE("constructed profile satisfies every clause") {
    const auto& p = profile();
    for (const auto& c : p.checks) {
        CAPTURE(c.clause);
        CHECK(c.ok);
    }
    CHECK(p.f1.value(0.5) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(p.f1.value(6.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.f1.value(3.0 + 0.7) == p.f1.value(3.0 - 0.7));
    CHECK(p.f1.value(0.0) == doctest::Approx(1.0));
    CHECK(p.f1.value(14.0) == doctest::Approx(1.0));
    CHECK(p.f1.derivative(1, 0.0) == doctest::Approx(1.0));
    CHECK(p.f1.derivative(1, 14.0) == doctest::Approx(-1.0));
}

TEST_CASE("peak below 2 is rejected") {
    Section5Params bad;
    bad.peak = 1.5;
    CHECK_THROWS_AS(build_f1(bad), Error);
}

TEST_CASE("layer widths") {
    const auto& p = profile();
    CHECK(layer_width(p, 1.0) == 6.0);
    CHECK(layer_width(p, p.peak) == 0.0);
    CHECK_THROWS_AS(layer_width(p, 0.5), std::invalid_argument);

    // On the affine branch the left inverse is exact: l(1.5) = 0.5.
    const double H15 = layer_width(p, 1.5);
    const double r15 = H15 + 0.5;
    CHECK(p.f1.value(r15) == doctest::Approx(1.5).epsilon(1e-10));

    const auto table = layer_width_table(p, 129);
    for (std::size_t i = 0; i + 1 < table.widths.size(); ++i)
        CHECK(table.widths[i] >= table.widths[i + 1] - 1e-12);
    CHECK(table.widths.front() == doctest::Approx(6.0));
    CHECK(table.widths.back() == doctest::Approx(0.0));
}

TEST_CASE("rearranged profile: values, symmetry, monotone rise") {
    const auto& p = profile();
    const WarpFunction f2 = build_f2(p, 1793);
    CHECK(f2.value(3.0) == doctest::Approx(p.f1.value(3.0)).epsilon(1e-12));
    CHECK(f2.value(6.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f2.value(0.0) == doctest::Approx(1.0).epsilon(1e-15));

    const auto& xs = f2.sample_grid();
    const auto& fs = f2.sample_values();
    const std::size_t n = xs.size();
    const std::size_t i3 = (n - 1) * 3 / 14, i7 = (n - 1) / 2;
    for (std::size_t i = 0; i + 1 <= i3; ++i) CHECK(fs[i] <= fs[i + 1] + 1e-12);
    for (std::size_t t = 1; t <= i3; ++t) CHECK(fs[i3 - t] == fs[i3 + t]);  // mirror about 3
    for (std::size_t t = 1; t < n - i7; ++t) CHECK(fs[i7 - t] == fs[i7 + t]);  // mirror about 7

    // Rearrangement preserves the layer widths.
    double worst = 0.0;
    for (int k = 1; k < 40; ++k) {
        const double y = 1.0 + (p.peak - 1.0) * k / 40.0;
        // superlevel of f2 on [0,6] is the centered interval of width H(y)
        double lo = 0.0, hi = 3.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f2.value(mid) < y ? lo : hi) = mid;
        }
        const double width = 2.0 * (3.0 - 0.5 * (lo + hi));
        worst = std::max(worst, std::abs(width - layer_width(p, y)));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("bad sample counts are rejected") {
    CHECK_THROWS_AS(build_f2(profile(), 100), std::invalid_argument);
}

TEST_CASE("full verification report") {
    const auto& p = profile();
    const WarpFunction f2 = build_f2(p, 14337);
    Section5Tolerances tols;
    tols.threads = 2;
    const Section5Report rep = verify_section5(p, f2, tols);

    CHECK(rep.pass_equimeasure);
    CHECK(rep.equimeasure_gap <= 1e-6);
    CHECK(rep.f1_slope_at_0 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(rep.f2_slope_at_0) <= 1e-4);
    CHECK(rep.pass_lens);
    CHECK(rep.lens.sup() <= 1e-6);
    CHECK(rep.jet_first_differing_order == 1);
}

TEST_CASE("presets expose the constructed pair") {
    const WarpFunction f1 = WarpFunction::preset("sec5-f1");
    const WarpFunction f2 = WarpFunction::preset("sec5-f2");
    CHECK(f1.length() == doctest::Approx(14.0));
    CHECK(f2.length() == doctest::Approx(14.0));
    CHECK(f2.is_sampled());
    const auto cmp = jet_compare(ground_truth_jet(StripMetric{f1}, Side::lower, 1),
                                 ground_truth_jet(StripMetric{f2}, Side::lower, 1), 1e-4);
    CHECK_FALSE(cmp.equal);
    CHECK(cmp.first_differing_order == 1);
}
