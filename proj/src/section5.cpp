#include "lensjet/section5.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "lensjet/errors.hpp"
#include "lensjet/fd.hpp"
#include "lensjet/taylor.hpp"

namespace lensjet {

namespace {

double value_of(double x) { return x; }
double value_of(const Taylor& t) { return t.value(); }

template <class T>
T zero_like(const T& t) {
    return t * 0.0;
}

// sigma(t) = exp(-1/t) for t > 0, extended by zero; all derivatives vanish at
// the junction.
template <class T>
T smooth_sigma(const T& t) {
    if (value_of(t) <= 0.0) return zero_like(t);
    return exp(-1.0 / t);
}

// Smooth step s with s == 0 for t <= 0, s == 1 for t >= 1, strictly
// increasing between.
template <class T>
T smooth_step(const T& t) {
    const double tv = value_of(t);
    if (tv <= 0.0) return zero_like(t);
    if (tv >= 1.0) return zero_like(t) + 1.0;
    const T a = smooth_sigma(t);
    const T b = smooth_sigma(1.0 - t);
    return a / (a + b);
}

// Decreasing flank d(x) = 1 + (peak-1) s((6-x)/3) on [3, 6]; all-order flat
// at both ends, strictly decreasing between.
template <class T>
T flank(const T& x, double peak) {
    return 1.0 + (peak - 1.0) * smooth_step((6.0 - x) / 3.0);
}

template <class T>
T f1_eval(const T& x, double peak) {
    const double xv = value_of(x);
    if (xv > 7.0) return f1_eval(14.0 - x, peak);  // mirror about 7
    if (xv <= 1.0) return x + 1.0;
    if (xv < 2.0) {
        // Blend from the affine piece into the mirrored flank.
        const T s = smooth_step(x - 1.0);
        return (1.0 - s) * (x + 1.0) + s * flank(6.0 - x, peak);
    }
    if (xv <= 3.0) return flank(6.0 - x, peak);  // equals 1 + (P-1) s(x/3)
    if (xv < 6.0) return flank(x, peak);
    return zero_like(x) + 1.0;  // [6, 7]
}

double f1_derivative(int k, double y, double peak) {
    const Taylor t = Taylor::variable(y, std::size_t(k));
    return f1_eval(t, peak).derivative(std::size_t(k));
}

void require(std::vector<ConstraintCheck>& checks, const std::string& clause, double residual,
             double tol) {
    const bool ok = residual <= tol;
    checks.push_back({clause, residual, ok});
    if (!ok)
        throw Error(ErrorCode::constraint_violation,
                    clause + " (residual " + std::to_string(residual) + ")");
}

// Increasing-branch inverse on [0, 3].
double branch_inverse_left(const WarpFunction& f1, double y) {
    double lo = 0.0, hi = 3.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f1.value(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Decreasing-branch inverse on [3, 6].
double branch_inverse_right(const WarpFunction& f1, double y) {
    double lo = 3.0, hi = 6.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f1.value(mid) > y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

int symmetric_sample_count(int requested) {
    // Grid counts of the form 7 * 2^m + 1 put the joints 1, 2, 3, 6, 7 and the
    // mirror images exactly on grid nodes.
    if (requested < 256) throw std::invalid_argument("build_f2 needs n_samples >= 256");
    int n = 7 * 64 + 1;
    while (n < requested) n = (n - 1) * 2 + 1;
    return n;
}

}  // namespace

Section5Profile build_f1(const Section5Params& params) {
    if (!(params.peak > 2.0))
        throw Error(ErrorCode::constraint_violation, "peak must exceed 2 for a monotone rise");
    const double peak = params.peak;

    WarpFunction::Analytic spec;
    spec.value = [peak](double y) { return f1_eval(y, peak); };
    spec.derivative = [peak](int k, double y) { return f1_derivative(k, y, peak); };
    Section5Profile p{peak, WarpFunction::analytic("sec5-f1", 14.0, std::move(spec)), {}};

    const WarpFunction& f1 = p.f1;
    auto& checks = p.checks;

    double r = 0.0;
    for (int i = 0; i <= 512; ++i) {
        const double x = double(i) / 512.0;
        r = std::max(r, std::abs(f1.value(x) - (x + 1.0)));
    }
    require(checks, "f1 = x + 1 on [0,1]", r, 1e-12);

    // Strict increase on [1, 3) up to the flat contact at the peak, where the
    // exact derivative underflows; non-decreasing samples cover the rest.
    double min_slope = 1e300;
    for (int i = 0; i <= 2048; ++i) {
        const double x = 1.0 + 1.9 * double(i) / 2048.0;
        min_slope = std::min(min_slope, f1.derivative(1, x));
    }
    require(checks, "f1' > 0 on [1, 2.9]", min_slope > 1e-12 ? 0.0 : 1.0, 0.5);
    double mono = 0.0;
    for (int i = 0; i <= 2048; ++i) {
        const double x0 = 1.0 + 2.0 * double(i) / 2049.0;
        const double x1 = 1.0 + 2.0 * double(i + 1) / 2049.0;
        mono = std::max(mono, f1.value(x0) - f1.value(x1));
    }
    require(checks, "f1 non-decreasing on [1,3]", mono, 1e-15);
    require(checks, "f1'(3) = 0", std::abs(f1.derivative(1, 3.0)), 1e-15);

    r = 0.0;
    for (int i = 0; i <= 256; ++i) {
        const double t = double(i) / 256.0;
        r = std::max(r, std::abs(f1.value(3.0 + t) - f1.value(3.0 - t)));
    }
    require(checks, "f1(3+t) = f1(3-t) on t in [0,1]", r, 1e-12);

    mono = 0.0;
    for (int i = 0; i <= 2048; ++i) {
        const double x0 = 3.0 + 3.0 * double(i) / 2049.0;
        const double x1 = 3.0 + 3.0 * double(i + 1) / 2049.0;
        mono = std::max(mono, f1.value(x1) - f1.value(x0));
    }
    require(checks, "f1 non-increasing on [3,6]", mono, 1e-15);
    min_slope = 1e300;
    for (int i = 0; i <= 2048; ++i) {
        const double x = 3.1 + 2.8 * double(i) / 2048.0;
        min_slope = std::min(min_slope, -f1.derivative(1, x));
    }
    require(checks, "f1' < 0 on [3.1, 5.9]", min_slope > 1e-12 ? 0.0 : 1.0, 0.5);

    r = 0.0;
    for (int i = 0; i <= 256; ++i) {
        const double x = 6.0 + double(i) / 256.0;
        r = std::max(r, std::abs(f1.value(x) - 1.0));
    }
    require(checks, "f1 = 1 on [6,7]", r, 1e-15);

    r = 0.0;
    for (int i = 0; i <= 1024; ++i) {
        const double t = 7.0 * double(i) / 1024.0;
        r = std::max(r, std::abs(f1.value(7.0 + t) - f1.value(7.0 - t)));
    }
    require(checks, "f1(7+t) = f1(7-t) on t in [0,7]", r, 1e-12);

    return p;
}

double layer_width(const Section5Profile& p, double y) {
    if (y < 1.0 - 1e-12 || y > p.peak + 1e-12)
        throw std::invalid_argument("layer_width: level outside [1, peak]");
    if (y <= 1.0) return 6.0;  // {f1 >= 1} covers [0, 6]; the contact at 6 is flat
    if (y >= p.peak) return 0.0;
    return branch_inverse_right(p.f1, y) - branch_inverse_left(p.f1, y);
}

LayerWidth layer_width_table(const Section5Profile& p, int n_levels) {
    if (n_levels < 2) throw std::invalid_argument("need >= 2 levels");
    LayerWidth out;
    out.levels.resize(std::size_t(n_levels));
    out.widths.resize(std::size_t(n_levels));
    for (int i = 0; i < n_levels; ++i) {
        const double y = 1.0 + (p.peak - 1.0) * double(i) / (n_levels - 1);
        out.levels[std::size_t(i)] = y;
        out.widths[std::size_t(i)] = layer_width(p, y);
    }
    return out;
}

WarpFunction build_f2(const Section5Profile& p, int n_samples) {
    const int n = symmetric_sample_count(n_samples);
    const int i3 = (n - 1) * 3 / 14;
    const int i6 = (n - 1) * 6 / 14;
    const int i7 = (n - 1) / 2;
    std::vector<double> xs(static_cast<std::size_t>(n)), fs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[std::size_t(i)] = 14.0 * double(i) / (n - 1);

    // On [0, 3): f2(x) = y solving x = 3 - H(y)/2; H is strictly decreasing,
    // so the level is found by bisection.
    fs[0] = 1.0;
    double prev = 1.0;
    for (int i = 1; i < i3; ++i) {
        const double target = 2.0 * (3.0 - xs[std::size_t(i)]);
        double lo = 1.0, hi = p.peak;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (layer_width(p, mid) > target ? lo : hi) = mid;
        }
        const double y = 0.5 * (lo + hi);
        if (y < prev - 1e-12)
            throw Error(ErrorCode::constraint_violation,
                        "layer widths not monotone; rearrangement failed");
        prev = y;
        fs[std::size_t(i)] = y;
    }
    fs[std::size_t(i3)] = p.f1.value(3.0);
    for (int i = i3 + 1; i <= i6; ++i) fs[std::size_t(i)] = fs[std::size_t(2 * i3 - i)];
    for (int i = i6 + 1; i <= i7; ++i) fs[std::size_t(i)] = 1.0;
    for (int i = i7 + 1; i < n; ++i) fs[std::size_t(i)] = fs[std::size_t(2 * i7 - i)];

    return WarpFunction::sampled("sec5-f2", 14.0, std::move(xs), std::move(fs));
}

Section5Report verify_section5(const Section5Profile& p, const WarpFunction& f2,
                               const Section5Tolerances& tol) {
    Section5Report rep;
    const EquimeasurableResult eq =
        equimeasurable_check(p.f1, f2, tol.levels, tol.equimeasure_tol);
    rep.equimeasure_gap = eq.max_gap;
    rep.pass_equimeasure = eq.pass;

    const double h = 1e-3;
    rep.f1_slope_at_0 = fd::d1_one_sided([&](double x) { return p.f1.value(x); }, 0.0, h);
    rep.f2_slope_at_0 = fd::d1_one_sided([&](double x) { return f2.value(x); }, 0.0, h);
    rep.pass_slopes = std::abs(rep.f1_slope_at_0 - 1.0) <= tol.f1_slope_tol &&
                      std::abs(rep.f2_slope_at_0) <= tol.f2_slope_tol;

    const std::vector<double> grid = chebyshev_grid(tol.lens_directions);
    const LensTable t1 = build_lens_table(StripMetric{p.f1}, grid, LensMethod::quadrature,
                                          tol.threads);
    const LensTable t2 = build_lens_table(StripMetric{f2}, grid, LensMethod::quadrature,
                                          tol.threads);
    rep.lens = compare_lens(t1, t2);
    rep.pass_lens = rep.lens.sup() <= tol.lens_tol;

    const JetComparison jc = jet_compare(ground_truth_jet(StripMetric{p.f1}, Side::lower, 1),
                                         ground_truth_jet(StripMetric{f2}, Side::lower, 1), 1e-4);
    rep.jet_first_differing_order = jc.equal ? -1 : jc.first_differing_order;
    return rep;
}

namespace {
std::once_flag f2_cache_flag;
const WarpFunction* f2_cache = nullptr;
}  // namespace

WarpFunction section5_f1_preset() { return build_f1().f1; }

WarpFunction section5_f2_preset() {
    std::call_once(f2_cache_flag, [] {
        const Section5Profile p = build_f1();
        f2_cache = new WarpFunction(build_f2(p, Section5Params{}.n_samples));
    });
    return *f2_cache;
}

}  // namespace lensjet
