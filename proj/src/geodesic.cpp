#include "lensjet/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lensjet/ode.hpp"
#include "lensjet/quadrature.hpp"
#include "lensjet/roots.hpp"

namespace lensjet {

namespace {

constexpr double kDegenerateSlope = 1e-8;

void check_unit_speed(const StripMetric& m, const GeodesicState& s) {
    const double res = m.f(s.y) * s.vx * s.vx + s.vy * s.vy - 1.0;
    if (std::abs(res) > 1e-9)
        throw std::invalid_argument("geodesic state violates the unit-speed normalization");
}

// Integrand factors for dt/dy = sqrt(f / (f - c^2)) and dx/dy = c/f * dt/dy.
struct CrossingIntegrands {
    const StripMetric& m;
    double c2;

    double time(double y) const {
        const double f = m.f(y);
        return std::sqrt(f / (f - c2));
    }
    double disp(double y, double c) const {
        const double f = m.f(y);
        return c / (std::sqrt(f) * std::sqrt(f - c2));
    }
};

double min_f(const StripMetric& m) { return m.warp.min_value(); }

double crossing_integral(const StripMetric& m, double u0, bool displacement) {
    const double f0 = m.f(0.0);
    const double c = u0 * f0;
    const double c2 = c * c;
    if (c2 >= min_f(m) - 1e-13)
        throw Error(ErrorCode::grazing, "tangential momentum reaches the warp minimum");
    CrossingIntegrands g{m, c2};
    auto integrand = [&](double y) { return displacement ? g.disp(y, c) : g.time(y); };
    quad::Options opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-13;
    if (m.warp.is_sampled()) {
        // Each knot cell of the interpolant is polynomial; one rule per cell.
        return quad::integrate_cells(integrand, m.warp.sample_grid());
    }
    return quad::integrate(integrand, 0.0, m.length(), opt);
}

// Integral over [from, y_star] (or [y_star, from]) of the chord integrands,
// with the turning-point singularity removed by w = sqrt(|y - y_star|).
// difference() keeps f(y) - f(y_star) accurate when the chord is shallow.
double turning_segment(const StripMetric& m, double from, double y_star, bool displacement) {
    const double span = from - y_star;
    if (span == 0.0) return 0.0;
    const double sgn = span > 0.0 ? 1.0 : -1.0;
    const double W = std::sqrt(std::abs(span));
    const double c = std::sqrt(m.f(y_star));
    const double fp_star = m.warp.derivative(1, y_star);
    auto integrand = [&](double w) {
        const double dy = sgn * w * w;
        const double y = y_star + dy;
        const double f = m.f(y);
        double delta = m.warp.increment(y_star, dy);
        if (delta <= 0.0) delta = std::abs(fp_star) * w * w;  // roundoff at the turning point
        const double root = std::sqrt(delta);
        if (displacement) return 2.0 * w * c / (std::sqrt(f) * root);
        return 2.0 * w * std::sqrt(f) / root;
    };
    quad::Options opt;
    opt.abs_tol = 1e-16;
    opt.rel_tol = 5e-15;
    return quad::integrate(integrand, 0.0, W, opt);
}

// Largest depth usable as a turning point when entering from y = 0: the
// initial strictly-decreasing run of f.
double descending_cap(const StripMetric& m) {
    const double L = m.length();
    const int n = 4096;
    const double step = L / n;
    double y = step;
    if (m.warp.increment(0.0, step) >= 0.0) return 0.0;
    while (y + step < L) {
        if (m.warp.increment(y, step) >= 0.0) break;
        y += step;
    }
    return std::min(y, L * (1.0 - 1e-9));
}

}  // namespace

double clairaut(const StripMetric& m, const GeodesicState& s) { return s.vx * m.f(s.y); }

ExitEvent integrate_to_boundary(const StripMetric& m, const GeodesicState& s0,
                                const IntegratorOptions& opt) {
    check_unit_speed(m, s0);
    const double L = m.length();
    if (s0.y < 0.0 || s0.y > L)
        throw std::invalid_argument("geodesic state starts outside the strip");

    // Launching outward from a boundary exits immediately.
    if ((s0.y == 0.0 && s0.vy < 0.0) || (s0.y == L && s0.vy > 0.0)) {
        return {0.0, s0.x, s0.y == 0.0 ? Side::lower : Side::upper, s0.vx, s0.vy, 0.0};
    }

    using State = ode::Dopri5<4>::State;
    auto rhs = [&m](double, const State& s, State& ds) {
        const double f = m.f(s[1]);
        const double fp = m.fp(s[1]);
        ds[0] = s[2];
        ds[1] = s[3];
        ds[2] = -(fp / f) * s[2] * s[3];
        ds[3] = 0.5 * fp * s[2] * s[2];
    };
    ode::Dopri5<4> solver(rhs, opt.rtol, opt.atol);
    solver.start(0.0, {s0.x, s0.y, s0.vx, s0.vy}, 1e-4);

    const double c0 = clairaut(m, s0);
    double drift = 0.0;
    auto track_drift = [&](const State& s) {
        drift = std::max(drift, std::abs(s[2] * m.f(std::clamp(s[1], 0.0, L)) - c0));
    };
    auto outside = [&](double y) { return y < 0.0 || y > L; };

    ode::Dopri5<4>::Step step;
    while (solver.time() < opt.max_length) {
        solver.advance(step);
        State probe;
        double theta_in = 0.0, theta_out = -1.0;
        for (int i = 1; i <= 5; ++i) {
            const double theta = 0.2 * i;
            step.dense(theta, probe);
            if (outside(probe[1])) {
                theta_out = theta;
                break;
            }
            theta_in = theta;
            track_drift(probe);
        }
        if (theta_out < 0.0) continue;

        // Bisect the inside/outside transition on the dense output.
        while ((theta_out - theta_in) * step.h > opt.event_time_tol) {
            const double mid = 0.5 * (theta_in + theta_out);
            step.dense(mid, probe);
            if (outside(probe[1]))
                theta_out = mid;
            else
                theta_in = mid;
        }
        step.dense(theta_out, probe);
        const Side side = probe[1] < 0.5 * L ? Side::lower : Side::upper;
        track_drift(probe);
        return {step.t0 + theta_out * step.h, probe[0], side, probe[2], probe[3], drift};
    }
    throw Error(ErrorCode::trapped, "no boundary crossing within the length budget");
}

double crossing_time(const StripMetric& m, double u0) { return crossing_integral(m, u0, false); }

double crossing_displacement(const StripMetric& m, double u0) {
    return crossing_integral(m, u0, true);
}

ChordGeometry chord_from_depth(const StripMetric& m, double y_star) {
    if (!(y_star > 0.0) || !(y_star < m.length()))
        throw std::invalid_argument("turning depth must lie inside (0, L)");
    if (m.warp.increment(y_star, -y_star) <= 0.0)
        throw Error(ErrorCode::no_turning_point, "warp does not descend to the requested depth");
    const double fp = m.warp.derivative(1, y_star);
    if (std::abs(fp) < kDegenerateSlope)
        throw Error(ErrorCode::degenerate_turning, "f'(y*) vanishes at the turning point");
    ChordGeometry g;
    g.y_star = y_star;
    g.c = std::sqrt(m.f(y_star));
    g.length = 2.0 * turning_segment(m, 0.0, y_star, false);
    g.delta_x = 2.0 * turning_segment(m, 0.0, y_star, true);
    return g;
}

std::pair<double, double> chord_same_side(const StripMetric& m, double c) {
    const double f0 = m.f(0.0);
    const double c2 = c * c;
    if (!(c2 < f0)) throw Error(ErrorCode::no_turning_point, "c^2 must be below f(0)");
    // First depth with f(y*) = c^2: coarse bracket, then bisection.
    const double L = m.length();
    const int n = 65536;
    double lo = 0.0, hi = -1.0;
    for (int i = 1; i <= n; ++i) {
        const double y = L * double(i) / n;
        if (m.f(y) - c2 <= 0.0) {
            hi = y;
            lo = L * double(i - 1) / n;
            break;
        }
    }
    if (hi < 0.0) throw Error(ErrorCode::no_turning_point, "f never descends to c^2");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (m.f(mid) - c2 > 0.0 ? lo : hi) = mid;
    }
    const ChordGeometry g = chord_from_depth(m, 0.5 * (lo + hi));
    return {g.length, c >= 0.0 ? g.delta_x : -g.delta_x};
}

ChordGeometry chord_for_separation(const StripMetric& m, double separation) {
    if (!(separation > 0.0)) throw std::invalid_argument("separation must be positive");
    const double cap = descending_cap(m);
    if (cap <= 0.0) throw Error(ErrorCode::no_chord, "boundary does not admit interior chords");
    const double rcap = std::sqrt(cap);

    auto disp = [&](double r) { return chord_from_depth(m, r * r).delta_x; };

    // Shallow chords satisfy separation ~ 4 sqrt(y*/|f'(0)|); use that to seed
    // the bracket in r = sqrt(y*).
    const double fp0 = std::abs(m.warp.derivative(1, 0.0));
    double r = 0.25 * separation * std::sqrt(std::max(fp0, 1e-3));
    r = std::min(std::max(r, 1e-150), 0.9 * rcap);

    double rlo = r, rhi = r;
    double glo = disp(rlo) - separation;
    double ghi = glo;
    for (int it = 0; glo > 0.0 && it < 600; ++it) {
        rhi = rlo;
        ghi = glo;
        rlo *= 0.5;
        if (rlo < 1e-160) throw Error(ErrorCode::no_chord, "bracketing failed toward zero depth");
        glo = disp(rlo) - separation;
    }
    for (int it = 0; ghi < 0.0 && it < 600; ++it) {
        rlo = rhi;
        glo = ghi;
        rhi *= 1.6;
        if (rhi >= rcap) {
            rhi = rcap * (1.0 - 1e-12);
            try {
                ghi = disp(rhi) - separation;
            } catch (const Error&) {
                throw Error(ErrorCode::no_chord, "no turning depth reaches the requested separation");
            }
            if (ghi < 0.0)
                throw Error(ErrorCode::no_chord, "no turning depth reaches the requested separation");
            break;
        }
        ghi = disp(rhi) - separation;
    }

    const double root = roots::solve_bracketed([&](double rr) { return disp(rr) - separation; },
                                                rlo, rhi, glo, ghi, 1e-15 * separation,
                                                1e-16 * rhi, 200);
    return chord_from_depth(m, root * root);
}

double chord_between(const StripMetric& m, double x1, double x2) {
    if (x1 == x2) return 0.0;
    return chord_for_separation(m, std::abs(x2 - x1)).length;
}

namespace {

// Branch solvers for interior_distance. Displacement-matching root problems
// over the Clairaut family; every solved branch yields a candidate length.

double monotone_disp(const StripMetric& m, double a, double b, double c) {
    auto g = [&](double y) {
        const double f = m.f(y);
        const double delta = std::max(f - c * c, 1e-300);
        return c / (std::sqrt(f) * std::sqrt(delta));
    };
    quad::Options opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    return quad::integrate(g, a, b, opt);
}

double monotone_length(const StripMetric& m, double a, double b, double c) {
    auto g = [&](double y) {
        const double f = m.f(y);
        const double delta = std::max(f - c * c, 1e-300);
        return std::sqrt(f / delta);
    };
    quad::Options opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    return quad::integrate(g, a, b, opt);
}

std::optional<double> monotone_branch(const StripMetric& m, double a, double b, double target) {
    double fmin = std::numeric_limits<double>::infinity();
    const int n = 256;
    for (int i = 0; i <= n; ++i) fmin = std::min(fmin, m.f(a + (b - a) * double(i) / n));
    // Truncated just below the grazing limit; displacements beyond this are
    // realized by the turning branches instead.
    const double cmax = std::sqrt(fmin) * (1.0 - 1e-9);
    const double ghi = monotone_disp(m, a, b, cmax) - target;
    if (ghi < 0.0) return std::nullopt;
    const double root = roots::solve_bracketed(
        [&](double c) { return monotone_disp(m, a, b, c) - target; }, 0.0, cmax, -target, ghi,
        1e-14 * std::max(target, 1e-6), 1e-15, 200);
    return monotone_length(m, a, b, root);
}

// One-turning branch. `above` turns beyond max(y1,y2), otherwise below
// min(y1,y2). Scans for a displacement bracket, then bisects.
std::optional<double> turning_branch(const StripMetric& m, double y1, double y2, double target,
                                     bool above) {
    const double a = std::min(y1, y2), b = std::max(y1, y2);
    const double L = m.length();
    const double edge = above ? b : a;
    const double limit = above ? L * (1.0 - 1e-9) : L * 1e-9;

    auto feasible = [&](double ys) {
        if (above ? (ys <= edge || ys > limit) : (ys >= edge || ys < limit)) return false;
        if (std::abs(m.warp.derivative(1, ys)) < kDegenerateSlope) return false;
        // f must stay above f(y*) between the endpoints and the turning depth.
        const double lo = above ? a : ys, hi = above ? ys : b;
        const int n = 64;
        for (int i = 0; i < n; ++i) {
            const double y = lo + (hi - lo) * double(i) / n;
            if (y != ys && m.warp.increment(ys, y - ys) <= 0.0) return false;
        }
        return true;
    };
    auto disp = [&](double ys) {
        return turning_segment(m, y1, ys, true) + turning_segment(m, y2, ys, true);
    };
    auto len = [&](double ys) {
        return turning_segment(m, y1, ys, false) + turning_segment(m, y2, ys, false);
    };

    const double span = std::abs(limit - edge);
    if (span <= 0.0) return std::nullopt;
    double prev_ys = 0.0, prev_g = 0.0;
    bool have_prev = false;
    double blo = 0.0, bhi = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= 64 && !bracketed; ++i) {
        // Geometric scan resolves both shallow and deep turning depths.
        const double frac = std::pow(2.0, double(i - 64) / 4.5);
        const double ys = above ? edge + span * frac : edge - span * frac;
        if (!feasible(ys)) {
            have_prev = false;
            continue;
        }
        const double g = disp(ys) - target;
        if (have_prev && g * prev_g <= 0.0) {
            blo = prev_ys;
            bhi = ys;
            bracketed = true;
            break;
        }
        // Shallow limit: displacement tends to zero with the depth.
        if (!have_prev && g >= 0.0 && i <= 60) {
            blo = above ? edge + span * 1e-14 : edge - span * 1e-14;
            bhi = ys;
            if (feasible(blo) && (disp(blo) - target) * g <= 0.0) {
                bracketed = true;
                break;
            }
        }
        prev_ys = ys;
        prev_g = g;
        have_prev = true;
    }
    if (!bracketed) return std::nullopt;

    const double glo = disp(blo) - target;
    const double ghi = disp(bhi) - target;
    if (glo * ghi > 0.0) return std::nullopt;
    const double root = roots::solve_bracketed([&](double ys) { return disp(ys) - target; }, blo,
                                               bhi, glo, ghi, 1e-14 * std::max(target, 1e-6),
                                               1e-15, 200);
    return len(root);
}

}  // namespace

double interior_distance(const StripMetric& m, const Point2& p, const Point2& q) {
    const double L = m.length();
    if (p.y < 0.0 || p.y > L || q.y < 0.0 || q.y > L)
        throw std::invalid_argument("interior_distance: point outside the strip");
    if (p.x == q.x && p.y == q.y) return 0.0;

    const double D = std::abs(q.x - p.x);
    if (D == 0.0) return std::abs(q.y - p.y);  // vertical geodesic

    std::vector<double> candidates;
    const double a = std::min(p.y, q.y), b = std::max(p.y, q.y);
    if (a < b) {
        if (auto c = monotone_branch(m, a, b, D)) candidates.push_back(*c);
    } else if (std::abs(m.warp.derivative(1, a)) < 1e-10) {
        candidates.push_back(std::sqrt(m.f(a)) * D);  // horizontal geodesic at a critical height
    }
    if (auto c = turning_branch(m, p.y, q.y, D, true)) candidates.push_back(*c);
    if (auto c = turning_branch(m, p.y, q.y, D, false)) candidates.push_back(*c);

    if (candidates.empty())
        throw Error(ErrorCode::shooting_failed, "no connecting geodesic found in the family");
    return *std::min_element(candidates.begin(), candidates.end());
}

HessianCheck hessian_rho_check(const StripMetric& m, const Point2& p, double vx, double vy,
                               double h) {
    const double lhs = 2.0 * (m.f(p.y) * vx * vx + vy * vy);
    const Point2 plus{p.x + h * vx, p.y + h * vy};
    const Point2 minus{p.x - h * vx, p.y - h * vy};
    const double rp = interior_distance(m, plus, p);
    const double rm = interior_distance(m, minus, p);
    const double rhs = (rp * rp + rm * rm) / (h * h);
    return {lhs, rhs};
}

}  // namespace lensjet
