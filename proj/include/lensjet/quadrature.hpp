#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

#include "lensjet/errors.hpp"

namespace lensjet {
namespace quad {

// 15-point Gauss-Kronrod rule with embedded 7-point Gauss error estimate.
// Nodes are interior, so integrands with removable endpoint behaviour are
// never evaluated at the endpoints.
template <class F>
inline double gk15(const F& f, double a, double b, double& err) {
    static const double xgk[8] = {
        0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
        0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
    static const double wgk[8] = {
        0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
        0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
    static const double wg[4] = {
        0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

    const double mid = 0.5 * (a + b);
    const double hlf = 0.5 * (b - a);

    const double fc = f(mid);
    double k15 = wgk[7] * fc;
    double g7 = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = hlf * xgk[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        k15 += wgk[i] * fsum;
        if (i % 2 == 1) g7 += wg[i / 2] * fsum;
    }
    k15 *= hlf;
    g7 *= hlf;
    err = std::abs(k15 - g7);
    return k15;
}

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-13;
    std::size_t max_intervals = 20000;
};

// Globally adaptive bisection driven by the worst-interval error.
template <class F>
inline double integrate(const F& f, double a, double b, const Options& opt = {}) {
    if (a == b) return 0.0;
    struct Seg {
        double a, b, val, err;
        bool operator<(const Seg& o) const { return err < o.err; }
    };
    std::priority_queue<Seg> segs;
    double err0 = 0.0;
    double total = gk15(f, a, b, err0);
    double total_err = err0;
    segs.push({a, b, total, err0});

    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (segs.size() >= opt.max_intervals) {
            throw Error(ErrorCode::tolerance_failure, "adaptive quadrature ran out of intervals");
        }
        Seg worst = segs.top();
        segs.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (m <= worst.a || m >= worst.b) {
            throw Error(ErrorCode::tolerance_failure, "adaptive quadrature interval underflow");
        }
        double e1 = 0.0, e2 = 0.0;
        const double v1 = gk15(f, worst.a, m, e1);
        const double v2 = gk15(f, m, worst.b, e2);
        total += (v1 + v2) - worst.val;
        total_err += (e1 + e2) - worst.err;
        segs.push({worst.a, m, v1, e1});
        segs.push({m, worst.b, v2, e2});
    }
    return total;
}

// Sum of per-cell rules over a strictly increasing knot sequence. Intended for
// piecewise-polynomial integrands (interpolated warps), where each cell is
// smooth and a single rule per cell is accurate.
template <class F>
inline double integrate_cells(const F& f, const std::vector<double>& knots) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double err = 0.0;
        const double v = gk15(f, knots[i], knots[i + 1], err);
        // Kahan summation keeps the many-cell totals at machine accuracy.
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace quad
}  // namespace lensjet
