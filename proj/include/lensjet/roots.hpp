#pragma once

#include <cmath>
#include <stdexcept>

namespace lensjet {
namespace roots {

// Illinois-type false position on a sign-changing bracket. The stagnant-side
// down-weighting avoids the one-sided crawl of plain regula falsi on convex
// functions. Stops on |g| <= gtol or bracket width <= xtol.
template <class F>
inline double solve_bracketed(const F& g, double a, double b, double ga, double gb, double gtol,
                              double xtol, int max_iter = 200) {
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    if ((ga > 0.0) == (gb > 0.0)) throw std::invalid_argument("solve_bracketed: no sign change");
    int last_side = 0;
    double x = 0.5 * (a + b);
    for (int it = 0; it < max_iter; ++it) {
        const double denom = gb - ga;
        x = (denom != 0.0) ? (a * gb - b * ga) / denom : 0.5 * (a + b);
        if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
        const double gx = g(x);
        if (std::abs(gx) <= gtol || std::abs(b - a) <= xtol) return x;
        if ((gx > 0.0) == (gb > 0.0)) {
            b = x;
            gb = gx;
            if (last_side == +1) ga *= 0.5;
            last_side = +1;
        } else {
            a = x;
            ga = gx;
            if (last_side == -1) gb *= 0.5;
            last_side = -1;
        }
    }
    return x;
}

}  // namespace roots
}  // namespace lensjet
