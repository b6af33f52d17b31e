#pragma once

#include <cmath>
#include <functional>

namespace lensjet {
namespace fd {

// Central differences with one Richardson level (h, h/2). The h^2 truncation
// term cancels, leaving O(h^4) for smooth functions.

template <class F>
inline double d1_central(const F& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <class F>
inline double d1_richardson(const F& f, double x, double h) {
    const double coarse = d1_central(f, x, h);
    const double fine = d1_central(f, x, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

template <class F>
inline double d2_central(const F& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

template <class F>
inline double d2_richardson(const F& f, double x, double h) {
    const double coarse = d2_central(f, x, h);
    const double fine = d2_central(f, x, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

// Second-order one-sided first derivative at a domain edge (nodes x, x+h, x+2h).
template <class F>
inline double d1_one_sided(const F& f, double x, double h) {
    return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
}

// Second-order one-sided second derivative (nodes x..x+3h).
template <class F>
inline double d2_one_sided(const F& f, double x, double h) {
    return (2.0 * f(x) - 5.0 * f(x + h) + 4.0 * f(x + 2.0 * h) - f(x + 3.0 * h)) / (h * h);
}

// Second-order one-sided third derivative (nodes x..x+4h).
template <class F>
inline double d3_one_sided(const F& f, double x, double h) {
    return (-2.5 * f(x) + 9.0 * f(x + h) - 12.0 * f(x + 2.0 * h) + 7.0 * f(x + 3.0 * h) -
            1.5 * f(x + 4.0 * h)) /
           (h * h * h);
}

}  // namespace fd
}  // namespace lensjet
