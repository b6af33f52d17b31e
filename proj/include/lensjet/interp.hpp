#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lensjet {

// Shape-preserving piecewise cubic (Fritsch-Carlson slopes). Monotone data
// produce a monotone interpolant; flat runs stay exactly flat.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 matching points");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1])) throw std::invalid_argument("MonotoneCubic: grid not strictly increasing");

        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        d_.assign(n, 0.0);
        if (n == 2) {
            d_[0] = d_[1] = delta[0];
        } else {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                if (delta[i - 1] == 0.0 || delta[i] == 0.0 || (delta[i - 1] > 0) != (delta[i] > 0)) {
                    d_[i] = 0.0;
                } else {
                    const double w1 = 2.0 * h[i] + h[i - 1];
                    const double w2 = h[i] + 2.0 * h[i - 1];
                    d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
    }

    double operator()(double x) const { return eval(x, 0); }
    double derivative(double x) const { return eval(x, 1); }
    double second_derivative(double x) const { return eval(x, 2); }

    const std::vector<double>& grid() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    static double end_slope(double h0, double h1, double d0, double d1) {
        // Three-point estimate with the usual shape-preserving clamps.
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0)
            d = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0))
            d = 3.0 * d0;
        return d;
    }

    double eval(double x, int deriv) const {
        const std::size_t n = x_.size();
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
        if (i == 0) i = 1;
        if (i >= n) i = n - 1;
        --i;
        const double h = x_[i + 1] - x_[i];
        const double t = x - x_[i];
        const double dy = y_[i + 1] - y_[i];
        // Hermite cubic on the cell in coefficients of t.
        const double c2 = (3.0 * dy / h - 2.0 * d_[i] - d_[i + 1]) / h;
        const double c3 = (d_[i] + d_[i + 1] - 2.0 * dy / h) / (h * h);
        switch (deriv) {
            case 0: return y_[i] + t * (d_[i] + t * (c2 + t * c3));
            case 1: return d_[i] + t * (2.0 * c2 + 3.0 * t * c3);
            default: return 2.0 * c2 + 6.0 * t * c3;
        }
    }

    std::vector<double> x_, y_, d_;
};

// Natural/not-a-knot cubic spline via second-derivative moments.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y, bool not_a_knot = true)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >= 2 matching points");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1])) throw std::invalid_argument("CubicSpline: grid not strictly increasing");
        m_.assign(n, 0.0);
        if (n == 2) return;
        const bool nak = not_a_knot && n >= 4;

        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

        // Tridiagonal system for interior moments; boundary rows either
        // natural (m=0) or not-a-knot (third derivative continuous).
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            a[i] = h[i - 1] / 6.0;
            b[i] = (h[i - 1] + h[i]) / 3.0;
            c[i] = h[i] / 6.0;
            r[i] = (y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1];
        }
        if (nak) {
            // m0 expressed through m1, m2 and m_{n-1} through m_{n-2}, m_{n-3}.
            b[0] = 1.0;
            c[0] = -(1.0 + h[0] / h[1]);
            r[0] = 0.0;
            double extra0 = h[0] / h[1];
            a[n - 1] = -(1.0 + h[n - 2] / h[n - 3]);
            b[n - 1] = 1.0;
            r[n - 1] = 0.0;
            double extraN = h[n - 2] / h[n - 3];
            solve_with_corners(a, b, c, r, extra0, extraN);
            return;
        }
        b[0] = b[n - 1] = 1.0;
        solve_tridiag(a, b, c, r);
    }

    double operator()(double x) const { return eval(x, 0); }
    double derivative(double x) const { return eval(x, 1); }

private:
    void solve_tridiag(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                       std::vector<double> r) {
        const std::size_t n = b.size();
        for (std::size_t i = 1; i < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            r[i] -= w * r[i - 1];
        }
        m_[n - 1] = r[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
    }

    void solve_with_corners(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                            std::vector<double> r, double corner0, double cornerN) {
        // Row 0 couples m2 with weight corner0, row n-1 couples m_{n-3} with
        // weight cornerN. Eliminate those two entries, then run Thomas.
        const std::size_t n = b.size();
        // Use row 1 to remove the m2 term from row 0.
        {
            const double w = corner0 / c[1];
            b[0] -= w * a[1];
            c[0] -= w * b[1];
            r[0] -= w * r[1];
        }
        {
            const double w = cornerN / a[n - 2];
            a[n - 1] -= w * b[n - 2];
            b[n - 1] -= w * c[n - 2];
            r[n - 1] -= w * r[n - 2];
        }
        solve_tridiag(a, b, c, r);
    }

    double eval(double x, int deriv) const {
        const std::size_t n = x_.size();
        if (n == 2) {
            const double slope = (y_[1] - y_[0]) / (x_[1] - x_[0]);
            return deriv == 0 ? y_[0] + slope * (x - x_[0]) : slope;
        }
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
        if (i == 0) i = 1;
        if (i >= n) i = n - 1;
        --i;
        const double h = x_[i + 1] - x_[i];
        const double u = x - x_[i];
        const double v = x_[i + 1] - x;
        if (deriv == 0) {
            return (m_[i] * v * v * v + m_[i + 1] * u * u * u) / (6.0 * h) +
                   (y_[i] / h - m_[i] * h / 6.0) * v + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * u;
        }
        return (-m_[i] * v * v + m_[i + 1] * u * u) / (2.0 * h) -
               (y_[i] / h - m_[i] * h / 6.0) + (y_[i + 1] / h - m_[i + 1] * h / 6.0);
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace lensjet
