#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lensjet {

// Truncated Taylor polynomial with coefficients c[k] = f^(k)(y0)/k!.
// Arithmetic on these propagates derivatives of any order through composed
// expressions, which is how the non-closed-form warp profiles expose exact
// higher derivatives.
class Taylor {
public:
    Taylor() : c_(1, 0.0) {}
    explicit Taylor(double constant, std::size_t order = 0) : c_(order + 1, 0.0) { c_[0] = constant; }

    // The expansion variable itself: value + unit first derivative.
    static Taylor variable(double value, std::size_t order) {
        Taylor t(value, order);
        if (order >= 1) t.c_[1] = 1.0;
        return t;
    }

    std::size_t order() const { return c_.size() - 1; }
    double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
    double& coeff(std::size_t k) { return c_[k]; }
    double value() const { return c_[0]; }
    double derivative(std::size_t k) const {
        double fact = 1.0;
        for (std::size_t i = 2; i <= k; ++i) fact *= double(i);
        return (*this)[k] * fact;
    }

    friend Taylor operator+(const Taylor& a, const Taylor& b) {
        Taylor r(0.0, std::max(a.order(), b.order()));
        for (std::size_t k = 0; k <= r.order(); ++k) r.c_[k] = a[k] + b[k];
        return r;
    }
    friend Taylor operator-(const Taylor& a, const Taylor& b) {
        Taylor r(0.0, std::max(a.order(), b.order()));
        for (std::size_t k = 0; k <= r.order(); ++k) r.c_[k] = a[k] - b[k];
        return r;
    }
    friend Taylor operator-(const Taylor& a) {
        Taylor r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend Taylor operator*(const Taylor& a, const Taylor& b) {
        Taylor r(0.0, std::max(a.order(), b.order()));
        for (std::size_t k = 0; k <= r.order(); ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j <= k; ++j) s += a[j] * b[k - j];
            r.c_[k] = s;
        }
        return r;
    }
    friend Taylor operator/(const Taylor& a, const Taylor& b) {
        if (b[0] == 0.0) throw std::domain_error("Taylor division by series with zero constant term");
        Taylor r(0.0, std::max(a.order(), b.order()));
        for (std::size_t k = 0; k <= r.order(); ++k) {
            double s = a[k];
            for (std::size_t j = 1; j <= k; ++j) s -= b[j] * r.c_[k - j];
            r.c_[k] = s / b[0];
        }
        return r;
    }
    friend Taylor operator+(const Taylor& a, double s) { return a + Taylor(s, a.order()); }
    friend Taylor operator+(double s, const Taylor& a) { return a + s; }
    friend Taylor operator-(const Taylor& a, double s) { return a - Taylor(s, a.order()); }
    friend Taylor operator-(double s, const Taylor& a) { return Taylor(s, a.order()) - a; }
    friend Taylor operator*(const Taylor& a, double s) {
        Taylor r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    friend Taylor operator*(double s, const Taylor& a) { return a * s; }
    friend Taylor operator/(const Taylor& a, double s) { return a * (1.0 / s); }
    friend Taylor operator/(double s, const Taylor& a) { return Taylor(s, a.order()) / a; }

    friend Taylor exp(const Taylor& a) {
        Taylor r(0.0, a.order());
        r.c_[0] = std::exp(a[0]);
        for (std::size_t k = 1; k <= r.order(); ++k) {
            double s = 0.0;
            for (std::size_t j = 1; j <= k; ++j) s += double(j) * a[j] * r.c_[k - j];
            r.c_[k] = s / double(k);
        }
        return r;
    }

    friend void sincos(const Taylor& a, Taylor& s, Taylor& c) {
        s = Taylor(0.0, a.order());
        c = Taylor(0.0, a.order());
        s.c_[0] = std::sin(a[0]);
        c.c_[0] = std::cos(a[0]);
        for (std::size_t k = 1; k <= a.order(); ++k) {
            double ss = 0.0, cc = 0.0;
            for (std::size_t j = 1; j <= k; ++j) {
                ss += double(j) * a[j] * c.c_[k - j];
                cc -= double(j) * a[j] * s.c_[k - j];
            }
            s.c_[k] = ss / double(k);
            c.c_[k] = cc / double(k);
        }
    }
    friend Taylor sin(const Taylor& a) {
        Taylor s, c;
        sincos(a, s, c);
        return s;
    }
    friend Taylor cos(const Taylor& a) {
        Taylor s, c;
        sincos(a, s, c);
        return c;
    }
    friend Taylor tanh(const Taylor& a) {
        Taylor e = exp(a * 2.0);
        return (e - 1.0) / (e + 1.0);
    }
    friend Taylor sqrt(const Taylor& a) {
        if (a[0] <= 0.0) throw std::domain_error("Taylor sqrt of non-positive constant term");
        Taylor r(0.0, a.order());
        r.c_[0] = std::sqrt(a[0]);
        for (std::size_t k = 1; k <= r.order(); ++k) {
            double s = a[k];
            for (std::size_t j = 1; j + 1 <= k; ++j) s -= r.c_[j] * r.c_[k - j];
            r.c_[k] = s / (2.0 * r.c_[0]);
        }
        return r;
    }

    // Reciprocal series of a power series given by derivative values g^(k)(0).
    // Returns derivative values of 1/g. Used to turn metric jets into
    // inverse-metric jets.
    static std::vector<double> reciprocal_derivatives(const std::vector<double>& g_derivs) {
        std::size_t n = g_derivs.size();
        Taylor g(0.0, n - 1);
        double fact = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k > 1) fact *= double(k);
            g.coeff(k) = g_derivs[k] / (k <= 1 ? 1.0 : fact);
        }
        Taylor inv = 1.0 / g;
        std::vector<double> out(n);
        for (std::size_t k = 0; k < n; ++k) out[k] = inv.derivative(k);
        return out;
    }

private:
    std::vector<double> c_;
};

}  // namespace lensjet
