#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

#include "lensjet/errors.hpp"

namespace lensjet {
namespace ode {

// Dormand-Prince 5(4) with the standard quartic dense output. Good enough for
// trajectory accuracy ~1e-10 at rtol 1e-11 on smooth systems.
template <std::size_t N>
class Dopri5 {
public:
    using State = std::array<double, N>;
    using Rhs = std::function<void(double, const State&, State&)>;

    struct Step {
        double t0, h;
        State y0, y1;
        std::array<State, 5> rcont;

        void dense(double theta, State& out) const {
            const double th1 = 1.0 - theta;
            for (std::size_t i = 0; i < N; ++i) {
                out[i] = rcont[0][i] +
                         theta * (rcont[1][i] +
                                  th1 * (rcont[2][i] + theta * (rcont[3][i] + th1 * rcont[4][i])));
            }
        }
    };

    Dopri5(Rhs rhs, double rtol, double atol) : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

    void start(double t, const State& y, double h_init = 1e-3) {
        t_ = t;
        y_ = y;
        h_ = h_init;
        rhs_(t_, y_, k1_);
        have_k1_ = true;
    }

    double time() const { return t_; }
    const State& state() const { return y_; }

    // Advance one accepted step; fills `step` with dense-output data.
    void advance(Step& step) {
        static const double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
        static const double a21 = 1.0 / 5.0;
        static const double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        static const double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        static const double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
        static const double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
        static const double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
        static const double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
        static const double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

        if (!have_k1_) {
            rhs_(t_, y_, k1_);
            have_k1_ = true;
        }
        State k2, k3, k4, k5, k6, k7, yt, y1, err;
        for (int attempt = 0; attempt < 400; ++attempt) {
            const double h = h_;
            if (!(std::abs(h) > 1e-14 * std::max(1.0, std::abs(t_))))
                throw Error(ErrorCode::tolerance_failure, "step size underflow");
            for (std::size_t i = 0; i < N; ++i) yt[i] = y_[i] + h * a21 * k1_[i];
            rhs_(t_ + c2 * h, yt, k2);
            for (std::size_t i = 0; i < N; ++i) yt[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
            rhs_(t_ + c3 * h, yt, k3);
            for (std::size_t i = 0; i < N; ++i)
                yt[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
            rhs_(t_ + c4 * h, yt, k4);
            for (std::size_t i = 0; i < N; ++i)
                yt[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            rhs_(t_ + c5 * h, yt, k5);
            for (std::size_t i = 0; i < N; ++i)
                yt[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                     a65 * k5[i]);
            rhs_(t_ + h, yt, k6);
            for (std::size_t i = 0; i < N; ++i)
                y1[i] = y_[i] + h * (b1 * k1_[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            rhs_(t_ + h, y1, k7);

            double err_norm = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                err[i] = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
                const double sk = atol_ + rtol_ * std::max(std::abs(y_[i]), std::abs(y1[i]));
                const double r = err[i] / sk;
                err_norm += r * r;
            }
            err_norm = std::sqrt(err_norm / double(N));

            const double order_root = 0.2;
            double fac = 0.9 * std::pow(std::max(err_norm, 1e-32), -order_root);
            fac = std::min(5.0, std::max(0.2, fac));
            if (err_norm <= 1.0) {
                step.t0 = t_;
                step.h = h;
                step.y0 = y_;
                step.y1 = y1;
                for (std::size_t i = 0; i < N; ++i) {
                    const double ydiff = y1[i] - y_[i];
                    const double bspl = h * k1_[i] - ydiff;
                    step.rcont[0][i] = y_[i];
                    step.rcont[1][i] = ydiff;
                    step.rcont[2][i] = bspl;
                    step.rcont[3][i] = ydiff - h * k7[i] - bspl;
                    step.rcont[4][i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                            d6 * k6[i] + d7 * k7[i]);
                }
                t_ += h;
                y_ = y1;
                k1_ = k7;  // FSAL
                h_ = h * fac;
                return;
            }
            h_ = h * fac;
        }
        throw Error(ErrorCode::tolerance_failure, "step control failed to find acceptable step");
    }

private:
    Rhs rhs_;
    double rtol_, atol_;
    double t_ = 0.0, h_ = 1e-3;
    State y_{};
    State k1_{};
    bool have_k1_ = false;
};

}  // namespace ode
}  // namespace lensjet
