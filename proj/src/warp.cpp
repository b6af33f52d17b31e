#include "lensjet/warp.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lensjet/errors.hpp"

namespace lensjet {

namespace {

constexpr double kDomainSlack = 1e-9;
constexpr int kScanPoints = 32769;

// Odd-part Taylor evaluation of f(y+dy) - f(y) = f(m+d) - f(m-d) from exact
// derivatives at the midpoint m = y + dy/2. Falls back to direct subtraction
// when the series does not settle.
double taylor_increment(const WarpFunction::Analytic& a, double y, double dy) {
    if (dy == 0.0) return 0.0;
    const double m = y + 0.5 * dy;
    const double d = 0.5 * dy;
    double term = a.derivative(1, m) * d;
    double sum = term;
    double dk = d;
    double fact = 1.0;
    for (int k = 3; k <= 29; k += 2) {
        dk *= d * d;
        fact *= double(k - 1) * double(k);
        term = a.derivative(k, m) * dk / fact;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) return 2.0 * sum;
    }
    return a.value(y + dy) - a.value(y);
}

}  // namespace

WarpFunction WarpFunction::analytic(std::string name, double length, Analytic spec) {
    if (!(length > 0.0)) throw std::invalid_argument("warp length must be positive");
    WarpFunction w;
    w.name_ = std::move(name);
    w.length_ = length;
    w.analytic_ = std::make_shared<Analytic>(std::move(spec));
    w.validate_positive();
    return w;
}

WarpFunction WarpFunction::sampled(std::string name, double length, std::vector<double> ys,
                                   std::vector<double> fs) {
    if (!(length > 0.0)) throw std::invalid_argument("warp length must be positive");
    if (ys.size() != fs.size() || ys.size() < 2)
        throw std::invalid_argument("sampled warp needs >= 2 matching points");
    for (std::size_t i = 0; i + 1 < ys.size(); ++i)
        if (!(ys[i] < ys[i + 1])) throw std::invalid_argument("sampled warp grid not strictly increasing");
    if (std::abs(ys.front()) > 1e-12 || std::abs(ys.back() - length) > 1e-12)
        throw std::invalid_argument("sampled warp grid must cover [0, L] exactly");
    WarpFunction w;
    w.name_ = std::move(name);
    w.length_ = length;
    w.grid_ = ys;
    w.values_ = fs;
    w.sampled_ = std::make_shared<MonotoneCubic>(std::move(ys), std::move(fs));
    w.validate_positive();
    return w;
}

double WarpFunction::clamp_domain(double y, const char* who) const {
    // Evaluation tolerates moderate overshoot so that adaptive integrator
    // trial stages near a boundary stay defined; analytic profiles extend
    // naturally and sampled ones extrapolate with their end cells. Strict
    // domain errors belong to the metric-level operations.
    const double slack = 0.25 * length_ + kDomainSlack;
    if (y < -slack || y > length_ + slack)
        throw std::invalid_argument(std::string(who) + ": y outside [0, L]");
    return y;
}

void WarpFunction::validate_positive() const {
    for (int i = 0; i < kScanPoints; ++i) {
        const double y = length_ * double(i) / double(kScanPoints - 1);
        if (!(value(y) > 0.0)) throw std::invalid_argument("warp must be positive on [0, L]");
    }
}

double WarpFunction::value(double y) const {
    y = clamp_domain(y, "WarpFunction::value");
    return analytic_ ? analytic_->value(y) : (*sampled_)(y);
}

double WarpFunction::derivative(int k, double y) const {
    if (k < 0) throw std::invalid_argument("derivative order must be >= 0");
    if (k == 0) return value(y);
    y = clamp_domain(y, "WarpFunction::derivative");
    if (analytic_) return analytic_->derivative(k, y);
    if (k == 1) return sampled_->derivative(y);
    if (k == 2) return sampled_->second_derivative(y);
    throw Error(ErrorCode::bad_order, "sampled warps support derivatives up to order 2");
}

double WarpFunction::increment(double y, double dy) const {
    y = clamp_domain(y, "WarpFunction::increment");
    if (analytic_) {
        if (analytic_->increment) return analytic_->increment(y, dy);
        return taylor_increment(*analytic_, y, dy);
    }
    return (*sampled_)(std::min(std::max(y + dy, 0.0), length_)) - (*sampled_)(y);
}

double WarpFunction::min_value() const {
    if (std::isnan(min_cache_)) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        if (sampled_) {
            // Shape preservation keeps the interpolant inside the sample range.
            for (double v : values_) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        } else {
            for (int i = 0; i < kScanPoints; ++i) {
                const double v = value(length_ * double(i) / double(kScanPoints - 1));
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        min_cache_ = lo;
        max_cache_ = hi;
    }
    return min_cache_;
}

double WarpFunction::max_value() const {
    min_value();
    return max_cache_;
}

const std::vector<double>& WarpFunction::sample_grid() const {
    if (!sampled_) throw std::invalid_argument("not a sampled warp");
    return grid_;
}

const std::vector<double>& WarpFunction::sample_values() const {
    if (!sampled_) throw std::invalid_argument("not a sampled warp");
    return values_;
}

WarpFunction make_flat_warp(double length) {
    WarpFunction::Analytic a;
    a.value = [](double) { return 1.0; };
    a.derivative = [](int, double) { return 0.0; };
    a.increment = [](double, double) { return 0.0; };
    return WarpFunction::analytic("flat", length, std::move(a));
}

WarpFunction make_cos_warp(int frequency) {
    const double k = double(frequency);
    WarpFunction::Analytic a;
    a.value = [k](double y) { return 2.0 - std::cos(k * y); };
    a.derivative = [k](int n, double y) {
        // d^n/dy^n (2 - cos ky) = -k^n cos(ky + n pi/2)
        const double kn = std::pow(k, n);
        switch (n % 4) {
            case 0: return -kn * std::cos(k * y);
            case 1: return kn * std::sin(k * y);
            case 2: return kn * std::cos(k * y);
            default: return -kn * std::sin(k * y);
        }
    };
    a.increment = [k](double y, double dy) {
        // cos(ky) - cos(k(y+dy)) = 2 sin(k(y + dy/2)) sin(k dy/2)
        return 2.0 * std::sin(k * (y + 0.5 * dy)) * std::sin(0.5 * k * dy);
    };
    return WarpFunction::analytic(frequency == 1 ? "cos1" : (frequency == 2 ? "cos2" : "cosN"),
                                  2.0 * M_PI, std::move(a));
}

WarpFunction make_exp_decay_warp(double length, double scale) {
    WarpFunction::Analytic a;
    a.value = [scale](double y) { return scale * std::exp(-y); };
    a.derivative = [scale](int n, double y) {
        const double v = scale * std::exp(-y);
        return (n % 2 == 0) ? v : -v;
    };
    a.increment = [scale](double y, double dy) {
        return scale * std::exp(-y) * std::expm1(-dy);
    };
    return WarpFunction::analytic(scale == 1.0 ? "exp-decay" : "exp-decay-scaled", length,
                                  std::move(a));
}

WarpFunction make_poly_decay_warp(double length) {
    if (!(length < 1.0)) throw std::invalid_argument("(1-y)^2 warp needs L < 1 for positivity");
    WarpFunction::Analytic a;
    a.value = [](double y) { return (1.0 - y) * (1.0 - y); };
    a.derivative = [](int n, double y) {
        if (n == 1) return -2.0 * (1.0 - y);
        if (n == 2) return 2.0;
        return 0.0;
    };
    a.increment = [](double y, double dy) { return -(2.0 - 2.0 * y - dy) * dy; };
    return WarpFunction::analytic("poly-decay", length, std::move(a));
}

WarpFunction make_tanh_warp(double length) {
    // d^n/dy^n tanh represented as a polynomial in t = tanh y via
    // P_{n+1}(t) = P_n'(t) (1 - t^2), P_1 = 1 - t^2.
    auto tanh_derivative = [](int n, double y) {
        std::vector<double> p = {1.0, 0.0, -1.0};  // 1 - t^2
        for (int k = 1; k < n; ++k) {
            std::vector<double> dp(p.size() >= 1 ? p.size() - 1 : 0, 0.0);
            for (std::size_t j = 1; j < p.size(); ++j) dp[j - 1] = double(j) * p[j];
            std::vector<double> np(dp.size() + 2, 0.0);
            for (std::size_t j = 0; j < dp.size(); ++j) {
                np[j] += dp[j];
                np[j + 2] -= dp[j];
            }
            p = std::move(np);
        }
        const double t = std::tanh(y);
        double v = 0.0;
        for (std::size_t j = p.size(); j-- > 0;) v = v * t + p[j];
        return v;
    };
    WarpFunction::Analytic a;
    a.value = [](double y) { return 1.0 - std::tanh(y); };
    a.derivative = [tanh_derivative](int n, double y) { return -tanh_derivative(n, y); };
    a.increment = [](double y, double dy) {
        // tanh y - tanh(y+dy) = -sinh(dy) / (cosh y cosh(y+dy))
        return -std::sinh(dy) / (std::cosh(y) * std::cosh(y + dy));
    };
    return WarpFunction::analytic("one-minus-tanh", length, std::move(a));
}

WarpFunction WarpFunction::preset(const std::string& name, std::optional<double> length) {
    if (name == "flat") return make_flat_warp(length.value_or(2.0 * M_PI));
    if (name == "cos1") return make_cos_warp(1);
    if (name == "cos2") return make_cos_warp(2);
    if (name == "exp-decay") return make_exp_decay_warp(length.value_or(1.0));
    if (name == "sec5-f1") return section5_f1_preset();
    if (name == "sec5-f2") return section5_f2_preset();
    throw std::invalid_argument("unknown warp preset: " + name);
}

nlohmann::json WarpFunction::to_json() const {
    nlohmann::json j;
    if (sampled_) {
        j["kind"] = "sampled";
        j["L"] = length_;
        nlohmann::json pts = nlohmann::json::array();
        for (std::size_t i = 0; i < grid_.size(); ++i) pts.push_back({grid_[i], values_[i]});
        j["points"] = std::move(pts);
    } else {
        j["kind"] = "preset";
        j["name"] = name_;
        j["L"] = length_;
    }
    return j;
}

WarpFunction WarpFunction::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "preset") {
        std::optional<double> L;
        if (j.contains("L")) L = j.at("L").get<double>();
        const std::string name = j.at("name").get<std::string>();
        WarpFunction w = preset(name, L);
        if (L && std::abs(*L - w.length()) > 1e-12 && name != "flat" && name != "exp-decay")
            throw std::invalid_argument("preset " + name + " has fixed length");
        return w;
    }
    if (kind == "sampled") {
        const double L = j.at("L").get<double>();
        std::vector<double> ys, fs;
        for (const auto& p : j.at("points")) {
            ys.push_back(p.at(0).get<double>());
            fs.push_back(p.at(1).get<double>());
        }
        return sampled("sampled", L, std::move(ys), std::move(fs));
    }
    throw std::invalid_argument("warp json kind must be 'preset' or 'sampled'");
}

}  // namespace lensjet
