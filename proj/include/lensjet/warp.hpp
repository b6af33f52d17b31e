#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lensjet/interp.hpp"

namespace lensjet {

// Profile f(y) on [0, L] defining the strip metric f(y) dx^2 + dy^2.
// Analytic profiles expose exact derivatives of any order and a
// cancellation-safe difference f(a) - f(b); interpolated (sampled) profiles
// support derivatives up to order 2 only.
class WarpFunction {
public:
    struct Analytic {
        std::function<double(double)> value;
        std::function<double(int, double)> derivative;       // k-th derivative, k >= 1
        std::function<double(double, double)> increment;     // f(y + dy) - f(y); optional
    };

    static WarpFunction analytic(std::string name, double length, Analytic spec);
    static WarpFunction sampled(std::string name, double length, std::vector<double> ys,
                                std::vector<double> fs);

    // Built-in profiles: "flat", "cos1" (2 - cos y, L = 2*pi),
    // "cos2" (2 - cos 2y, L = 2*pi), "exp-decay" (e^-y, L configurable),
    // "sec5-f1", "sec5-f2" (L = 14). flat and exp-decay accept an optional L.
    static WarpFunction preset(const std::string& name, std::optional<double> length = std::nullopt);

    const std::string& name() const { return name_; }
    double length() const { return length_; }
    bool is_sampled() const { return sampled_ != nullptr; }
    int max_derivative_order() const {
        return is_sampled() ? 2 : std::numeric_limits<int>::max();
    }

    double value(double y) const;
    double derivative(int k, double y) const;
    // f(y + dy) - f(y), evaluated without catastrophic cancellation for
    // small dy. The increment dy enters exactly, not as a difference of two
    // rounded endpoints.
    double increment(double y, double dy) const;
    // f(a) - f(b); convenience wrapper over increment().
    double difference(double a, double b) const { return increment(b, a - b); }

    double min_value() const;
    double max_value() const;

    // Sampled-profile access (throws for analytic profiles).
    const std::vector<double>& sample_grid() const;
    const std::vector<double>& sample_values() const;

    nlohmann::json to_json() const;
    static WarpFunction from_json(const nlohmann::json& j);

private:
    WarpFunction() = default;
    double clamp_domain(double y, const char* who) const;
    void validate_positive() const;

    std::string name_;
    double length_ = 0.0;
    std::shared_ptr<Analytic> analytic_;
    std::shared_ptr<MonotoneCubic> sampled_;
    std::vector<double> grid_, values_;
    mutable double min_cache_ = std::numeric_limits<double>::quiet_NaN();
    mutable double max_cache_ = std::numeric_limits<double>::quiet_NaN();
};

// Profiles used by the recovery test-bed; exact k-th derivatives throughout.
WarpFunction make_exp_decay_warp(double length = 1.0, double scale = 1.0);
WarpFunction make_poly_decay_warp(double length = 0.4);  // (1 - y)^2
WarpFunction make_tanh_warp(double length = 1.0);        // 1 - tanh y
WarpFunction make_cos_warp(int frequency);               // 2 - cos(k y), L = 2 pi
WarpFunction make_flat_warp(double length);

// Defined with the rearrangement construction; declared here so the preset
// table can reach them.
WarpFunction section5_f1_preset();
WarpFunction section5_f2_preset();

}  // namespace lensjet
