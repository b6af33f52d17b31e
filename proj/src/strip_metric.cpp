#include "lensjet/strip_metric.hpp"

#include <cmath>
#include <stdexcept>

namespace lensjet {

namespace {
void check_domain(const StripMetric& m, double y, const char* who) {
    if (y < -1e-9 || y > m.length() + 1e-9)
        throw std::invalid_argument(std::string(who) + ": y outside [0, L]");
}
}  // namespace

MetricComponents metric_components(const StripMetric& m, double y) {
    check_domain(m, y, "metric_components");
    return {m.f(y), 0.0, 1.0};
}

ChristoffelSymbols christoffel(const StripMetric& m, double y) {
    check_domain(m, y, "christoffel");
    const double fp = m.fp(y);
    ChristoffelSymbols c;
    c.g2_11 = -0.5 * fp;
    c.g1_12 = 0.5 * fp / m.f(y);
    return c;
}

double second_fundamental_form(const StripMetric& m, Side side) {
    if (side == Side::lower) return -m.fp(0.0) / (2.0 * m.f(0.0));
    const double L = m.length();
    return m.fp(L) / (2.0 * m.f(L));
}

JetVector ground_truth_jet(const StripMetric& m, Side side, int max_order) {
    if (max_order < 0) throw std::invalid_argument("jet order must be >= 0");
    const double y = side == Side::lower ? 0.0 : m.length();
    JetVector jet{side, {}};
    jet.values.reserve(std::size_t(max_order) + 1);
    for (int k = 0; k <= max_order; ++k) {
        double v = m.warp.derivative(k, y);
        if (side == Side::upper && k % 2 == 1) v = -v;
        jet.values.push_back(v);
    }
    return jet;
}

JetComparison jet_compare(const JetVector& a, const JetVector& b, double tol) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("jet_compare: mismatched orders");
    if (a.side != b.side) throw std::invalid_argument("jet_compare: mismatched sides");
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (std::abs(a.values[k] - b.values[k]) > tol)
            return {false, int(k), a.values[k], b.values[k]};
    }
    return {true, -1, 0.0, 0.0};
}

}  // namespace lensjet
