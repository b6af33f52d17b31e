#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lensjet/warp.hpp"

namespace lensjet {

enum class Side { lower, upper };  // y = 0 and y = L

inline const char* side_name(Side s) { return s == Side::lower ? "y=0" : "y=L"; }

// Warped-product strip R x [0, L] with g_xx = f(y), g_xy = 0, g_yy = 1.
struct StripMetric {
    WarpFunction warp;

    double length() const { return warp.length(); }
    double f(double y) const { return warp.value(y); }
    double fp(double y) const { return warp.derivative(1, y); }
};

struct MetricComponents {
    double g_xx, g_xy, g_yy;
};

// Nonzero Christoffel symbols of the strip; the other four vanish identically.
struct ChristoffelSymbols {
    double g2_11;  // Gamma^y_xx = -f'/2
    double g1_12;  // Gamma^x_xy = f'/(2f)
    double g1_11 = 0.0, g1_22 = 0.0, g2_12 = 0.0, g2_22 = 0.0;
};

// Normal derivatives of g_11 at one boundary, taken along the inward normal:
// values[k] = d^k g_11 / dn^k. At y = L the inward normal is -d/dy, so the
// entries pick up a factor (-1)^k relative to d^k f / dy^k.
struct JetVector {
    Side side;
    std::vector<double> values;

    int order() const { return int(values.size()) - 1; }
};

struct JetComparison {
    bool equal;
    int first_differing_order;  // valid when !equal
    double lhs_value, rhs_value;
};

MetricComponents metric_components(const StripMetric& m, double y);
ChristoffelSymbols christoffel(const StripMetric& m, double y);

// Second fundamental form II(d_x, d_x) with respect to the inward unit
// normal, normalised by g_xx at the boundary. Positive at a non-concave side.
double second_fundamental_form(const StripMetric& m, Side side);

JetVector ground_truth_jet(const StripMetric& m, Side side, int max_order);

JetComparison jet_compare(const JetVector& a, const JetVector& b, double tol);

}  // namespace lensjet
