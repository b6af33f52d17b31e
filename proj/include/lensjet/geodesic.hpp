#pragma once

#include <optional>
#include <utility>

#include "lensjet/strip_metric.hpp"

namespace lensjet {

// Unit-speed geodesic state: f(y) vx^2 + vy^2 = 1.
struct GeodesicState {
    double x, y, vx, vy;
};

struct ExitEvent {
    double T;  // exit time = arc length
    double exit_x;
    Side exit_side;
    double exit_vx, exit_vy;
    double clairaut_drift;  // max |c(t) - c(0)| seen along the trajectory
};

struct IntegratorOptions {
    double rtol = 1e-11;
    double atol = 1e-12;
    double max_length = 1e4;
    double event_time_tol = 1e-12;
};

// Clairaut constant c = vx * f(y); conserved along geodesics of the strip.
double clairaut(const StripMetric& m, const GeodesicState& s);

// Integrates the geodesic system until y crosses 0 or L; the crossing is
// localized on the dense output by bisection in time.
ExitEvent integrate_to_boundary(const StripMetric& m, const GeodesicState& s0,
                                const IntegratorOptions& opt = {});

// Boundary-to-boundary crossing integrals for a transversal entry with
// tangential velocity u0 at y = 0. Requires (u0 f(0))^2 < min f; otherwise
// the trajectory grazes or turns back.
double crossing_time(const StripMetric& m, double u0);
double crossing_displacement(const StripMetric& m, double u0);

// One chord of the same-side boundary family, parametrized by turning depth.
struct ChordGeometry {
    double c;       // Clairaut constant, positive
    double y_star;  // turning depth
    double length;
    double delta_x;  // displacement of the chord, positive
};

ChordGeometry chord_from_depth(const StripMetric& m, double y_star);

// (length, delta_x) of the chord with Clairaut constant c; delta_x carries
// the sign of c.
std::pair<double, double> chord_same_side(const StripMetric& m, double c);

// Chord geometry for a prescribed endpoint separation on y = 0.
ChordGeometry chord_for_separation(const StripMetric& m, double separation);

// Length of the interior chord joining boundary points x1, x2 on y = 0.
double chord_between(const StripMetric& m, double x1, double x2);

struct Point2 {
    double x, y;
};

// Distance between nearby points realized by a geodesic of the strip, found
// by shooting over the one-parameter chord family (Clairaut constant +
// vertical sign: monotone, turn-above, turn-below, horizontal branches).
double interior_distance(const StripMetric& m, const Point2& p, const Point2& q);

struct HessianCheck {
    double lhs;  // 2 |v|_g^2
    double rhs;  // second difference of rho along the coordinate line
};

// Second-difference check of rho(c(t), c(0)) for the coordinate line through
// p with coordinate velocity v.
HessianCheck hessian_rho_check(const StripMetric& m, const Point2& p, double vx, double vy,
                               double h);

}  // namespace lensjet
