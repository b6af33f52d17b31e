#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lensjet/geodesic.hpp"
#include "lensjet/strip_metric.hpp"

namespace lensjet {

enum class LensMethod { quadrature, ode };

// One scattering record: tangential entry velocity at y = 0 mapped to exit
// time, displacement, and tangential exit velocity. Normal components are
// determined by unit speed and the exit side.
struct LensRecord {
    double entry_u;
    double T;
    double delta_x;
    Side exit_side;
    double exit_u;
};

struct LensTable {
    std::string warp_id;
    std::vector<double> grid;  // strictly increasing entry_u values
    std::vector<LensRecord> records;
};

struct LensDiscrepancy {
    double max_dT;
    double max_ddx;
    double max_dexit;

    double sup() const { return std::max(max_dT, std::max(max_ddx, max_dexit)); }
};

// Chebyshev-spaced grid in (-limit, limit), sorted increasing.
std::vector<double> chebyshev_grid(int n, double limit = 0.99);

LensTable build_lens_table(const StripMetric& m, const std::vector<double>& grid,
                           LensMethod method, int threads = 0);

LensDiscrepancy compare_lens(const LensTable& a, const LensTable& b);

void write_lens_csv(std::ostream& os, const LensTable& t);
LensTable read_lens_csv(std::istream& is, std::string warp_id = "csv");

// Lebesgue measure of {y in [0, L] : f(y) <= r}.
double sublevel_measure(const WarpFunction& w, double r);

// Sublevel measures at many levels sharing one node scan.
std::vector<double> sublevel_profile(const WarpFunction& w, const std::vector<double>& levels);

struct EquimeasurableResult {
    bool pass;
    double max_gap;
};

// Sup of |m1(r) - m2(r)| over n levels sampled at cell midpoints of the
// combined value range. Midpoint sampling keeps the bottom level away from
// the flat-contact zones where the sublevel boundary is not resolvable in
// double precision.
EquimeasurableResult equimeasurable_check(const WarpFunction& a, const WarpFunction& b,
                                          int n_levels, double tol);

// Exit-time integral written against the pushforward level measure of f,
// evaluated by Stieltjes midpoint summation over n_levels cells. Converges to
// crossing_time as the level grid refines.
double distribution_integral(const WarpFunction& w, double u0, int n_levels);

}  // namespace lensjet
