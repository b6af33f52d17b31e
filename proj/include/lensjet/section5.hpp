#pragma once

#include <string>
#include <vector>

#include "lensjet/lens.hpp"
#include "lensjet/warp.hpp"

namespace lensjet {

// Parameters of the piecewise profile f1 on [0, 14]:
//   f1(x) = x + 1 on [0, 1]; smooth strictly increasing to a peak at x = 3
//   (locally symmetric on [2, 4]); smooth strictly decreasing with all-order
//   flat contact to 1 at x = 6; constant on [6, 7]; mirrored about 7.
// Transitions are built from the standard smooth step
//   s(t) = sigma(t) / (sigma(t) + sigma(1 - t)), sigma(t) = exp(-1/t).
struct Section5Params {
    double peak = 3.0;   // f1(3); any value > 2 works
    int n_samples = 14337;  // sample count for the rearranged profile
};

struct ConstraintCheck {
    std::string clause;
    double residual;
    bool ok;
};

struct Section5Profile {
    double peak;
    WarpFunction f1;
    std::vector<ConstraintCheck> checks;
};

// Level grid with the superlevel widths H(y) = m({x in [0,6] : f1(x) >= y}).
struct LayerWidth {
    std::vector<double> levels;  // y in [1, peak]
    std::vector<double> widths;
};

Section5Profile build_f1(const Section5Params& params = {});

// H(y) via the two branch inverses; exact 6 at the bottom level, where the
// flat contact at x = 6 makes the crossing numerically unresolvable.
double layer_width(const Section5Profile& p, double y);

LayerWidth layer_width_table(const Section5Profile& p, int n_levels);

// "Horizontal central lineup": the profile with the same layer widths,
// centered. Returned as a sampled warp on a symmetric grid.
WarpFunction build_f2(const Section5Profile& p, int n_samples);

struct Section5Report {
    double equimeasure_gap;
    double f1_slope_at_0;  // expect 1
    double f2_slope_at_0;  // expect 0
    LensDiscrepancy lens;
    int jet_first_differing_order;  // expect 1
    bool pass_equimeasure;
    bool pass_slopes;
    bool pass_lens;
};

struct Section5Tolerances {
    int levels = 256;
    double equimeasure_tol = 1e-6;
    int lens_directions = 51;
    double lens_tol = 1e-6;
    double f1_slope_tol = 1e-6;
    double f2_slope_tol = 1e-4;
    int threads = 0;
};

Section5Report verify_section5(const Section5Profile& p, const WarpFunction& f2,
                               const Section5Tolerances& tol = {});

}  // namespace lensjet
