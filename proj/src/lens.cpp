#include "lensjet/lens.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lensjet/errors.hpp"
#include "lensjet/parallel.hpp"

namespace lensjet {

namespace {

constexpr int kSublevelCells = 32768;

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("direction grid is empty");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("direction grid must be strictly increasing");
}

}  // namespace

std::vector<double> chebyshev_grid(int n, double limit) {
    if (n < 1) throw std::invalid_argument("grid size must be >= 1");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[std::size_t(n - 1 - i)] = limit * std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * n));
    return g;
}

LensTable build_lens_table(const StripMetric& m, const std::vector<double>& grid,
                           LensMethod method, int threads) {
    check_grid(grid);
    LensTable t;
    t.warp_id = m.warp.name();
    t.grid = grid;
    t.records.resize(grid.size());
    const double f0 = m.f(0.0);
    const double fL = m.f(m.length());

    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            const double u = grid[i];
            if (!(std::abs(u) * std::sqrt(f0) < 1.0))
                throw Error(ErrorCode::grazing, "entry direction not transversal");
            LensRecord r;
            r.entry_u = u;
            if (method == LensMethod::quadrature) {
                r.T = crossing_time(m, u);
                r.delta_x = crossing_displacement(m, u);
                r.exit_side = Side::upper;
                r.exit_u = u * f0 / fL;
            } else {
                const double vy = std::sqrt(1.0 - f0 * u * u);
                const ExitEvent ev = integrate_to_boundary(m, {0.0, 0.0, u, vy});
                r.T = ev.T;
                r.delta_x = ev.exit_x;
                r.exit_side = ev.exit_side;
                r.exit_u = ev.exit_vx;
            }
            t.records[i] = r;
        },
        threads);
    return t;
}

LensDiscrepancy compare_lens(const LensTable& a, const LensTable& b) {
    if (a.grid != b.grid) throw std::invalid_argument("lens tables built on different grids");
    LensDiscrepancy d{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        d.max_dT = std::max(d.max_dT, std::abs(a.records[i].T - b.records[i].T));
        d.max_ddx = std::max(d.max_ddx, std::abs(a.records[i].delta_x - b.records[i].delta_x));
        d.max_dexit = std::max(d.max_dexit, std::abs(a.records[i].exit_u - b.records[i].exit_u));
    }
    return d;
}

void write_lens_csv(std::ostream& os, const LensTable& t) {
    os << "entry_u,T,delta_x,exit_side,exit_u\n";
    char buf[128];
    for (const LensRecord& r : t.records) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%s,%.17g\n", r.entry_u, r.T, r.delta_x,
                      side_name(r.exit_side), r.exit_u);
        os << buf;
    }
}

LensTable read_lens_csv(std::istream& is, std::string warp_id) {
    LensTable t;
    t.warp_id = std::move(warp_id);
    std::string line;
    if (!std::getline(is, line) || line.rfind("entry_u,", 0) != 0)
        throw Error(ErrorCode::io_error, "missing lens CSV header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        LensRecord r;
        std::string side;
        if (!(ss >> r.entry_u >> r.T >> r.delta_x >> side >> r.exit_u))
            throw Error(ErrorCode::io_error, "malformed lens CSV row");
        r.exit_side = side == "y=0" ? Side::lower : Side::upper;
        t.grid.push_back(r.entry_u);
        t.records.push_back(r);
    }
    return t;
}

std::vector<double> sublevel_profile(const WarpFunction& w, const std::vector<double>& levels) {
    const double L = w.length();
    const int cells = kSublevelCells;
    std::vector<double> node(static_cast<std::size_t>(cells) + 1);
    std::vector<double> value(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) {
        node[std::size_t(i)] = L * double(i) / cells;
        value[std::size_t(i)] = w.value(node[std::size_t(i)]);
    }

    auto crossing = [&](double lo, double hi, double r, bool lo_inside) {
        // Bisect the boundary of {f <= r} inside one cell.
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool inside = w.value(mid) <= r;
            (inside == lo_inside ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<double> out(levels.size(), 0.0);
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double r = levels[k];
        double measure = 0.0;
        for (int i = 0; i < cells; ++i) {
            const bool in0 = value[std::size_t(i)] <= r;
            const bool in1 = value[std::size_t(i) + 1] <= r;
            const double a = node[std::size_t(i)], b = node[std::size_t(i) + 1];
            if (in0 && in1) {
                measure += b - a;
            } else if (in0 != in1) {
                const double c = crossing(a, b, r, in0);
                measure += in0 ? (c - a) : (b - c);
            }
        }
        out[k] = measure;
    }
    return out;
}

double sublevel_measure(const WarpFunction& w, double r) {
    return sublevel_profile(w, {r})[0];
}

EquimeasurableResult equimeasurable_check(const WarpFunction& a, const WarpFunction& b,
                                          int n_levels, double tol) {
    if (std::abs(a.length() - b.length()) > 1e-12)
        throw std::invalid_argument("equimeasurable_check requires equal strip widths");
    if (n_levels < 1) throw std::invalid_argument("need at least one level");
    const double lo = std::min(a.min_value(), b.min_value());
    const double hi = std::max(a.max_value(), b.max_value());
    std::vector<double> levels(static_cast<std::size_t>(n_levels));
    for (int k = 0; k < n_levels; ++k)
        levels[std::size_t(k)] = lo + (hi - lo) * (k + 0.5) / n_levels;
    const std::vector<double> ma = sublevel_profile(a, levels);
    const std::vector<double> mb = sublevel_profile(b, levels);
    double gap = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k)
        gap = std::max(gap, std::abs(ma[k] - mb[k]));
    return {gap <= tol, gap};
}

double distribution_integral(const WarpFunction& w, double u0, int n_levels) {
    if (n_levels < 1) throw std::invalid_argument("need at least one level");
    const double c = u0 * w.value(0.0);
    const double c2 = c * c;
    const double lo = w.min_value(), hi = w.max_value();
    if (c2 >= lo - 1e-13)
        throw Error(ErrorCode::grazing, "tangential momentum reaches the warp minimum");
    auto g = [&](double t) { return 1.0 / std::sqrt(1.0 - c2 / t); };

    std::vector<double> levels(static_cast<std::size_t>(n_levels) + 1);
    for (int j = 0; j <= n_levels; ++j)
        levels[std::size_t(j)] = lo + (hi - lo) * double(j) / n_levels;
    const std::vector<double> M = sublevel_profile(w, levels);

    // Bottom atom (level sets of positive measure at the minimum), then the
    // midpoint Stieltjes sum over level cells.
    double total = g(lo) * M[0];
    for (int j = 0; j < n_levels; ++j) {
        const double tmid = 0.5 * (levels[std::size_t(j)] + levels[std::size_t(j) + 1]);
        total += g(tmid) * (M[std::size_t(j) + 1] - M[std::size_t(j)]);
    }
    return total;
}

}  // namespace lensjet
