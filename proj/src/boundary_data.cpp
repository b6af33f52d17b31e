#include "lensjet/boundary_data.hpp"

#include <cmath>
#include <mutex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lensjet/errors.hpp"
#include "lensjet/fd.hpp"

namespace lensjet {

namespace {

std::uint64_t key_of(double x) {
    std::uint64_t k;
    std::memcpy(&k, &x, sizeof k);
    return k;
}

}  // namespace

BoundaryDataset BoundaryDataset::oracle(StripMetric m, double x0, double eps,
                                        NormalDerivativeMode mode) {
    if (!(eps > 0.0)) throw std::invalid_argument("window must be positive");
    BoundaryDataset ds;
    ds.x0_ = x0;
    ds.eps_ = eps;
    ds.policy_ = {eps / 50.0};
    ds.mode_ = mode;
    ds.g11_ = m.f(0.0);
    ds.metric_ = std::make_shared<StripMetric>(std::move(m));
    return ds;
}

BoundaryDataset BoundaryDataset::tabulated(std::vector<double> grid,
                                           std::vector<double> tau_values, double x0, double eps,
                                           double g11) {
    const std::size_t n = grid.size();
    if (n < 4 || tau_values.size() != n * n)
        throw std::invalid_argument("tabulated dataset needs an n x n table, n >= 4");
    if (!(g11 > 0.0)) throw std::invalid_argument("boundary metric must be positive");
    BoundaryDataset ds;
    ds.x0_ = x0;
    ds.eps_ = eps;
    ds.g11_ = g11;
    ds.policy_ = {eps / 50.0};
    ds.mode_ = NormalDerivativeMode::finite_difference;
    ds.grid_ = std::move(grid);
    ds.row_splines_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(tau_values.begin() + long(i * n), tau_values.begin() + long((i + 1) * n));
        ds.row_splines_.emplace_back(ds.grid_, std::move(row));
    }
    return ds;
}

BoundaryDataset BoundaryDataset::tabulated_from_csv(const std::string& csv_path,
                                                    const std::string& sidecar_path) {
    std::ifstream side(sidecar_path);
    if (!side) throw Error(ErrorCode::io_error, "cannot open sidecar " + sidecar_path);
    nlohmann::json meta = nlohmann::json::parse(side);
    const double x0 = meta.at("x0").get<double>();
    const double eps = meta.at("eps").get<double>();
    const double g11 = meta.at("g11").get<double>();

    std::ifstream csv(csv_path);
    if (!csv) throw Error(ErrorCode::io_error, "cannot open dataset " + csv_path);
    std::string line;
    if (!std::getline(csv, line) || line != "x1,x2,tau")
        throw Error(ErrorCode::io_error, "missing dataset CSV header");
    std::vector<double> x1s, x2s, taus;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, b, t;
        if (!(ss >> a >> b >> t)) throw Error(ErrorCode::io_error, "malformed dataset CSV row");
        x1s.push_back(a);
        x2s.push_back(b);
        taus.push_back(t);
    }
    // Rows are written x1-major over a square grid.
    std::size_t n = 0;
    while (n < x2s.size() && (n == 0 || x2s[n] > x2s[n - 1])) ++n;
    if (n < 4 || x1s.size() != n * n)
        throw Error(ErrorCode::io_error, "dataset CSV is not a square grid");
    std::vector<double> grid(x2s.begin(), x2s.begin() + long(n));
    return tabulated(std::move(grid), std::move(taus), x0, eps, g11);
}

const StripMetric& BoundaryDataset::metric() const {
    if (!metric_) throw std::invalid_argument("dataset is not oracle-backed");
    return *metric_;
}

void BoundaryDataset::check_window(double x, const char* who) const {
    if (std::abs(x - x0_) > eps_ * (1.0 + 1e-9) + 1e-15)
        throw std::invalid_argument(std::string(who) + ": point outside the data window");
}

double BoundaryDataset::mu(double x1, double x2) const {
    check_window(x1, "mu");
    check_window(x2, "mu");
    return std::sqrt(g11_) * std::abs(x1 - x2);
}

std::optional<ChordGeometry> BoundaryDataset::chord(double separation) const {
    const std::uint64_t key = key_of(separation);
    {
        std::shared_lock lock(cache_->mutex);
        auto it = cache_->map.find(key);
        if (it != cache_->map.end()) return it->second;
    }
    std::optional<ChordGeometry> result;
    try {
        result = chord_for_separation(*metric_, separation);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::no_chord && e.code() != ErrorCode::no_turning_point &&
            e.code() != ErrorCode::degenerate_turning)
            throw;
        result = std::nullopt;
    }
    std::unique_lock lock(cache_->mutex);
    cache_->map.emplace(key, result);
    return result;
}

double BoundaryDataset::tabulated_tau(double x1, double x2) const {
    std::vector<double> column(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) column[i] = row_splines_[i](x2);
    CubicSpline s(grid_, std::move(column));
    return s(x1);
}

double BoundaryDataset::tau(double x1, double x2) const {
    check_window(x1, "tau");
    check_window(x2, "tau");
    if (x1 == x2) return 0.0;
    if (!metric_) return tabulated_tau(x1, x2);
    const double m = mu(x1, x2);
    const auto c = chord(std::abs(x1 - x2));
    return c ? std::min(c->length, m) : m;
}

double BoundaryDataset::normal_derivative_tau(double x, double y) const {
    check_window(x, "normal_derivative_tau");
    check_window(y, "normal_derivative_tau");
    if (x == y) throw std::invalid_argument("normal derivative needs distinct points");

    if (metric_ && mode_ == NormalDerivativeMode::solver) {
        const auto c = chord(std::abs(x - y));
        if (!c) throw Error(ErrorCode::no_chord, "no transversal chord between the points");
        // Tangential momentum is the Clairaut constant; the normal component
        // follows from unit speed. f(0) - f(y*) is formed without
        // cancellation so shallow chords keep full relative accuracy.
        const double drop = metric_->warp.increment(c->y_star, -c->y_star);
        return -std::sqrt(std::max(drop, 0.0) / g11_);
    }

    const double h = policy_.tangential_step;
    const double u =
        fd::d1_richardson([&](double t) { return tau(t, y); }, x, h);
    const double s = 1.0 - u * u / g11_;
    if (s <= 1e-12)
        throw Error(ErrorCode::non_transversal, "tangential gradient exhausts the unit speed");
    return -std::sqrt(s);
}

ConcavityVerdict BoundaryDataset::detect_nonconcave(double tol) const {
    // Widest pairs first: the chordal saving grows like the cube of the
    // separation, so evidence shows up at the window scale.
    for (int k = 16; k >= 1; --k) {
        const double sep = 2.0 * eps_ * double(k) / 16.0;
        const double a = x0_ - 0.5 * sep, b = x0_ + 0.5 * sep;
        if (mu(a, b) - tau(a, b) > tol) return ConcavityVerdict::nonconcave_evidence;
    }
    return ConcavityVerdict::no_evidence;
}

void BoundaryDataset::export_csv(const std::string& csv_path, const std::string& sidecar_path,
                                 int grid_points) const {
    if (grid_points < 4) throw std::invalid_argument("need >= 4 grid points");
    std::ofstream csv(csv_path);
    if (!csv) throw Error(ErrorCode::io_error, "cannot write " + csv_path);
    csv << "x1,x2,tau\n";
    char buf[96];
    std::vector<double> xs(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i)
        xs[std::size_t(i)] = x0_ - eps_ + 2.0 * eps_ * double(i) / (grid_points - 1);
    for (double a : xs)
        for (double b : xs) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", a, b, tau(a, b));
            csv << buf;
        }
    std::ofstream side(sidecar_path);
    if (!side) throw Error(ErrorCode::io_error, "cannot write " + sidecar_path);
    nlohmann::json meta;
    meta["x0"] = x0_;
    meta["eps"] = eps_;
    meta["g11"] = g11_;
    side << meta.dump(2) << "\n";
}

namespace {

double fd_slot(const BoundaryDataset& ds, int slot, int order, double x, double y, double h,
               bool squared) {
    auto f = [&](double t) {
        const double v = slot == 0 ? ds.tau(t, y) : ds.tau(x, t);
        return squared ? v * v : v;
    };
    const double at = slot == 0 ? x : y;
    if (order == 1) return fd::d1_richardson(f, at, h);
    if (order == 2) return fd::d2_richardson(f, at, h);
    throw std::invalid_argument("tangential FD supports orders 1 and 2");
}

}  // namespace

double fd_tangential_tau(const BoundaryDataset& ds, int slot, int order, double x, double y,
                         double h) {
    return fd_slot(ds, slot, order, x, y, h, false);
}

double fd_tangential_rho(const BoundaryDataset& ds, int slot, int order, double x, double y,
                         double h) {
    return fd_slot(ds, slot, order, x, y, h, true);
}

}  // namespace lensjet
