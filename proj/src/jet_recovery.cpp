#include "lensjet/jet_recovery.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "lensjet/errors.hpp"
#include "lensjet/taylor.hpp"

namespace lensjet {

namespace {

constexpr int kLatticeDenominator = 4800;
constexpr int kTangentialStep = 12;  // lattice units; Richardson level at 6
constexpr int kStageStep[4] = {0, 96, 192, 400};

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

std::uint64_t pair_key(int i, int j, int ma, int mb, int tag = 0) {
    const std::uint64_t a = std::uint64_t(std::uint32_t(ma + (1 << 24))) & 0x1FFFFFFu;
    const std::uint64_t b = std::uint64_t(std::uint32_t(mb + (1 << 24))) & 0x1FFFFFFu;
    return (std::uint64_t(tag) << 62) | (std::uint64_t(i) << 58) | (std::uint64_t(j) << 54) |
           (a << 25) | b;
}

}  // namespace

struct JetEngine::Impl {
    const BoundaryDataset& ds;
    JetOptions opt;
    double x0, unit, g11;

    std::unordered_map<std::uint64_t, double> tau_memo, p_memo, t_memo, td1_memo;
    std::unordered_map<std::uint64_t, double> jet_memo;

    Impl(const BoundaryDataset& d, JetOptions o)
        : ds(d), opt(o), x0(d.base_point()), unit(d.window() / kLatticeDenominator),
          g11(d.boundary_g11()) {}

    double pos(int m) const { return x0 + m * unit; }

    double tau(int ma, int mb) {
        const std::uint64_t k = pair_key(0, 0, ma, mb);
        auto it = tau_memo.find(k);
        if (it != tau_memo.end()) return it->second;
        const double v = ds.tau(pos(ma), pos(mb));
        tau_memo.emplace(k, v);
        return v;
    }

    double normal1(int ma, int mb) {
        const std::uint64_t k = pair_key(0, 0, ma, mb);
        auto it = p_memo.find(k);
        if (it != p_memo.end()) return it->second;
        const double v = ds.normal_derivative_tau(pos(ma), pos(mb));
        p_memo.emplace(k, v);
        return v;
    }

    // d^i/dxn^i d^j/dyn^j tau at the lattice pair.
    double T(int i, int j, int ma, int mb) {
        if (i == 0 && j == 0) return tau(ma, mb);
        if (j > i) return T(j, i, mb, ma);
        if (i == 1 && j == 0) return normal1(ma, mb);
        const std::uint64_t key = pair_key(i, j, ma, mb);
        auto it = t_memo.find(key);
        if (it != t_memo.end()) return it->second;
        const double v = eikonal_solve(i, j, ma, mb);
        t_memo.emplace(key, v);
        return v;
    }

    template <class F>
    double fd1(const F& f, int m, int step) {
        auto level = [&](int s) { return (f(m + s) - f(m - s)) / (2.0 * s * unit); };
        const double coarse = level(step);
        const double fine = level(step / 2);
        return (4.0 * fine - coarse) / 3.0;
    }

    // d/dx1 (first slot) of T(i,j). Smooth quantities are differenced on the
    // lattice; the two singular stage-2 quantities are differentiated through
    // their defining formulas instead. The step doubles twice for order-3
    // consumers, trading truncation for noise.
    double TD1(int i, int j, int ma, int mb, int dt) {
        const std::uint64_t key = pair_key(i, j, ma, mb, dt == kTangentialStep ? 0 : 1);
        auto it = td1_memo.find(key);
        if (it != td1_memo.end()) return it->second;
        double v;
        if (i + j <= 1) {
            v = fd1([&](int m) { return T(i, j, m, mb); }, ma, dt);
        } else if (i == 2 && j == 0) {
            v = dT20_dx(ma, mb, dt);
        } else if (i == 1 && j == 1) {
            v = dT11_dx(ma, mb, dt);
        } else {
            throw Error(ErrorCode::bad_order, "tangential derivative of an unsupported stage");
        }
        td1_memo.emplace(key, v);
        return v;
    }

    // d^p/dxn^p of g^11 at a lattice node, from the recovered jet there.
    double Aval(int node, int p) {
        std::vector<double> g_derivs(static_cast<std::size_t>(p) + 1);
        for (int q = 0; q <= p; ++q) g_derivs[std::size_t(q)] = jet_at(q, node);
        return Taylor::reciprocal_derivatives(g_derivs)[std::size_t(p)];
    }

    double eikonal_solve(int i, int j, int ma, int mb) {
        const int a = i - 1, b = j;
        const double w = T(1, 0, ma, mb);
        if (std::abs(w) < 1e-9)
            throw Error(ErrorCode::non_transversal, "chord nearly tangent; stage ill-posed");

        double wsum = 0.0;
        for (int q = 0; q <= a; ++q)
            for (int s = 0; s <= b; ++s) {
                if ((q == 0 && s == 0) || (q == a && s == b)) continue;
                wsum += binom(a, q) * binom(b, s) * T(q + 1, s, ma, mb) *
                        T(a - q + 1, b - s, ma, mb);
            }

        const int dt = (i + j >= 3) ? 4 * kTangentialStep : kTangentialStep;
        double ausum = 0.0;
        for (int p = 0; p <= a; ++p) {
            double inner = 0.0;
            for (int q = 0; q <= a - p; ++q)
                for (int s = 0; s <= b; ++s)
                    inner += binom(a - p, q) * binom(b, s) * TD1(q, s, ma, mb, dt) *
                             TD1(a - p - q, b - s, ma, mb, dt);
            ausum += binom(a, p) * Aval(ma, p) * inner;
        }
        return -(ausum + wsum) / (2.0 * w);
    }

    // Derivative of T(2,0) = -(A' u^2 + 2 A u u_n) / (2 w) through the
    // formula; all differenced ingredients are smooth in the first slot.
    double dT20_dx(int ma, int mb, int dt) {
        const double u = TD1(0, 0, ma, mb, dt);
        const double un = TD1(1, 0, ma, mb, dt);
        const double w = T(1, 0, ma, mb);
        const double t20 = T(2, 0, ma, mb);
        const double ux = fd1([&](int m) { return TD1(0, 0, m, mb, dt); }, ma, dt);
        const double unx = fd1([&](int m) { return TD1(1, 0, m, mb, dt); }, ma, dt);
        const double A0 = Aval(ma, 0), A1 = Aval(ma, 1);
        const double dA0 = fd1([&](int m) { return Aval(m, 0); }, ma, dt);
        const double dA1 = fd1([&](int m) { return Aval(m, 1); }, ma, dt);
        const double dN = dA1 * u * u + 2.0 * A1 * u * ux + 2.0 * dA0 * u * un +
                          2.0 * A0 * (ux * un + u * unx);
        return -dN / (2.0 * w) - t20 * (un / w);
    }

    // Derivative of T(1,1) = -(2 A u q) / (2 w), q = d/dx1 d/dyn tau.
    double dT11_dx(int ma, int mb, int dt) {
        const double u = TD1(0, 0, ma, mb, dt);
        const double q = TD1(0, 1, ma, mb, dt);
        const double un = TD1(1, 0, ma, mb, dt);
        const double w = T(1, 0, ma, mb);
        const double t11 = T(1, 1, ma, mb);
        const double ux = fd1([&](int m) { return TD1(0, 0, m, mb, dt); }, ma, dt);
        const double qx = fd1([&](int m) { return TD1(0, 1, m, mb, dt); }, ma, dt);
        const double A0 = Aval(ma, 0);
        const double dA0 = fd1([&](int m) { return Aval(m, 0); }, ma, dt);
        const double dM = 2.0 * (dA0 * u * q + A0 * (ux * q + u * qx));
        return -dM / (2.0 * w) - t11 * (un / w);
    }

    // d^i/dxn^i d^j/dyn^j rho via the Leibniz expansion of rho = tau^2.
    double R(int i, int j, int ma, int mb) {
        double r = 0.0;
        for (int q = 0; q <= i; ++q)
            for (int s = 0; s <= j; ++s)
                r += binom(i, q) * binom(j, s) * T(q, s, ma, mb) * T(i - q, j - s, ma, mb);
        return r;
    }

    // (d/dxn + d/dyn)^k rho at the pair (node+su, node); zero at coincidence.
    double S(int k, int node, int su) {
        double sum = 0.0;
        for (int i = 0; i <= k; ++i) sum += binom(k, i) * R(i, k - i, node + su, node);
        return sum;
    }

    double stencil(int k, int node, int h) {
        const double hh = h * unit;
        return (S(k, node, h) + S(k, node, -h)) / (2.0 * hh * hh);
    }

    double jet_raw(int k, int node, int h, bool richardson) {
        if (k == 0) {
            auto level = [&](int s) {
                const double v = ds.mu(pos(node), pos(node + s)) / (s * unit);
                return v * v;
            };
            return richardson ? (4.0 * level(h / 2) - level(h)) / 3.0 : level(h);
        }
        if (k > max_supported_order)
            throw Error(ErrorCode::fd_unstable,
                        "orders beyond 3 compound finite-difference noise past usefulness");
        const double base = stencil(k, node, h);
        if (!richardson) return base;
        // Orders 1-2 pair (h, h/2); order 3 pairs (h, 2h), where the halved
        // step would already sit in the noise floor.
        const double partner = stencil(k, node, k >= 3 ? 2 * h : h / 2);
        const double value =
            k >= 3 ? (4.0 * base - partner) / 3.0 : (4.0 * partner - base) / 3.0;
        if (std::abs(partner - base) > opt.unstable_tol * std::max(1.0, std::abs(value)))
            throw Error(ErrorCode::fd_unstable, "tangential-step levels disagree at order " +
                                                    std::to_string(k));
        return value;
    }

    double jet_at(int k, int node) {
        const std::uint64_t key = pair_key(std::min(k, 15), 0, node, 0) | (1ull << 63);
        auto it = jet_memo.find(key);
        if (it != jet_memo.end()) return it->second;
        const int h = kStageStep[std::min(std::max(k, 1), 3)];
        const double v = jet_raw(k, node, h, opt.richardson);
        jet_memo.emplace(key, v);
        return v;
    }
};

JetEngine::JetEngine(const BoundaryDataset& ds, JetOptions opt)
    : impl_(std::make_unique<Impl>(ds, opt)) {}

JetEngine::~JetEngine() = default;

double JetEngine::jet(int k) { return impl_->jet_at(k, 0); }

double JetEngine::jet_at(int k, int node) { return impl_->jet_at(k, node); }

double JetEngine::jet_with_step(int k, int node, int step_units, bool richardson) {
    if (step_units < 4 || step_units % 4 != 0)
        throw std::invalid_argument("step must be a positive multiple of 4 lattice units");
    return impl_->jet_raw(k, node, step_units, richardson);
}

double JetEngine::lattice_unit() const { return impl_->unit; }

TwoPointNormalData JetEngine::two_point(double x, double y) {
    auto snap = [&](double v) {
        const double m = std::round((v - impl_->x0) / impl_->unit);
        if (std::abs(impl_->pos(int(m)) - v) > 1e-9)
            throw std::invalid_argument("two_point positions must sit on the engine lattice");
        return int(m);
    };
    const int ma = snap(x), mb = snap(y);
    TwoPointNormalData d;
    d.tau_xn = impl_->T(1, 0, ma, mb);
    d.tau_yn = impl_->T(0, 1, ma, mb);
    d.tau_xnxn = impl_->T(2, 0, ma, mb);
    d.tau_xnyn = impl_->T(1, 1, ma, mb);
    d.tau_ynyn = impl_->T(0, 2, ma, mb);
    const double t = impl_->tau(ma, mb);
    d.rho_xnxn = 2.0 * (d.tau_xn * d.tau_xn + t * d.tau_xnxn);
    d.rho_xnyn = 2.0 * (d.tau_xn * d.tau_yn + t * d.tau_xnyn);
    d.rho_ynyn = 2.0 * (d.tau_yn * d.tau_yn + t * d.tau_ynyn);
    return d;
}

double JetEngine::eikonal_residual_max() const {
    double worst = 0.0;
    for (const auto& [key, p] : impl_->p_memo) {
        auto it = impl_->td1_memo.find(key);  // (0,0) tangential slot shares the key layout
        if (it == impl_->td1_memo.end()) continue;
        const double u = it->second;
        worst = std::max(worst, std::abs(u * u / impl_->g11 + p * p - 1.0));
    }
    return worst;
}

double recover_c0(const BoundaryDataset& ds) { return JetEngine(ds).jet(0); }

namespace {

double map_concave_errors(const BoundaryDataset& ds, int k) {
    JetEngine eng(ds);
    try {
        return eng.jet(k);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::no_chord || e.code() == ErrorCode::non_transversal)
            throw Error(ErrorCode::concave_window,
                        "window admits no transversal chords; jet order >= 1 unreachable");
        throw;
    }
}

}  // namespace

double recover_c1(const BoundaryDataset& ds) { return map_concave_errors(ds, 1); }

TwoPointNormalData second_normal_derivatives(const BoundaryDataset& ds, double x, double y,
                                             double c1) {
    JetEngine eng(ds);
    const double own = eng.jet(1);
    if (std::abs(own - c1) > 1e-2 * std::max(1.0, std::abs(own)))
        throw std::invalid_argument("supplied first-order jet disagrees with the window data");
    return eng.two_point(x, y);
}

double recover_c2(const BoundaryDataset& ds, double c1) {
    JetEngine eng(ds);
    const double own = eng.jet(1);
    if (std::abs(own - c1) > 1e-2 * std::max(1.0, std::abs(own)))
        throw std::invalid_argument("supplied first-order jet disagrees with the window data");
    return map_concave_errors(ds, 2);
}

double recover_ck(const BoundaryDataset& ds, const std::vector<double>& prior_jets, int k) {
    if (k < 2) throw std::invalid_argument("recover_ck handles orders >= 2");
    if (int(prior_jets.size()) < k)
        throw std::invalid_argument("orders below k must be recovered first");
    return map_concave_errors(ds, k);
}

JetReport run_pipeline(const BoundaryDataset& ds, int max_order) {
    if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
    JetReport rep;
    rep.x0 = ds.base_point();
    const bool evidence = ds.detect_nonconcave() == ConcavityVerdict::nonconcave_evidence;
    rep.verdict = evidence ? "nonconcave-evidence" : "no-evidence";

    JetEngine eng(ds);
    const StripMetric* m = ds.oracle_backed() ? &ds.metric() : nullptr;
    const int limit = evidence ? max_order : 0;
    for (int k = 0; k <= limit; ++k) {
        JetOrderResult r;
        r.k = k;
        r.step = (k == 0 ? kStageStep[1] : kStageStep[std::min(k, 3)]) * eng.lattice_unit();
        try {
            r.value = eng.jet(k);
        } catch (const Error&) {
            break;  // orders stay contiguous from 0
        }
        r.has_truth = m != nullptr;
        if (m) {
            r.truth = m->warp.derivative(k, 0.0);
            r.abs_err = std::abs(r.value - r.truth);
        } else {
            r.truth = 0.0;
            r.abs_err = 0.0;
        }
        rep.orders.push_back(r);
    }
    rep.eikonal_residual_max = eng.eikonal_residual_max();
    return rep;
}

nlohmann::json JetReport::to_json() const {
    nlohmann::json j;
    j["x0"] = x0;
    j["verdict"] = verdict;
    j["eikonal_residual_max"] = eikonal_residual_max;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& o : orders) {
        nlohmann::json jo;
        jo["k"] = o.k;
        jo["value"] = o.value;
        jo["step"] = o.step;
        if (o.has_truth) {
            jo["truth"] = o.truth;
            jo["abs_err"] = o.abs_err;
        }
        arr.push_back(jo);
    }
    j["orders"] = arr;
    return j;
}

}  // namespace lensjet
