#pragma once

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "lensjet/geodesic.hpp"
#include "lensjet/interp.hpp"
#include "lensjet/strip_metric.hpp"

namespace lensjet {

// How first normal derivatives of tau are answered.
//  solver: from the chord solve itself (Clairaut constant + turning depth);
//    algebraically the same Eikonal relation, evaluated without the
//    finite-difference noise amplification of near-tangential chords.
//  finite_difference: tangential FD of tau plus the Eikonal magnitude and
//    the inward-pointing sign; the only route available to tabulated data.
enum class NormalDerivativeMode { solver, finite_difference };

struct FdPolicy {
    double tangential_step;  // base step for tangential differences
};

enum class ConcavityVerdict { nonconcave_evidence, no_evidence };

// Localized boundary distances around a base point on y = 0: tau (chordal)
// and mu (in-boundary), plus first normal derivative queries. This interface
// is the only input the jet recovery consumes.
class BoundaryDataset {
public:
    static BoundaryDataset oracle(StripMetric m, double x0, double eps,
                                  NormalDerivativeMode mode = NormalDerivativeMode::solver);

    static BoundaryDataset tabulated(std::vector<double> grid, std::vector<double> tau_values,
                                     double x0, double eps, double g11);

    static BoundaryDataset tabulated_from_csv(const std::string& csv_path,
                                              const std::string& sidecar_path);

    double base_point() const { return x0_; }
    double window() const { return eps_; }
    double boundary_g11() const { return g11_; }
    const FdPolicy& fd_policy() const { return policy_; }
    bool oracle_backed() const { return metric_ != nullptr; }
    const StripMetric& metric() const;

    // In-boundary distance sqrt(g11) |x1 - x2|.
    double mu(double x1, double x2) const;
    // Chordal distance: min(interior chord, mu); mu when no chord exists.
    double tau(double x1, double x2) const;
    double rho(double x1, double x2) const {
        const double t = tau(x1, x2);
        return t * t;
    }

    // d tau / d x_n at the first argument (x_n = inward normal). Always in
    // (-1, 0) for a transversal chord.
    double normal_derivative_tau(double x, double y) const;

    // Scans window pairs for mu - tau > tol.
    ConcavityVerdict detect_nonconcave(double tol = 1e-9) const;

    // Uniform-grid export; sidecar carries {"x0","eps","g11"}.
    void export_csv(const std::string& csv_path, const std::string& sidecar_path,
                    int grid_points = 401) const;

private:
    BoundaryDataset() = default;
    void check_window(double x, const char* who) const;
    // Chord solve for the given separation, memoized; nullopt when the warp
    // admits no chord at this separation.
    std::optional<ChordGeometry> chord(double separation) const;
    double tabulated_tau(double x1, double x2) const;

    double x0_ = 0.0, eps_ = 0.0, g11_ = 1.0;
    FdPolicy policy_{0.0};
    NormalDerivativeMode mode_ = NormalDerivativeMode::solver;
    std::shared_ptr<StripMetric> metric_;

    // Strips are x-homogeneous, so oracle chords are keyed by separation.
    // Shared by copies; population is race-free and value-deterministic
    // because the solve is pure.
    struct ChordCache {
        std::shared_mutex mutex;
        std::unordered_map<std::uint64_t, std::optional<ChordGeometry>> map;
    };
    std::shared_ptr<ChordCache> cache_ = std::make_shared<ChordCache>();

    // Tabulated mode: tensor-product not-a-knot splines, one per grid row.
    std::vector<double> grid_;
    std::vector<CubicSpline> row_splines_;
};

// Richardson-extrapolated tangential finite differences of tau and rho.
// slot = 0 differentiates the first argument, slot = 1 the second.
double fd_tangential_tau(const BoundaryDataset& ds, int slot, int order, double x, double y,
                         double h);
double fd_tangential_rho(const BoundaryDataset& ds, int slot, int order, double x, double y,
                         double h);

}  // namespace lensjet
