// Command-line frontend: builds lens tables, the rearranged strip pair, and
// jet-recovery reports as CSV/JSON for offline use.
//
// Exit codes: 0 success/claims hold, 1 claims violated, 2 usage error,
// 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lensjet/boundary_data.hpp"
#include "lensjet/errors.hpp"
#include "lensjet/jet_recovery.hpp"
#include "lensjet/lens.hpp"
#include "lensjet/parallel.hpp"
#include "lensjet/section5.hpp"
#include "lensjet/warp.hpp"

namespace {

using namespace lensjet;
namespace fs = std::filesystem;

struct GlobalOpts {
    std::string out_dir;
    double tol = 1e-8;
    int threads = 0;  // 0: LENSJET_THREADS or hardware
    unsigned seed = 0;
};

WarpFunction load_warp(const std::string& spec, std::optional<double> length) {
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
        std::ifstream in(spec);
        if (!in) throw Error(ErrorCode::io_error, "cannot open warp file " + spec);
        return WarpFunction::from_json(nlohmann::json::parse(in));
    }
    return WarpFunction::preset(spec, length);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out << text;
}

fs::path out_path(const GlobalOpts& g, const std::string& name) {
    if (g.out_dir.empty()) return name;
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / name;
}

int cmd_lens_compare(const GlobalOpts& g, const std::string& wa, const std::string& wb,
                     int directions, const std::string& method) {
    const WarpFunction a = load_warp(wa, std::nullopt);
    const WarpFunction b = load_warp(wb, std::nullopt);
    const std::vector<double> grid = chebyshev_grid(directions);

    nlohmann::json summary;
    summary["config"] = {{"a", wa},       {"b", wb},           {"directions", directions},
                         {"tol", g.tol},  {"method", method},  {"seed", g.seed}};

    double worst = 0.0;
    for (const std::string m : method == "both" ? std::vector<std::string>{"quadrature", "ode"}
                                                : std::vector<std::string>{method}) {
        const LensMethod lm = m == "ode" ? LensMethod::ode : LensMethod::quadrature;
        const LensTable ta = build_lens_table(StripMetric{a}, grid, lm, g.threads);
        const LensTable tb = build_lens_table(StripMetric{b}, grid, lm, g.threads);
        {
            std::ofstream csv(out_path(g, "lens_" + a.name() + "_" + m + ".csv"));
            write_lens_csv(csv, ta);
        }
        {
            std::ofstream csv(out_path(g, "lens_" + b.name() + "_" + m + ".csv"));
            write_lens_csv(csv, tb);
        }
        const LensDiscrepancy d = compare_lens(ta, tb);
        summary[m] = {{"sup_dT", d.max_dT}, {"sup_ddx", d.max_ddx}, {"sup_dexit", d.max_dexit}};
        worst = std::max(worst, d.sup());
        std::printf("%-10s sup|dT| = %.3e  sup|ddx| = %.3e  sup|dexit| = %.3e\n", m.c_str(),
                    d.max_dT, d.max_ddx, d.max_dexit);
    }
    summary["pass"] = worst <= g.tol;
    write_file(out_path(g, "lens_compare.json"), summary.dump(2) + "\n");
    std::printf("sup discrepancy %.3e vs tol %.1e -> %s\n", worst, g.tol,
                worst <= g.tol ? "equivalent" : "DIFFERENT");
    return worst <= g.tol ? 0 : 1;
}

int cmd_build_c1(const GlobalOpts& g, int samples, int levels, int directions) {
    Section5Params params;
    params.n_samples = samples;
    const Section5Profile p = build_f1(params);
    const WarpFunction f2 = build_f2(p, samples);

    Section5Tolerances tols;
    tols.levels = levels;
    tols.lens_directions = directions;
    tols.threads = g.threads;
    const Section5Report rep = verify_section5(p, f2, tols);

    write_file(out_path(g, "sec5-f2.json"), f2.to_json().dump() + "\n");
    nlohmann::json j;
    j["config"] = {{"samples", samples}, {"levels", levels}, {"directions", directions}};
    j["equimeasure_gap"] = rep.equimeasure_gap;
    j["f1_slope_at_0"] = rep.f1_slope_at_0;
    j["f2_slope_at_0"] = rep.f2_slope_at_0;
    j["lens"] = {{"sup_dT", rep.lens.max_dT},
                 {"sup_ddx", rep.lens.max_ddx},
                 {"sup_dexit", rep.lens.max_dexit}};
    j["jet_first_differing_order"] = rep.jet_first_differing_order;
    const bool pass = rep.pass_equimeasure && rep.pass_slopes && rep.pass_lens &&
                      rep.jet_first_differing_order == 1;
    j["pass"] = pass;
    write_file(out_path(g, "sec5-report.json"), j.dump(2) + "\n");
    std::printf("equimeasure gap %.3e | f1'(0) = %.6f, f2'(0) = %.2e | lens sup %.3e | first "
                "differing jet order %d\n",
                rep.equimeasure_gap, rep.f1_slope_at_0, rep.f2_slope_at_0, rep.lens.sup(),
                rep.jet_first_differing_order);
    return pass ? 0 : 1;
}

int cmd_jet_recover(const GlobalOpts& g, const std::string& warp, std::optional<double> length,
                    const std::string& data, const std::string& sidecar, double eps, int K,
                    const std::string& export_prefix) {
    std::optional<BoundaryDataset> ds;
    if (!data.empty()) {
        const std::string side = sidecar.empty() ? data + ".json" : sidecar;
        ds = BoundaryDataset::tabulated_from_csv(data, side);
    } else {
        const WarpFunction w = load_warp(warp, length);
        const double window = eps > 0.0 ? eps : 0.05 * w.length();
        ds = BoundaryDataset::oracle(StripMetric{w}, 0.0, window);
    }
    if (!export_prefix.empty()) {
        ds->export_csv(export_prefix + ".csv", export_prefix + ".csv.json");
        std::printf("dataset exported to %s.csv\n", export_prefix.c_str());
    }
    const JetReport rep = run_pipeline(*ds, K);
    const nlohmann::json j = rep.to_json();
    write_file(out_path(g, "jet-report.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";

    if (rep.verdict == "no-evidence") return 0;
    if (int(rep.orders.size()) < std::min(K, 2) + 1) return 3;  // orders lost to instability
    static const double kOrderTol[4] = {1e-8, 1e-4, 1e-2, 0.2};
    for (const auto& o : rep.orders)
        if (o.has_truth && o.k <= 3 && o.abs_err > kOrderTol[o.k]) return 1;
    return 0;
}

int cmd_sublevel(const GlobalOpts& g, const std::string& wa, const std::string& wb, int levels) {
    const WarpFunction a = load_warp(wa, std::nullopt);
    std::optional<WarpFunction> b;
    if (!wb.empty()) b = load_warp(wb, std::nullopt);

    double lo = a.min_value(), hi = a.max_value();
    if (b) {
        lo = std::min(lo, b->min_value());
        hi = std::max(hi, b->max_value());
    }
    std::vector<double> rs(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k)
        rs[std::size_t(k)] = lo + (hi - lo) * (k + 0.5) / levels;
    const std::vector<double> ma = sublevel_profile(a, rs);
    std::vector<double> mb;
    if (b) mb = sublevel_profile(*b, rs);

    std::ostringstream csv;
    csv << (b ? "r,m1,m2\n" : "r,m\n");
    char buf[96];
    for (int k = 0; k < levels; ++k) {
        if (b)
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", rs[std::size_t(k)],
                          ma[std::size_t(k)], mb[std::size_t(k)]);
        else
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", rs[std::size_t(k)],
                          ma[std::size_t(k)]);
        csv << buf;
    }
    write_file(out_path(g, "sublevel.csv"), csv.str());
    std::printf("%d levels in [%.6g, %.6g] written to sublevel.csv\n", levels, lo, hi);
    return 0;
}

int cmd_chord(const std::string& warp, std::optional<double> length, double x1, double x2) {
    const WarpFunction w = load_warp(warp, length);
    const StripMetric m{w};
    nlohmann::json j;
    j["x1"] = x1;
    j["x2"] = x2;
    j["mu"] = std::sqrt(m.f(0.0)) * std::abs(x2 - x1);
    try {
        const ChordGeometry c = chord_for_separation(m, std::abs(x2 - x1));
        j["clairaut"] = c.c;
        j["turning_depth"] = c.y_star;
        j["length"] = c.length;
        j["delta_x"] = c.delta_x;
    } catch (const Error& e) {
        j["error"] = e.what();
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Warped-strip lens data and boundary-jet workbench"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--out", g.out_dir, "output directory (default: current)");
    app.add_option("--tol", g.tol, "pass/fail tolerance");
    app.add_option("--threads", g.threads, "worker threads (default: LENSJET_THREADS or all)");
    app.add_option("--seed", g.seed, "seed echoed into summaries");

    auto* lens = app.add_subcommand("lens-compare", "compare lens tables of two strips");
    std::string la = "cos1", lb = "cos2", lmethod = "both";
    int ldirs = 101;
    lens->add_option("--a", la, "first warp (preset name or JSON file)");
    lens->add_option("--b", lb, "second warp");
    lens->add_option("--directions", ldirs, "number of entry directions");
    lens->add_option("--method", lmethod, "quadrature, ode, or both")
        ->check(CLI::IsMember({"quadrature", "ode", "both"}));

    auto* c1 = app.add_subcommand("build-c1", "construct and verify the rearranged strip pair");
    int samples = 14337, clevels = 256, cdirs = 51;
    c1->add_option("--samples", samples, "sample count for the rearranged profile");
    c1->add_option("--levels", clevels, "equimeasurability levels");
    c1->add_option("--directions", cdirs, "lens comparison directions");

    auto* jet = app.add_subcommand("jet-recover", "recover boundary jets from distance data");
    std::string jwarp = "exp-decay", jdata, jsidecar, jexport;
    double jL = 0.0, jeps = 0.0;
    int K = 2;
    jet->add_option("--warp", jwarp, "oracle warp (preset name or JSON file)");
    jet->add_option("--L", jL, "strip width for presets that accept one");
    jet->add_option("--data", jdata, "tabulated dataset CSV (overrides --warp)");
    jet->add_option("--sidecar", jsidecar, "sidecar JSON (default: <data>.json)");
    jet->add_option("--eps", jeps, "window half-width (default 0.05 L)");
    jet->add_option("--K", K, "highest jet order");
    jet->add_option("--export", jexport, "also export the dataset under this prefix");

    auto* sub = app.add_subcommand("sublevel", "sublevel-measure sweep");
    std::string sa = "cos1", sb;
    int slevels = 256;
    sub->add_option("--a", sa, "warp");
    sub->add_option("--b", sb, "optional second warp");
    sub->add_option("--levels", slevels, "levels");

    auto* chord = app.add_subcommand("chord", "solve one boundary chord (debug)");
    std::string cwarp = "exp-decay";
    double cx1 = 0.0, cx2 = 0.05, cL = 0.0;
    chord->add_option("--warp", cwarp, "warp");
    chord->add_option("--L", cL, "strip width for presets that accept one");
    chord->add_option("--x1", cx1, "first boundary point");
    chord->add_option("--x2", cx2, "second boundary point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (g.threads <= 0) g.threads = default_thread_count();

    try {
        if (lens->parsed()) return cmd_lens_compare(g, la, lb, ldirs, lmethod);
        if (c1->parsed()) return cmd_build_c1(g, samples, clevels, cdirs);
        if (jet->parsed())
            return cmd_jet_recover(g, jwarp, jL > 0.0 ? std::optional<double>(jL) : std::nullopt,
                                   jdata, jsidecar, jeps, K, jexport);
        if (sub->parsed()) return cmd_sublevel(g, sa, sb, slevels);
        if (chord->parsed())
            return cmd_chord(cwarp, cL > 0.0 ? std::optional<double>(cL) : std::nullopt, cx1, cx2);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
