// Acceptance checks, one line per criterion. `acceptance N` runs only criterion N;
// the exit code is nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "cmc/cmc.hpp"
#include "oracle.hpp"

using namespace cmc;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

FundamentalData analytic_data(const ConformalImmersion& imm, int n = 101, bool nonpositive = false) {
    InducedOptions o;
    o.nu = o.nv = n;
    o.nonpositive_nu = nonpositive;
    return induced_data(imm, o);
}

std::vector<ConformalImmersion> structure_suite() {
    return {slice(Chart::poincare(), 0.0), vertical_plane(Chart::poincare()), tilted_plane(oracle::pi / 3),
            vertical_cylinder(Chart::flat(), 0.5), vertical_cylinder(Chart::poincare(), 0.75)};
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    double worst = 0;
    for (const auto& imm : structure_suite()) {
        StructureOptions so;
        so.tolerance = 1e-9;
        const auto r = verify_structure(analytic_data(imm), so);
        if (r.entries.size() != 6) o.pass = false;
        for (const auto& e : r.entries) {
            worst = std::max(worst, e.max_residual);
            if (!(e.max_residual < 1e-9)) o.pass = false;
        }
    }
    const double t = seconds_since(t0);
    o.pass = o.pass && t < 5.0;
    o.detail = fmt("worst residual %.2e over 5 surfaces x 6 equations, %.2f s", worst, t);
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto d = analytic_data(vertical_cylinder(Chart::poincare(), 0.75));
    const auto q = ar_differential(d, -1);
    const double r8 = nu_gradient_identity(d, -1, q).entries.at(0).max_residual;
    const double r9 = nu_laplacian_identity(d).entries.at(0).max_residual;
    double grad = 0, qdev = 0;
    for (const auto& s : d.samples) grad = std::max(grad, std::abs(s.grad_nu2));
    for (const auto& z : q.Q) qdev = std::max(qdev, std::abs(std::abs(z) - 0.3125));
    o.pass = r8 < 1e-9 && r9 < 1e-9 && grad < 1e-9 && qdev < 1e-9;
    o.detail = fmt("eq8 %.2e, eq9 %.2e, max |grad nu|^2 %.2e, max ||Q| - 0.3125| %.2e", r8, r9, grad, qdev);
    return o;
}

Outcome criterion3() {
    Outcome o;
    std::size_t compared = 0, mismatched = 0;
    auto suite = structure_suite();
    suite.push_back(vertical_cylinder(Chart::poincare(), 0.75).sample(61, 61));
    suite.push_back(slice(Chart::sphere(), 0.3));
    for (const auto& imm : suite) {
        const auto d = analytic_data(imm);
        const auto a = nu_laplacian_residuals(d), b = jacobi_residuals(d);
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (std::isnan(a[k]) && std::isnan(b[k])) continue;
            ++compared;
            if (a[k] != b[k]) ++mismatched;
        }
    }
    o.pass = mismatched == 0 && compared > 0;
    o.detail = fmt("%.0f samples compared, %.0f differ", static_cast<double>(compared), static_cast<double>(mismatched));
    return o;
}

Outcome criterion4() {
    Outcome o;
    double min_lap = INFINITY, worst_bound = 0;
    int surfaces = 0;
    for (double H : {0.75, 1.0 / std::sqrt(2.0), 1.0}) {
        const auto cyl = analytic_data(vertical_cylinder(Chart::poincare(), H), 41, true);
        GraphProblem gp;
        gp.chart = Chart::poincare();
        gp.domain = Region::disk(0, 0, coordinate_radius_of_ball(gp.chart, 0.5));
        gp.n = 65;
        gp.H = H;
        const auto sol = solve_graph(gp);
        if (!sol.converged) o.pass = false;
        for (double m : {1.0, 2.0}) {
            for (const auto& p : {f_subharmonic(cyl, m), graph_subharmonic(sol, m)}) {
                ++surfaces;
                min_lap = std::min(min_lap, p.min_lap_f);
                worst_bound = std::max({worst_bound, p.f_max, p.lower_bound - p.f_min});
                o.pass = o.pass && p.min_lap_f >= -1e-8 && p.f_min >= p.lower_bound - 1e-12 && p.f_max <= 1e-12;
            }
        }
    }
    const double spot = f_m(-1.0, 1.0, 1.0 / std::sqrt(2.0));
    o.pass = o.pass && std::abs(spot + oracle::pi / 4) <= 1e-12;
    o.detail = fmt("%.0f profiles, min lap f %.3e, worst bound excess %.2e, f(-1) + pi/4 = %.1e", surfaces, min_lap,
                   worst_bound, spot + oracle::pi / 4);
    return o;
}

Outcome criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    const Chart P = Chart::poincare();
    auto ok_at = [&](double delta) {
        return necessary_condition(P, Region::disk(0, 0, coordinate_radius_of_ball(P, delta)), 0.75).ok;
    };
    int flips = 0;
    double flip_at = NAN;
    bool prev = ok_at(0.5);
    for (double delta : {1.0, 1.5, 2.0, 3.0}) {
        const bool ok = ok_at(delta);
        if (ok != prev) {
            ++flips;
            flip_at = delta;
        }
        prev = ok;
    }
    const double thr = obstruction_radius(P, 0.75, 1.5, 2.0);
    const double exact = 2 * std::atanh(1 / 1.5);
    auto solve = [&](double delta) {
        GraphProblem gp;
        gp.chart = P;
        gp.domain = Region::disk(0, 0, coordinate_radius_of_ball(P, delta));
        gp.n = 129;
        gp.H = 0.75;
        return solve_graph(gp);
    };
    const auto small = solve(0.5), large = solve(2.0);
    const double t = seconds_since(t0);
    o.pass = flips == 1 && flip_at == 2.0 && std::abs(thr - exact) <= 1e-6 && small.converged &&
             small.final_residual < 1e-8 && !large.converged && t < 60;
    o.detail = fmt("threshold %.10f (exact %.10f), small-ball residual %.1e, large ball converged=%.0f", thr, exact,
                   small.final_residual, large.converged ? 1.0 : 0.0) +
               fmt(", %.1f s", t);
    return o;
}

Outcome criterion6() {
    Outcome o;
    const Region omega = Region::disk(0, 0, 0.5);
    std::vector<double> defects;
    double rel = 0;
    bool bound = true;
    for (int n : {33, 65, 129}) {
        GraphProblem gp;
        gp.chart = Chart::flat();
        gp.domain = Region::disk(0, 0, 0.9);
        gp.n = n;
        gp.H = 0.5;
        const auto s = solve_graph(gp);
        if (!s.converged) o.pass = false;
        const auto f = flux_check(s, omega);
        defects.push_back(f.identity_defect);
        rel = f.identity_defect / f.curvature_integral;
        for (double rr : {0.25, 0.5, 0.75}) bound = bound && flux_check(s, Region::disk(0, 0, rr)).bound_ok;
    }
    const double order1 = std::log2(defects[0] / defects[1]), order2 = std::log2(defects[1] / defects[2]);
    o.pass = o.pass && rel < 0.01 && order1 >= 1.9 && order2 >= 1.9 && bound;
    o.detail = fmt("relative defect %.2e at 129^2, observed orders %.2f, %.2f, flux <= A: %.0f", rel, order1, order2,
                   bound ? 1.0 : 0.0);
    return o;
}

Outcome criterion7() {
    Outcome o;
    const double j0sq = 5.7832;
    const double shoot = dirichlet_lambda1_ball(0, 1).lambda1;
    const double grid = dirichlet_lambda1_disk_grid(Chart::flat(), 1.0, 129).lambda1;
    const bool disk_ok = std::abs(shoot - j0sq) / j0sq < 0.01 && std::abs(grid - j0sq) / j0sq < 0.01;
    const double l10 = dirichlet_lambda1_ball(-1, 10).lambda1;
    const bool b10_ok = l10 > 0.25 && l10 <= 0.2625;
    const std::vector<double> deltas{2, 10, 20};
    const auto ch = cheeger_ball_family(-1, deltas);
    double ratio_err = 0;
    bool ineq = true;
    for (const auto& [d, r] : ch.ratios) {
        ratio_err = std::max(ratio_err, std::abs(r - oracle::coth(d / 2)));
        ineq = ineq && cheeger_inequality_check(r, dirichlet_lambda1_ball(-1, d).lambda1);
    }
    o.pass = disk_ok && b10_ok && ratio_err < 1e-9 && ineq;
    o.detail = fmt("disk: shooting %.6f, grid %.6f; lambda1(B10) = %.8f", shoot, grid, l10) +
               (b10_ok ? " in (0.25, 0.2625]" : " NOT in (0.25, 0.2625]") +
               fmt("; coth error %.1e; cheeger inequality ", ratio_err) + (ineq ? "holds" : "fails");
    return o;
}

Outcome criterion8() {
    Outcome o;
    const auto r = stability_spectrum(0.75, -1, 10, 10);
    const bool close = std::abs(r.lambda1 - (-1.1266)) <= 0.02 * 1.1266;
    int agree = 0, compared = 0, skipped = 0;
    for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 5; ++k) {
            const double H = 0.55 + 0.1125 * i, L = 2.0 + 2.5 * k, rr = L;
            const auto s = stability_spectrum(H, -1, L, rr);
            if (std::abs(s.lambda1) < s.discretization_error_estimate) {
                ++skipped;
                continue;
            }
            ++compared;
            if (instability_condition(H, -1, L, rr) == (s.lambda1 < 0)) ++agree;
        }
    const double side = minimal_unstable_square(0.75, -1);
    o.pass = close && agree == compared && std::abs(side - 3.9738) <= 1e-4;
    o.detail = fmt("lambda1(J) = %.6f; sweep agreement %.0f/%.0f", r.lambda1, agree, compared) +
               fmt(" (%.0f inside error band); minimal square %.6f", skipped, side);
    return o;
}

Outcome criterion9() {
    Outcome o;
    auto suite = structure_suite();
    suite.push_back(vertical_cylinder(Chart::poincare(), 0.75).sample(41, 41));
    int negated = 0, preserved = 0, translated = 0;
    for (const auto& imm : suite) {
        InducedOptions a;
        a.nu = a.nv = 41;
        InducedOptions b = a;
        b.flip_normal = true;
        const auto da = induced_data(imm, a), db = induced_data(imm, b);
        bool neg = true;
        for (std::size_t k = 0; k < da.samples.size(); ++k) {
            const auto &x = da.samples[k], &y = db.samples[k];
            neg = neg && y.nu == -x.nu && y.H == -x.H && y.p == -x.p;
        }
        negated += neg;
        const auto ra = verify_structure(da), rb = verify_structure(db);
        bool same = ra.entries.size() == rb.entries.size();
        for (std::size_t k = 0; same && k < ra.entries.size(); ++k)
            same = ra.entries[k].max_residual == rb.entries[k].max_residual &&
                   ra.entries[k].rms_residual == rb.entries[k].rms_residual;
        preserved += same;
        translated += induced_data(imm.translated(3.25), a).samples == da.samples;
    }
    const int n = static_cast<int>(suite.size());
    o.pass = negated == n && preserved == n && translated == n;
    o.detail = fmt("flip negates %.0f/%.0f, residuals preserved %.0f/%.0f", negated, n, preserved, n) +
               fmt(", translation bitwise %.0f/%.0f", translated, n);
    return o;
}

Outcome criterion10() {
    Outcome o;
    const std::string path = std::string(CMC_SCENARIO_DIR) + "/catalog-all.toml";
    const auto a = report_to_json_text(run_scenario_file(path));
    const auto b = report_to_json_text(run_scenario_file(path));
    const auto r = parse_report_json(a);
    o.pass = a == b && r.pass() && !r.steps.empty();
    o.detail = fmt("%.0f bytes, identical=%.0f, scenario pass=%.0f", static_cast<double>(a.size()), a == b ? 1.0 : 0.0,
                   r.pass() ? 1.0 : 0.0);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                            criterion5, criterion6, criterion7, criterion8,
                                                            criterion9, criterion10};
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    bool all = true;
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) {
        if (only && i != only) continue;
        Outcome o;
        try {
            o = criteria[i - 1]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d: %s  %s\n", i, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
