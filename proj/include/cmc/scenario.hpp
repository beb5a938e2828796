#pragma once

// Scenario runner: a config lists steps (operation + parameters); each step is
// executed in order and recorded. Failures are recorded and the run continues
// unless the scenario or the step sets fail_fast.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cmc/ambient.hpp"
#include "cmc/catalog.hpp"
#include "cmc/config.hpp"
#include "cmc/graph_solver.hpp"
#include "cmc/immersion.hpp"
#include "cmc/report.hpp"
#include "cmc/spectral.hpp"

namespace cmc {

/// Human-readable classification for (H, c).
inline std::string predict(double H, double c, std::optional<double> nu_constant = {}) {
    return classify(H, c, nu_constant).statement;
}

struct RunOptions {
    std::optional<int> grid;          // default resolution for steps that do not set n
    std::optional<double> tolerance;  // default residual tolerance
    std::string base_dir;             // for relative file references in steps
};

struct Scenario {
    std::string name;
    bool fail_fast = false;
    std::map<std::string, double> tolerances;
    std::map<std::string, std::string> outputs;
    std::map<std::string, ConfigTable> charts;
    std::vector<ConfigTable> steps;
};

/// Reads a parameter as a number; strings are evaluated as constant expressions ("pi/3").
class StepParams {
public:
    StepParams(const ConfigTable& t, const Scenario& sc, const RunOptions& opt) : t_(t), sc_(sc), opt_(opt) {}

    bool has(const std::string& k) const { return t_.has(k); }

    double number(const std::string& k) const {
        const ConfigValue* v = t_.find(k);
        if (!v) throw Error(ErrorKind::domain, "step parameter '" + k + "' is required");
        if (auto* d = std::get_if<double>(v)) return *d;
        if (auto* s = std::get_if<std::string>(v)) {
            const Expression e = Expression::parse(*s);
            return e.evaluate(0.0, 0.0);
        }
        throw Error(ErrorKind::domain, "step parameter '" + k + "' must be a number");
    }
    double number(const std::string& k, double fallback) const { return has(k) ? number(k) : fallback; }
    int integer(const std::string& k, int fallback) const {
        return has(k) ? static_cast<int>(std::lround(number(k))) : fallback;
    }
    int resolution(int fallback) const { return integer("n", opt_.grid.value_or(fallback)); }
    bool flag(const std::string& k, bool fallback) const {
        const ConfigValue* v = t_.find(k);
        if (!v) return fallback;
        if (auto* b = std::get_if<bool>(v)) return *b;
        throw Error(ErrorKind::domain, "step parameter '" + k + "' must be true or false");
    }
    std::string text(const std::string& k, const std::string& fallback = "") const {
        const ConfigValue* v = t_.find(k);
        if (!v) return fallback;
        if (auto* s = std::get_if<std::string>(v)) return *s;
        throw Error(ErrorKind::domain, "step parameter '" + k + "' must be a string");
    }
    std::vector<double> list(const std::string& k) const {
        const ConfigValue* v = t_.find(k);
        if (!v) throw Error(ErrorKind::domain, "step parameter '" + k + "' is required");
        if (auto* a = std::get_if<std::vector<double>>(v)) return *a;
        if (auto* d = std::get_if<double>(v)) return {*d};
        throw Error(ErrorKind::domain, "step parameter '" + k + "' must be a number list");
    }
    std::optional<double> optional_number(const std::string& k) const {
        if (!has(k)) return std::nullopt;
        return number(k);
    }

    Chart chart(const std::string& fallback = "flat") const { return resolve_chart(sc_, text("chart", fallback)); }

    static Chart resolve_chart(const Scenario& sc, const std::string& name) {
        if (name == "flat" || name == "poincare" || name == "hyperbolic" || name == "sphere")
            return chart_from_config({{"model", name}});
        auto it = sc.charts.find(name);
        if (it == sc.charts.end()) throw Error(ErrorKind::domain, "unresolvable chart '" + name + "'");
        std::map<std::string, std::string> cfg;
        for (const auto& [k, v] : it->second.values) cfg[k] = render(v);
        return chart_from_config(cfg);
    }

    std::optional<double> tolerance() const {
        if (has("tol")) return number("tol");
        return opt_.tolerance;
    }
    const std::string& base_dir() const { return opt_.base_dir; }

private:
    const ConfigTable& t_;
    const Scenario& sc_;
    const RunOptions& opt_;
};

namespace detail {

inline ModelDescriptor build_model(const StepParams& p) {
    const std::string name = p.text("model");
    const auto kind = model_kind_from_name(name);
    if (!kind) throw Error(ErrorKind::domain, "unknown model '" + name + "'");
    switch (*kind) {
        case ModelKind::slice: return slice_model(p.chart("poincare"), p.number("t0", 0.0));
        case ModelKind::vertical_plane: return vertical_plane_model(p.chart("poincare"));
        case ModelKind::tilted_plane: return tilted_plane_model(p.chart("flat"), p.number("theta"));
        case ModelKind::vertical_cylinder: return vertical_cylinder_model(p.chart("poincare"), p.number("H"));
    }
    throw Error(ErrorKind::domain, "unknown model");
}

inline ConformalImmersion step_immersion(const StepParams& p) {
    if (p.has("file")) {
        std::string path = p.text("file");
        if (!p.base_dir().empty() && !path.empty() && path.front() != '/') path = p.base_dir() + "/" + path;
        return read_immersion_grid(path);
    }
    ConformalImmersion imm = build_model(p).immersion;
    if (p.has("sampled")) {
        const int n = p.integer("sampled", 101);
        imm = imm.sample(n, n);
    }
    return imm;
}

inline InducedOptions induced_options(const StepParams& p) {
    InducedOptions o;
    o.nu = o.nv = p.resolution(101);
    o.flip_normal = p.flag("flip_normal", false);
    o.nonpositive_nu = p.flag("nonpositive_nu", false);
    if (p.has("tol_conf")) o.tol_conf = p.number("tol_conf");
    return o;
}

inline void record_data_summary(StepRecord& rec, const FundamentalData& d) {
    rec.value("samples", static_cast<double>(d.samples.size()));
    rec.value("max_conformality", d.max_conformality);
    double nu_lo = 1, nu_hi = -1, H_lo = INFINITY, H_hi = -INFINITY;
    for (const auto& s : d.samples)
        if (s.interior) {
            nu_lo = std::min(nu_lo, s.nu);
            nu_hi = std::max(nu_hi, s.nu);
            H_lo = std::min(H_lo, s.H);
            H_hi = std::max(H_hi, s.H);
        }
    rec.value("nu_min", nu_lo);
    rec.value("nu_max", nu_hi);
    rec.value("H_min", H_lo);
    rec.value("H_max", H_hi);
}

// Pointwise algebraic identities of the fundamental data.
inline ResidualReport algebraic_identities(const FundamentalData& d, double tol) {
    ResidualAccumulator hopf, tang, bound;
    for (const auto& s : d.samples) {
        if (!s.interior) continue;
        hopf.add(4.0 * std::norm(s.p) - s.lambda * s.lambda * (s.H * s.H - s.K));
        tang.add(s.T_norm2 + s.nu * s.nu - 1.0);
        bound.add(std::max(0.0, s.nu * s.nu - 1.0));
    }
    ResidualReport r;
    r.subject = d.label;
    r.entries = {hopf.finish("hopf_norm", tol), tang.finish("tangent_split", tol), bound.finish("nu_bound", tol)};
    return r;
}

inline void op_catalog(const StepParams& p, StepRecord& rec) {
    const ModelDescriptor m = build_model(p);
    const FundamentalData d = induced_data(m.immersion, induced_options(p));
    StructureOptions so;
    so.tolerance = p.tolerance();
    rec.add(verify_structure(d, so));
    const double tol = so.tolerance.value_or(default_tolerance(d));
    rec.add(algebraic_identities(d, tol));
    ResidualAccumulator expect;
    for (const auto& s : d.samples) {
        if (!std::isnan(m.expected.lambda)) expect.add(s.lambda - m.expected.lambda);
        expect.add(s.nu - m.expected.nu);
        expect.add(s.H - m.expected.H);
        expect.add(s.K - m.expected.K);
        expect.add(std::abs(s.p - m.expected.p));
    }
    rec.residuals.push_back(expect.finish("expected_invariants", 1e-9));
    record_data_summary(rec, d);
    rec.note("model", to_string(m.kind));
    rec.note("chart", chart_spec_string(m.chart));
    rec.note("note", m.note);
}

inline void op_verify(const StepParams& p, StepRecord& rec) {
    const ConformalImmersion imm = step_immersion(p);
    const FundamentalData d = induced_data(imm, induced_options(p));
    StructureOptions so;
    so.tolerance = p.tolerance();
    so.include_H_z = p.flag("include_H_z", false);
    rec.add(verify_structure(d, so));
    const double tol = so.tolerance.value_or(default_tolerance(d));
    rec.add(algebraic_identities(d, tol));
    const double c = p.has("c") ? p.number("c") : imm.chart().kappa0();
    const QField q = ar_differential(d, c);
    rec.value("c", c);
    rec.value("Q_re_center", q.Q[q.Q.size() / 2].real());
    rec.value("Q_im_center", q.Q[q.Q.size() / 2].imag());
    rec.value("max_qzbar", q.max_qzbar);
    if (q.holomorphic_expected()) {
        ResidualAccumulator hq;
        for (double x : q.qzbar_abs)
            if (!std::isnan(x)) hq.add(x);
        rec.residuals.push_back(hq.finish("q_holomorphic", tol));
    } else {
        rec.note("q_holomorphic", "not asserted (H or curvature not constant)");
    }
    if (c != 0.0) rec.add(nu_gradient_identity(d, c, q, so.tolerance));
    rec.add(nu_laplacian_identity(d, so.tolerance));
    rec.add(jacobi_residual(d, so.tolerance));
    const auto a = nu_laplacian_residuals(d), b = jacobi_residuals(d);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
        same = (std::isnan(a[i]) && std::isnan(b[i])) || a[i] == b[i];
    rec.check("jacobi_equals_laplacian", same);
    record_data_summary(rec, d);
    rec.note("chart", chart_spec_string(imm.chart()));
    rec.note("source", p.has("file") ? p.text("file") : p.text("model"));
}

inline void op_invariance(const StepParams& p, StepRecord& rec) {
    const ConformalImmersion imm = step_immersion(p);
    InducedOptions o = induced_options(p);
    const FundamentalData d = induced_data(imm, o);
    o.flip_normal = !o.flip_normal;
    const FundamentalData f = induced_data(imm, o);
    bool negated = true;
    for (std::size_t k = 0; k < d.samples.size(); ++k) {
        const auto &a = d.samples[k], &b = f.samples[k];
        negated = negated && b.nu == -a.nu && b.H == -a.H && b.p == -a.p;
    }
    rec.check("flip_negates_nu_H_p", negated);
    const auto rd = verify_structure(d), rf = verify_structure(f);
    bool same = rd.entries.size() == rf.entries.size();
    for (std::size_t i = 0; same && i < rd.entries.size(); ++i)
        same = rd.entries[i].max_residual == rf.entries[i].max_residual &&
               rd.entries[i].rms_residual == rf.entries[i].rms_residual;
    rec.check("flip_preserves_residuals", same);
    const FundamentalData t = induced_data(imm.translated(p.number("t0", 2.5)), induced_options(p));
    rec.check("translation_preserves_data", t.samples == d.samples);
    rec.add(rd);
}

inline void op_subharmonic(const StepParams& p, StepRecord& rec) {
    const double H = p.number("H"), m = p.number("m", 1.0);
    const std::string surface = p.text("surface", "cylinder");
    SubharmonicOptions so;
    if (p.has("lap_tol")) so.lap_tol = p.number("lap_tol");
    SubharmonicProfile prof;
    if (surface == "cylinder") {
        InducedOptions o = induced_options(p);
        o.nonpositive_nu = true;
        const FundamentalData d = induced_data(vertical_cylinder(Chart::poincare(), H), o);
        prof = f_subharmonic(d, m, -1.0, so);
    } else if (surface == "graph") {
        GraphProblem gp;
        gp.chart = Chart::poincare();
        gp.domain = Region::disk(0, 0, coordinate_radius_of_ball(gp.chart, p.number("delta", 0.5)));
        gp.n = p.resolution(65);
        gp.H = H;
        const GraphSolution s = solve_graph(gp);
        rec.check("graph_converged", s.converged);
        prof = graph_subharmonic(s, m, -1.0, so);
    } else {
        throw Error(ErrorKind::domain, "subharmonic surface must be 'cylinder' or 'graph'");
    }
    rec.value("lower_bound", prof.lower_bound);
    rec.value("f_min", prof.f_min);
    rec.value("f_max", prof.f_max);
    rec.value("min_lap_f", prof.min_lap_f);
    rec.check("subharmonic", prof.subharmonic);
    rec.check("within_bounds", prof.within_bounds);
}

inline void op_necessary(const StepParams& p, StepRecord& rec) {
    const Chart chart = p.chart("poincare");
    const double H = p.number("H");
    const std::vector<double> deltas = p.has("deltas") ? p.list("deltas") : std::vector<double>{p.number("delta")};
    int flips = 0;
    std::optional<bool> prev;
    double flip_at = NAN;
    for (double delta : deltas) {
        const auto nc = necessary_condition(chart, Region::disk(0, 0, coordinate_radius_of_ball(chart, delta)), H);
        const std::string tag = "delta=" + detail::g17(delta);
        rec.value(tag + ":lhs", nc.lhs);
        rec.value(tag + ":area", nc.boundary_area);
        rec.value(tag + ":ok", nc.ok ? 1.0 : 0.0);
        if (prev && *prev != nc.ok) {
            ++flips;
            flip_at = delta;
        }
        prev = nc.ok;
    }
    rec.value("flips", flips);
    if (p.has("expect_flip")) {
        const auto br = p.list("expect_flip");
        if (br.size() != 2) throw Error(ErrorKind::domain, "expect_flip needs [lo, hi]");
        rec.check("single_flip_in_bracket", flips == 1 && flip_at > br[0] && flip_at <= br[1]);
        const double thr = obstruction_radius(chart, H, br[0], br[1]);
        rec.value("threshold", thr);
        if (chart.tag() == ModelTag::hyperbolic && 2 * H > std::sqrt(-chart.kappa0())) {
            const double a = std::sqrt(-chart.kappa0());
            const double exact = 2.0 * std::atanh(a / (2 * H)) / a;
            rec.value("threshold_closed_form", exact);
            rec.check("threshold_matches", std::abs(thr - exact) <= 1e-6);
        }
    }
}

inline void op_solve_graph(const StepParams& p, StepRecord& rec) {
    GraphProblem gp;
    gp.chart = p.chart("poincare");
    if (p.has("delta"))
        gp.domain = Region::disk(0, 0, coordinate_radius_of_ball(gp.chart, p.number("delta")));
    else
        gp.domain = Region::disk(0, 0, p.number("radius"));
    gp.n = p.resolution(65);
    gp.H = p.number("H");
    gp.solver.residual_tol = p.number("residual_tol", gp.solver.residual_tol);
    gp.solver.max_iterations = p.integer("max_iterations", gp.solver.max_iterations);
    const GraphSolution s = solve_graph(gp);
    rec.value("converged", s.converged ? 1 : 0);
    rec.value("iterations", s.iterations);
    rec.value("final_residual", s.final_residual);
    rec.value("max_gradient", s.max_gradient);
    rec.note("status", s.status);
    const auto nc = necessary_condition(gp.chart, gp.domain, gp.H);
    rec.value("necessary_lhs", nc.lhs);
    rec.value("boundary_area", nc.boundary_area);
    rec.value("necessary_ok", nc.ok ? 1 : 0);
    const bool expect = p.flag("expect_converged", true);
    rec.check(expect ? "converged" : "not_converged", s.converged == expect);
    if (s.converged && p.number("flux_fraction", 0.5) > 0) {
        const Region sub = Region::disk(gp.domain.cx, gp.domain.cy, p.number("flux_fraction", 0.5) * gp.domain.radius);
        const auto f = flux_check(s, sub, p.optional_number("flux_tol"));
        rec.value("flux", f.flux);
        rec.value("curvature_integral", f.curvature_integral);
        rec.value("flux_area", f.boundary_area);
        rec.value("identity_defect", f.identity_defect);
        rec.check("flux_identity", f.identity_ok);
        rec.check("flux_bound", f.bound_ok);
    }
}

inline void op_spectrum(const StepParams& p, StepRecord& rec) {
    const std::string kind = p.text("kind", "ball");
    SpectrumResult r;
    if (kind == "ball") {
        r = dirichlet_lambda1_ball(p.number("kappa0"), p.number("delta"), p.integer("n", 4096));
    } else if (kind == "disk_grid") {
        r = dirichlet_lambda1_disk_grid(Chart::space_form(p.number("kappa0")), p.number("delta"), p.resolution(129));
    } else if (kind == "stability") {
        r = stability_spectrum(p.number("H"), p.number("kappa0"), p.number("L"), p.number("r"), p.integer("grid", 16));
        rec.check("closed_form_2pct", std::abs(r.lambda1 - r.reference) <= 0.02 * std::abs(r.reference));
        rec.check("ordering", r.lambda2 >= r.lambda1);
        const bool flag = instability_condition(p.number("H"), p.number("kappa0"), p.number("L"), p.number("r"));
        if (std::abs(r.lambda1) > r.discretization_error_estimate) rec.check("instability_agrees", flag == (r.lambda1 < 0));
    } else {
        throw Error(ErrorKind::domain, "spectrum kind must be ball, disk_grid or stability");
    }
    rec.value("lambda1", r.lambda1);
    if (!std::isnan(r.lambda2)) rec.value("lambda2", r.lambda2);
    rec.value("reference", r.reference);
    if (!std::isnan(r.reference)) rec.value("relative_error", std::abs(r.lambda1 - r.reference) / std::abs(r.reference));
    rec.value("error_estimate", r.discretization_error_estimate);
    rec.check("one_signed", r.one_signed);
    if (p.has("expect")) {
        const auto br = p.list("expect");
        if (br.size() != 2) throw Error(ErrorKind::domain, "expect needs (lo, hi]");
        rec.check("in_expected_range", r.lambda1 > br[0] && r.lambda1 <= br[1]);
    }
}

inline void op_cheeger(const StepParams& p, StepRecord& rec) {
    const double k = p.number("kappa0");
    const auto est = cheeger_ball_family(k, p.list("deltas"));
    for (const auto& [d, ratio] : est.ratios) rec.value("ratio:delta=" + detail::g17(d), ratio);
    rec.value("infimum_estimate", est.infimum_estimate);
    if (p.flag("inequality", k < 0)) {
        bool all = true;
        for (const auto& [d, ratio] : est.ratios) {
            const double l1 = dirichlet_lambda1_ball(k, d, p.integer("n", 4096)).lambda1;
            rec.value("lambda1:delta=" + detail::g17(d), l1);
            all = all && cheeger_inequality_check(ratio, l1);
        }
        rec.check("cheeger_inequality", all);
    }
}

inline void op_instability(const StepParams& p, StepRecord& rec) {
    const double H = p.number("H"), k = p.number("kappa0"), L = p.number("L"), r = p.number("r");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const bool flag = instability_condition(H, k, L, r);
    rec.value("lhs", pi2 / (L * L) + pi2 / (4 * r * r));
    rec.value("rhs", 4 * H * H + k);
    rec.value("unstable", flag ? 1 : 0);
    if (p.has("expect")) rec.check("expected", flag == p.flag("expect", false));
}

inline void op_minimal_square(const StepParams& p, StepRecord& rec) {
    const double s = minimal_unstable_square(p.number("H"), p.number("kappa0"));
    rec.value("side", s);
    if (p.has("expect")) rec.check("expected", std::abs(s - p.number("expect")) <= p.number("expect_tol", 1e-4));
}

inline void op_predict(const StepParams& p, StepRecord& rec) {
    const std::string s = predict(p.number("H"), p.number("c"), p.optional_number("nu"));
    rec.note("prediction", s);
    if (p.has("expect")) rec.check("expected", s == p.text("expect"));
}

inline void op_curvature(const StepParams& p, StepRecord& rec) {
    const Chart chart = p.chart("flat");
    const Region region = Region::from_string(p.text("region", chart.domain().to_string()));
    const auto cs = curvature_infimum(chart, region, p.resolution(101));
    rec.value("c_inf", cs.c_inf);
    rec.value("argmin_x", cs.argmin_x);
    rec.value("argmin_y", cs.argmin_y);
    rec.value("resolution", cs.nx);
    if (p.has("expect")) rec.check("expected", std::abs(cs.c_inf - p.number("expect")) <= p.number("expect_tol", 1e-9));
}

using StepOp = void (*)(const StepParams&, StepRecord&);

inline const std::map<std::string, StepOp>& operations() {
    static const std::map<std::string, StepOp> ops = {
        {"catalog", op_catalog},         {"verify", op_verify},
        {"invariance", op_invariance},   {"subharmonic", op_subharmonic},
        {"necessary_condition", op_necessary}, {"solve_graph", op_solve_graph},
        {"spectrum", op_spectrum},       {"cheeger", op_cheeger},
        {"instability", op_instability}, {"minimal_square", op_minimal_square},
        {"predict", op_predict},         {"curvature", op_curvature},
    };
    return ops;
}

}  // namespace detail

/// Builds a scenario from a parsed config, validating operation names and chart references.
inline Scenario make_scenario(const Config& cfg) {
    Scenario sc;
    if (auto* v = cfg.root.find("name")) {
        if (!std::holds_alternative<std::string>(*v))
            throw ParseError("name must be a string", cfg.root.key_lines.at("name"), 1);
        sc.name = std::get<std::string>(*v);
    }
    if (auto* v = cfg.root.find("fail_fast")) {
        if (!std::holds_alternative<bool>(*v))
            throw ParseError("fail_fast must be true or false", cfg.root.key_lines.at("fail_fast"), 1);
        sc.fail_fast = std::get<bool>(*v);
    }
    for (const auto& [name, table] : cfg.tables) {
        if (name == "tolerances") {
            for (const auto& [k, v] : table.values) {
                const double* d = std::get_if<double>(&v);
                if (!d || !(*d > 0)) throw ParseError("tolerance '" + k + "' must be a positive number", table.key_lines.at(k), 1);
                sc.tolerances[k] = *d;
            }
        } else if (name == "output") {
            for (const auto& [k, v] : table.values) sc.outputs[k] = render(v);
        } else if (name.rfind("chart.", 0) == 0) {
            sc.charts[name.substr(6)] = table;
        } else {
            throw ParseError("unknown table [" + name + "]", table.line, 1);
        }
    }
    const auto& ops = detail::operations();
    for (const auto& step : cfg.steps) {
        const ConfigValue* op = step.find("op");
        if (!op || !std::holds_alternative<std::string>(*op)) throw ParseError("step needs op = \"...\"", step.line, 1);
        const std::string& name = std::get<std::string>(*op);
        if (!ops.count(name)) throw ParseError("unknown operation '" + name + "'", step.key_lines.at("op"), 1);
        if (auto* c = step.find("chart")) {
            if (!std::holds_alternative<std::string>(*c)) throw ParseError("chart must be a name", step.key_lines.at("chart"), 1);
            StepParams::resolve_chart(sc, std::get<std::string>(*c));  // throws when unresolvable
        }
        sc.steps.push_back(step);
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) { return make_scenario(load_config(path)); }

inline VerificationReport run_scenario(const Scenario& sc, const RunOptions& opt = {}) {
    VerificationReport report;
    report.scenario = sc.name;
    const auto& ops = detail::operations();
    for (std::size_t i = 0; i < sc.steps.size(); ++i) {
        const ConfigTable& t = sc.steps[i];
        StepRecord rec;
        rec.index = static_cast<int>(i);
        rec.operation = std::get<std::string>(t.values.at("op"));
        for (const auto& [k, v] : t.values)
            if (k != "op") rec.parameters[k] = render(v);
        const StepParams params(t, sc, opt);
        try {
            ops.at(rec.operation)(params, rec);
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        for (auto& r : rec.residuals) {
            auto it = sc.tolerances.find(r.equation_id);
            if (it != sc.tolerances.end()) {
                r.tolerance = it->second;
                r.pass = r.max_residual <= r.tolerance;
            }
        }
        rec.finalize();
        const bool stop = !rec.pass && (sc.fail_fast || params.flag("fail_fast", false));
        report.steps.push_back(std::move(rec));
        if (stop) break;
    }
    return report;
}

inline VerificationReport run_scenario_file(const std::string& path, RunOptions opt = {}) {
    if (opt.base_dir.empty()) {
        const auto slash = path.find_last_of('/');
        opt.base_dir = slash == std::string::npos ? "." : path.substr(0, slash);
    }
    return run_scenario(load_scenario(path), opt);
}

}  // namespace cmc
