// cmclab: batch front end. Every subcommand runs as a one-step scenario so the
// emitted report has the same shape as `cmclab run`.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmc/cmc.hpp"

namespace {

struct Globals {
    std::optional<int> grid;
    std::optional<double> tol;
    std::string out;
    std::string format = "json";
};

cmc::ConfigTable step_table(const std::string& op) {
    cmc::ConfigTable t;
    t.name = "step";
    t.line = 1;
    t.values["op"] = op;
    t.key_lines["op"] = 1;
    return t;
}

void put(cmc::ConfigTable& t, const std::string& k, cmc::ConfigValue v) {
    t.values[k] = std::move(v);
    t.key_lines[k] = 1;
}

void print_summary(const cmc::VerificationReport& r) {
    for (const auto& s : r.steps) {
        std::printf("[%s] step %d %s\n", s.pass ? "PASS" : "FAIL", s.index, s.operation.c_str());
        for (const auto& [k, v] : s.text) std::printf("    %s: %s\n", k.c_str(), v.c_str());
        for (const auto& [k, v] : s.values) std::printf("    %s = %.17g\n", k.c_str(), v);
        for (const auto& e : s.residuals)
            std::printf("    %-22s max %.3e rms %.3e tol %.1e %s\n", e.equation_id.c_str(), e.max_residual, e.rms_residual,
                        e.tolerance, e.pass ? "ok" : "FAIL");
        for (const auto& [k, ok] : s.checks) std::printf("    check %s: %s\n", k.c_str(), ok ? "ok" : "FAIL");
        if (!s.error.empty()) std::printf("    error: %s\n", s.error.c_str());
    }
    std::printf("overall: %s\n", r.pass() ? "PASS" : "FAIL");
}

// --out wins; otherwise $CMCLAB_OUT_DIR/<scenario>.<ext>; otherwise no file.
void emit(const cmc::VerificationReport& r, const Globals& g) {
    const auto fmt = g.format == "csv" ? cmc::ReportFormat::csv : cmc::ReportFormat::structured;
    std::string path = g.out;
    if (path.empty()) {
        if (const char* dir = std::getenv("CMCLAB_OUT_DIR"); dir && *dir) {
            std::filesystem::create_directories(dir);
            path = std::string(dir) + "/" + (r.scenario.empty() ? "report" : r.scenario) +
                   (fmt == cmc::ReportFormat::csv ? ".csv" : ".json");
        }
    }
    if (!path.empty()) cmc::emit_report(r, fmt, path);
}

int finish(const cmc::Scenario& sc, const Globals& g) {
    cmc::RunOptions opt;
    opt.grid = g.grid;
    opt.tolerance = g.tol;
    const auto r = cmc::run_scenario(sc, opt);
    print_summary(r);
    emit(r, g);
    return r.pass() ? 0 : 1;
}

cmc::Scenario single(const std::string& name, cmc::ConfigTable t) {
    cmc::Scenario sc;
    sc.name = name;
    sc.steps.push_back(std::move(t));
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cmclab: constant mean curvature surface checks"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--grid", g.grid, "grid resolution per axis");
    app.add_option("--tol", g.tol, "residual tolerance");
    app.add_option("--out", g.out, "report path (default: $CMCLAB_OUT_DIR/<scenario>.<ext>)");
    app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv"}));

    int code = 0;

    // catalog
    std::string model = "cylinder", chart = "poincare", grid_out;
    double H = 0.75, t0 = 0, theta = std::acos(-1.0) / 3;
    int sampled = 0;
    auto* cat = app.add_subcommand("catalog", "build a catalog surface, verify it, optionally write a sampled grid");
    cat->add_option("--model", model, "slice | vplane | tilted | cylinder");
    cat->add_option("--chart", chart, "flat | poincare | sphere");
    cat->add_option("--H", H, "mean curvature (cylinder)");
    cat->add_option("--t0", t0, "height (slice)");
    cat->add_option("--theta", theta, "tilt angle (tilted)");
    cat->add_option("--grid-out", grid_out, "write the surface as an immersion grid file");
    cat->add_option("--samples", sampled, "samples per axis for --grid-out")->default_val(101);
    cat->callback([&] {
        auto t = step_table("catalog");
        put(t, "model", model);
        put(t, "chart", chart);
        put(t, "H", H);
        put(t, "t0", t0);
        put(t, "theta", theta);
        code = finish(single("catalog", t), g);
        if (!grid_out.empty()) {
            const auto m = cmc::detail::build_model(cmc::StepParams(t, cmc::Scenario{}, cmc::RunOptions{}));
            cmc::write_immersion_grid(m.immersion.sample(sampled, sampled), grid_out);
        }
    });

    // verify
    std::string file;
    std::optional<double> c;
    auto* ver = app.add_subcommand("verify", "structure equations and derived identities");
    ver->add_option("--file", file, "immersion grid file");
    ver->add_option("--model", model, "catalog model when no file is given");
    ver->add_option("--chart", chart, "chart for the catalog model");
    ver->add_option("--H", H, "mean curvature (cylinder)");
    ver->add_option("--c", c, "curvature constant for Q (default: chart curvature)");
    ver->callback([&] {
        auto t = step_table("verify");
        if (!file.empty()) {
            put(t, "file", std::filesystem::absolute(file).string());
        } else {
            put(t, "model", model);
            put(t, "chart", chart);
            put(t, "H", H);
            put(t, "theta", theta);
        }
        if (c) put(t, "c", *c);
        code = finish(single("verify", t), g);
    });

    // solve-graph
    double delta = 0.5;
    std::string solution_out;
    auto* sg = app.add_subcommand("solve-graph", "solve the graph equation on a geodesic disk");
    sg->add_option("--chart", chart, "flat | poincare | sphere");
    sg->add_option("--delta", delta, "geodesic radius");
    sg->add_option("--H", H, "mean curvature");
    sg->add_option("--solution", solution_out, "write nodal solution table");
    sg->callback([&] {
        auto t = step_table("solve_graph");
        put(t, "chart", chart);
        put(t, "delta", delta);
        put(t, "H", H);
        put(t, "expect_converged", true);
        code = finish(single("solve-graph", t), g);
        if (!solution_out.empty()) {
            cmc::GraphProblem p;
            p.chart = cmc::chart_from_config({{"model", chart}});
            p.domain = cmc::Region::disk(0, 0, cmc::coordinate_radius_of_ball(p.chart, delta));
            p.n = g.grid.value_or(65);
            p.H = H;
            cmc::write_solution(cmc::solve_graph(p), solution_out);
        }
    });

    // spectrum
    std::vector<double> ball, stab;
    double disk_delta = 0;
    auto* sp = app.add_subcommand("spectrum", "Dirichlet or stability eigenvalues");
    auto* ob = sp->add_option("--ball", ball, "kappa0 delta: geodesic ball by shooting")->expected(2);
    auto* od = sp->add_option("--disk", disk_delta, "flat disk of this radius, 2D discretization");
    auto* os = sp->add_option("--stability", stab, "H kappa0 L r: Jacobi operator on a rectangle")->expected(4);
    ob->excludes(os)->excludes(od);
    os->excludes(od);
    sp->callback([&] {
        auto t = step_table("spectrum");
        if (!ball.empty()) {
            put(t, "kind", std::string("ball"));
            put(t, "kappa0", ball[0]);
            put(t, "delta", ball[1]);
        } else if (!stab.empty()) {
            put(t, "kind", std::string("stability"));
            put(t, "H", stab[0]);
            put(t, "kappa0", stab[1]);
            put(t, "L", stab[2]);
            put(t, "r", stab[3]);
        } else if (disk_delta > 0) {
            put(t, "kind", std::string("disk_grid"));
            put(t, "kappa0", 0.0);
            put(t, "delta", disk_delta);
        } else {
            throw CLI::ValidationError("spectrum", "one of --ball, --disk, --stability is required");
        }
        code = finish(single("spectrum", t), g);
    });

    // cheeger
    double kappa0 = -1;
    std::vector<double> deltas{2, 10, 20};
    auto* ch = app.add_subcommand("cheeger", "isoperimetric ratios of geodesic balls");
    ch->add_option("--kappa0", kappa0, "curvature of the space form");
    ch->add_option("--deltas", deltas, "ball radii");
    ch->callback([&] {
        auto t = step_table("cheeger");
        put(t, "kappa0", kappa0);
        put(t, "deltas", deltas);
        code = finish(single("cheeger", t), g);
    });

    // predict
    double c_pred = 0;
    std::optional<double> nu;
    auto* pr = app.add_subcommand("predict", "classify complete H-surfaces from (H, c)");
    pr->add_option("H", H, "mean curvature")->required();
    pr->add_option("c", c_pred, "infimum of the base curvature")->required();
    pr->add_option("--nu", nu, "constant angle function, if known");
    pr->callback([&] {
        std::printf("%s\n", cmc::predict(H, c_pred, nu).c_str());
        code = 0;
    });

    // run
    std::string config;
    auto* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);
    run->callback([&] {
        cmc::RunOptions opt;
        opt.grid = g.grid;
        opt.tolerance = g.tol;
        const auto r = cmc::run_scenario_file(config, opt);
        print_summary(r);
        emit(r, g);
        code = r.pass() ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const cmc::Error& e) {
        std::fprintf(stderr, "cmclab: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cmclab: %s\n", e.what());
        return 2;
    }
    return code;
}
