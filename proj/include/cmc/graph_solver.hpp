#pragma once

// Prescribed mean curvature graphs over a domain of a conformal chart:
//   e^{-2 phi} div0(grad0 u / W) = 2H,   W = sqrt(1 + e^{-2 phi} |grad0 u|^2),
// with Dirichlet data, and the divergence-theorem diagnostics built on it.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cmc/ambient.hpp"
#include "cmc/dual.hpp"
#include "cmc/errors.hpp"
#include "cmc/immersion.hpp"

namespace cmc {

using ScalarField = std::function<double(double, double)>;

struct SolverOptions {
    int max_iterations = 50;
    double damping = 1.0;        // initial Newton step length
    double residual_tol = 1e-10; // on max |R| over unknowns
    double gradient_cap = 1e6;
};

struct GraphProblem {
    Chart chart = Chart::flat();
    Region domain = Region::disk(0, 0, 1);
    int n = 65;            // grid nodes across the bounding box, per axis
    double H = 0;          // used when H_field is empty
    ScalarField H_field;
    ScalarField boundary;  // empty means zero
    SolverOptions solver;

    double mean_curvature(double x, double y) const { return H_field ? H_field(x, y) : H; }
    double boundary_value(double x, double y) const { return boundary ? boundary(x, y) : 0.0; }
};

namespace detail {

// E, W, N, S
inline constexpr int arm_dx[4] = {1, -1, 0, 0};
inline constexpr int arm_dy[4] = {0, 0, 1, -1};

struct Arm {
    double len = 0;
    int node = -1;     // unknown index, or -1 for a boundary point
    double value = 0;  // Dirichlet value when node < 0
};

struct GraphNode {
    int i = 0, j = 0;
    double x = 0, y = 0;
    double e2m = 1;    // e^{-2 phi}
    double twoH = 0;
    Arm arm[4];
};

}  // namespace detail

/// Uniform node lattice over the bounding box of the domain. Nodes closer than
/// 1e-3 spacing to the boundary count as boundary nodes.
struct GraphGrid {
    Region domain;
    int nx = 0, ny = 0;
    double x0 = 0, y0 = 0, hx = 0, hy = 0;
    std::vector<int> unknown;  // per lattice node: unknown index or -1
    std::vector<detail::GraphNode> nodes;

    double x(int i) const { return x0 + hx * i; }
    double y(int j) const { return y0 + hy * j; }
    std::size_t lattice(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    int unknown_at(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
        return unknown[lattice(i, j)];
    }
    double spacing() const { return std::max(hx, hy); }
};

struct GraphSolution {
    GraphProblem problem;
    GraphGrid grid;
    std::vector<double> u;       // per lattice node; NaN outside the closed domain
    std::vector<double> W;       // per lattice node; NaN off the unknowns
    std::vector<double> ux, uy;  // coordinate gradient at unknowns
    bool converged = false;
    double final_residual = 0;
    int iterations = 0;
    double max_gradient = 0;     // max metric norm |grad u|
    std::vector<double> residual_history;
    std::string status;          // converged | stagnated | gradient-cap | max-iterations
};

namespace detail {

inline double arm_to_boundary(const Region& r, double x, double y, int dir) {
    const double dx = arm_dx[dir], dy = arm_dy[dir];
    if (r.kind == Region::Kind::disk) {
        const double px = x - r.cx, py = y - r.cy;
        // |p + t d|^2 = R^2, t > 0, d a unit axis vector
        const double b = px * dx + py * dy;
        const double c = px * px + py * py - r.radius * r.radius;
        return -b + std::sqrt(std::max(0.0, b * b - c));
    }
    if (dir == 0) return r.xmax - x;
    if (dir == 1) return x - r.xmin;
    if (dir == 2) return r.ymax - y;
    return y - r.ymin;
}

inline bool node_inside(const Region& r, double x, double y, double margin) {
    if (r.kind == Region::Kind::disk) return std::hypot(x - r.cx, y - r.cy) < r.radius - margin;
    return x > r.xmin + margin && x < r.xmax - margin && y > r.ymin + margin && y < r.ymax - margin;
}

inline GraphGrid build_grid(const GraphProblem& p) {
    const Region& dom = p.domain;
    if (dom.kind == Region::Kind::plane || dom.empty())
        throw Error(ErrorKind::domain, "graph domain must be a nonempty disk or rectangle");
    if (!p.chart.domain().contains(dom)) throw Error(ErrorKind::domain, "graph domain leaves the chart domain");
    if (p.n < 5) throw Error(ErrorKind::domain, "graph grid needs at least 5 nodes per axis");
    if (!(p.solver.residual_tol > 0)) throw Error(ErrorKind::domain, "residual_tol must be positive");

    GraphGrid g;
    g.domain = dom;
    g.nx = g.ny = p.n;
    if (dom.kind == Region::Kind::disk) {
        g.x0 = dom.cx - dom.radius;
        g.y0 = dom.cy - dom.radius;
        g.hx = g.hy = 2 * dom.radius / (p.n - 1);
    } else {
        g.x0 = dom.xmin;
        g.y0 = dom.ymin;
        g.hx = (dom.xmax - dom.xmin) / (p.n - 1);
        g.hy = (dom.ymax - dom.ymin) / (p.n - 1);
    }
    const double margin = 1e-3 * std::min(g.hx, g.hy);
    g.unknown.assign(static_cast<std::size_t>(g.nx) * g.ny, -1);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (node_inside(dom, g.x(i), g.y(j), margin)) {
                g.unknown[g.lattice(i, j)] = static_cast<int>(g.nodes.size());
                GraphNode nd;
                nd.i = i;
                nd.j = j;
                nd.x = g.x(i);
                nd.y = g.y(j);
                g.nodes.push_back(nd);
            }
    if (g.nodes.empty()) throw Error(ErrorKind::domain, "graph grid has no interior nodes");

    for (auto& nd : g.nodes) {
        const auto cf = p.chart.factor(nd.x, nd.y);
        nd.e2m = std::exp(-2.0 * cf.phi);
        nd.twoH = 2.0 * p.mean_curvature(nd.x, nd.y);
        for (int d = 0; d < 4; ++d) {
            Arm& a = nd.arm[d];
            const int k = g.unknown_at(nd.i + arm_dx[d], nd.j + arm_dy[d]);
            if (k >= 0) {
                a.node = k;
                a.len = d < 2 ? g.hx : g.hy;
            } else {
                a.len = arm_to_boundary(dom, nd.x, nd.y, d);
                a.value = p.boundary_value(nd.x + arm_dx[d] * a.len, nd.y + arm_dy[d] * a.len);
            }
        }
    }
    return g;
}

// Non-uniform three-point first derivative: arms a (backward) and b (forward).
template <class T>
T three_point(const T& um, const T& u0, const T& up, double a, double b) {
    return (a * a * (up - u0) + b * b * (u0 - um)) / (a * b * (a + b));
}

template <class T, class U>
T arm_value(const Arm& a, const U& uval) {
    return a.node >= 0 ? uval(a.node) : T(a.value);
}

template <class T, class U>
void node_gradient(const GraphNode& nd, const U& uval, T& gx, T& gy) {
    const T u0 = uval(static_cast<int>(-1));
    gx = three_point(arm_value<T>(nd.arm[1], uval), u0, arm_value<T>(nd.arm[0], uval), nd.arm[1].len, nd.arm[0].len);
    gy = three_point(arm_value<T>(nd.arm[3], uval), u0, arm_value<T>(nd.arm[2], uval), nd.arm[3].len, nd.arm[2].len);
}

// uval(k) returns the value at unknown k; uval(-1) the value at the node itself.
template <class T, class U>
T node_W(const GraphNode& nd, const U& uval) {
    using std::sqrt;
    T gx, gy;
    node_gradient(nd, uval, gx, gy);
    return sqrt(T(1.0) + nd.e2m * (gx * gx + gy * gy));
}

template <class T, class U>
T node_residual(const GraphGrid& g, int k, const U& uval) {
    using std::sqrt;
    const GraphNode& nd = g.nodes[k];
    auto self = [&](int m) { return m < 0 ? uval(k) : uval(m); };
    const T uP = uval(k);
    const T WP = node_W<T>(nd, self);
    T flux[4];
    for (int d = 0; d < 4; ++d) {
        const Arm& a = nd.arm[d];
        T Wf = WP;
        if (a.node >= 0) {
            const GraphNode& nb = g.nodes[a.node];
            auto around = [&](int m) { return m < 0 ? uval(a.node) : uval(m); };
            Wf = 0.5 * (WP + node_W<T>(nb, around));
        }
        flux[d] = (arm_value<T>(a, uval) - uP) / (a.len * Wf);
    }
    const T div = (2.0 / (nd.arm[0].len + nd.arm[1].len)) * (flux[0] + flux[1]) +
                  (2.0 / (nd.arm[2].len + nd.arm[3].len)) * (flux[2] + flux[3]);
    return nd.e2m * div - T(nd.twoH);
}

inline std::vector<double> residual_vector(const GraphGrid& g, const std::vector<double>& u) {
    std::vector<double> r(g.nodes.size());
    auto uval = [&](int m) { return u[m]; };
    for (std::size_t k = 0; k < g.nodes.size(); ++k) r[k] = node_residual<double>(g, static_cast<int>(k), uval);
    return r;
}

inline Eigen::SparseMatrix<double> jacobian(const GraphGrid& g, const std::vector<double>& u) {
    using D = Dual<13>;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.nodes.size() * 13);
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        std::array<int, 13> slots;
        int used = 0;
        auto slot_of = [&](int m) {
            for (int s = 0; s < used; ++s)
                if (slots[s] == m) return s;
            slots[used] = m;
            return used++;
        };
        auto uval = [&](int m) { return D::variable(u[m], slot_of(m)); };
        const D r = node_residual<D>(g, static_cast<int>(k), uval);
        for (int s = 0; s < used; ++s)
            if (r.d[s] != 0.0) trip.emplace_back(static_cast<int>(k), slots[s], r.d[s]);
    }
    Eigen::SparseMatrix<double> J(static_cast<int>(g.nodes.size()), static_cast<int>(g.nodes.size()));
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline void fill_fields(GraphSolution& s, const std::vector<double>& u) {
    const GraphGrid& g = s.grid;
    const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.u.assign(n, nan);
    s.W.assign(n, nan);
    s.ux.assign(n, nan);
    s.uy.assign(n, nan);
    s.max_gradient = 0;
    const double margin = 1e-3 * std::min(g.hx, g.hy);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.unknown_at(i, j);
            if (k >= 0) continue;
            // boundary lattice nodes lying on the closed domain
            const double x = g.x(i), y = g.y(j);
            const bool on_boundary = g.domain.kind == Region::Kind::disk
                                         ? std::abs(std::hypot(x - g.domain.cx, y - g.domain.cy) - g.domain.radius) <= margin
                                         : g.domain.contains_closed(x, y);
            if (on_boundary) s.u[g.lattice(i, j)] = s.problem.boundary_value(x, y);
        }
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const auto& nd = g.nodes[k];
        const std::size_t L = g.lattice(nd.i, nd.j);
        auto uval = [&](int m) { return m < 0 ? u[k] : u[m]; };
        double gx, gy;
        node_gradient(nd, uval, gx, gy);
        s.u[L] = u[k];
        s.ux[L] = gx;
        s.uy[L] = gy;
        const double q = nd.e2m * (gx * gx + gy * gy);
        s.W[L] = std::sqrt(1.0 + q);
        s.max_gradient = std::max(s.max_gradient, std::sqrt(q));
    }
}

}  // namespace detail

/// Damped Newton on the discrete equation. The step is halved while the residual
/// norm fails to decrease (at most 20 halvings); stagnation or exceeding the
/// gradient cap ends the iteration with converged = false.
inline GraphSolution solve_graph(const GraphProblem& p) {
    GraphSolution s;
    s.problem = p;
    s.grid = detail::build_grid(p);
    const GraphGrid& g = s.grid;
    std::vector<double> u(g.nodes.size(), 0.0);
    std::vector<double> r = detail::residual_vector(g, u);
    double rnorm = detail::norm2(r);
    if (!std::isfinite(rnorm)) throw DivergenceError("non-finite residual at the initial iterate", 0);
    s.residual_history.push_back(detail::max_abs(r));
    s.status = "max-iterations";

    for (int it = 1;; ++it) {
        if (detail::max_abs(r) <= p.solver.residual_tol) {
            s.converged = true;
            s.status = "converged";
            break;
        }
        if (it > p.solver.max_iterations) break;
        s.iterations = it;

        const Eigen::SparseMatrix<double> J = detail::jacobian(g, u);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw Error(ErrorKind::linear_solve, "singular Newton Jacobian");
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(r.size()));
        for (std::size_t k = 0; k < r.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = -r[k];
        const Eigen::VectorXd step = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw Error(ErrorKind::linear_solve, "Newton linear solve failed");

        double t = p.solver.damping;
        bool accepted = false;
        std::vector<double> trial(u.size());
        for (int halving = 0; halving <= 20; ++halving, t *= 0.5) {
            for (std::size_t k = 0; k < u.size(); ++k) trial[k] = u[k] + t * step[static_cast<Eigen::Index>(k)];
            for (double x : trial)
                if (!std::isfinite(x)) throw DivergenceError("non-finite Newton iterate", it);
            std::vector<double> rt = detail::residual_vector(g, trial);
            const double nt = detail::norm2(rt);
            if (!std::isfinite(nt)) throw DivergenceError("non-finite residual", it);
            if (nt < rnorm) {
                u.swap(trial);
                r.swap(rt);
                rnorm = nt;
                accepted = true;
                break;
            }
        }
        s.residual_history.push_back(detail::max_abs(r));
        if (!accepted) {
            s.status = "stagnated";
            break;
        }
        detail::fill_fields(s, u);
        if (s.max_gradient > p.solver.gradient_cap) {
            s.status = "gradient-cap";
            break;
        }
    }
    detail::fill_fields(s, u);
    s.final_residual = detail::max_abs(r);
    return s;
}

struct FluxDiagnostics {
    Region subdomain;
    double volume = 0;            // V
    double boundary_area = 0;     // A
    double flux = 0;              // boundary integral of <grad u / W, eta>
    double curvature_integral = 0;  // integral of 2H dV (= 2H V for constant H)
    double ratio = 0;             // flux / A
    double identity_defect = 0;   // |curvature_integral - flux|
    double identity_tol = 0;
    bool identity_ok = false;
    bool bound_ok = false;        // |flux| <= A
    bool necessary_ok = false;    // 2 H V <= A
};

struct QuadratureOptions {
    int angular_points = 2048;
    double radial_tol = 1e-11;
    int max_depth = 8;
};

namespace detail {

// Integral over a coordinate disk of f(x, y) e^{2 phi}; trapezoid in angle, adaptive Gauss-Kronrod in radius.
inline double disk_integral(const Chart& chart, const Region& d, const ScalarField& f, const QuadratureOptions& q) {
    const int M = q.angular_points;
    auto ring = [&](double rho) {
        double s = 0;
        for (int k = 0; k < M; ++k) {
            const double th = 2 * std::numbers::pi * k / M;
            const double x = d.cx + rho * std::cos(th), y = d.cy + rho * std::sin(th);
            const double e2 = std::exp(2.0 * chart.factor(x, y).phi);
            s += (f ? f(x, y) : 1.0) * e2;
        }
        return rho * s * (2 * std::numbers::pi / M);
    };
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(ring, 0.0, d.radius, q.max_depth, q.radial_tol);
}

inline double rect_integral(const Chart& chart, const Region& r, const ScalarField& f, const QuadratureOptions& q) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto column = [&](double x) {
        auto g = [&](double y) { return (f ? f(x, y) : 1.0) * std::exp(2.0 * chart.factor(x, y).phi); };
        return GK::integrate(g, r.ymin, r.ymax, q.max_depth, q.radial_tol);
    };
    return GK::integrate(column, r.xmin, r.xmax, q.max_depth, q.radial_tol);
}

inline double region_volume(const Chart& chart, const Region& r, const ScalarField& f, const QuadratureOptions& q) {
    if (r.kind == Region::Kind::disk) return disk_integral(chart, r, f, q);
    if (r.kind == Region::Kind::rectangle) return rect_integral(chart, r, f, q);
    throw Error(ErrorKind::domain, "integration region must be a disk or rectangle");
}

inline double region_boundary_length(const Chart& chart, const Region& r, const QuadratureOptions& q) {
    if (r.kind == Region::Kind::disk) {
        const int M = q.angular_points;
        double s = 0;
        for (int k = 0; k < M; ++k) {
            const double th = 2 * std::numbers::pi * k / M;
            s += std::exp(chart.factor(r.cx + r.radius * std::cos(th), r.cy + r.radius * std::sin(th)).phi);
        }
        return r.radius * s * (2 * std::numbers::pi / M);
    }
    if (r.kind != Region::Kind::rectangle) throw Error(ErrorKind::domain, "boundary of an unbounded region");
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto e = [&](double x, double y) { return std::exp(chart.factor(x, y).phi); };
    double L = 0;
    L += GK::integrate([&](double x) { return e(x, r.ymin); }, r.xmin, r.xmax, q.max_depth, q.radial_tol);
    L += GK::integrate([&](double x) { return e(x, r.ymax); }, r.xmin, r.xmax, q.max_depth, q.radial_tol);
    L += GK::integrate([&](double y) { return e(r.xmin, y); }, r.ymin, r.ymax, q.max_depth, q.radial_tol);
    L += GK::integrate([&](double y) { return e(r.xmax, y); }, r.ymin, r.ymax, q.max_depth, q.radial_tol);
    return L;
}

// Bilinear interpolation of the nodal coordinate gradient.
inline void interpolate_gradient(const GraphSolution& s, double x, double y, double& gx, double& gy) {
    const GraphGrid& g = s.grid;
    const double fx = (x - g.x0) / g.hx, fy = (y - g.y0) / g.hy;
    const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
    const int corners[4][2] = {{i, j}, {i + 1, j}, {i, j + 1}, {i + 1, j + 1}};
    for (const auto& c : corners)
        if (g.unknown_at(c[0], c[1]) < 0)
            throw Error(ErrorKind::domain, "flux sub-disk leaves the interior of the solution region");
    const double a = fx - i, b = fy - j;
    auto lerp = [&](const std::vector<double>& f) {
        return (1 - a) * (1 - b) * f[g.lattice(i, j)] + a * (1 - b) * f[g.lattice(i + 1, j)] +
               (1 - a) * b * f[g.lattice(i, j + 1)] + a * b * f[g.lattice(i + 1, j + 1)];
    };
    gx = lerp(s.ux);
    gy = lerp(s.uy);
}

}  // namespace detail

/// Divergence-theorem diagnostics on a coordinate sub-disk of the solution region.
/// identity_tol defaults to 10 h^2.
inline FluxDiagnostics flux_check(const GraphSolution& s, const Region& sub, std::optional<double> identity_tol = {},
                                  const QuadratureOptions& q = {}) {
    if (sub.kind != Region::Kind::disk || sub.empty()) throw Error(ErrorKind::domain, "flux sub-domain must be a disk");
    if (!s.grid.domain.contains(sub)) throw Error(ErrorKind::domain, "flux sub-disk leaves the solution region");
    const Chart& chart = s.problem.chart;
    FluxDiagnostics f;
    f.subdomain = sub;
    f.volume = detail::region_volume(chart, sub, {}, q);
    f.boundary_area = detail::region_boundary_length(chart, sub, q);
    if (s.problem.H_field) {
        const auto& Hf = s.problem.H_field;
        f.curvature_integral = detail::region_volume(chart, sub, [&](double x, double y) { return 2.0 * Hf(x, y); }, q);
    } else {
        f.curvature_integral = 2.0 * s.problem.H * f.volume;
    }
    // (d_eta0 u / W) ds0 is the same in the chart metric and the Euclidean one
    const int M = q.angular_points;
    double flux = 0;
    for (int k = 0; k < M; ++k) {
        const double th = 2 * std::numbers::pi * k / M;
        const double c = std::cos(th), sn = std::sin(th);
        const double x = sub.cx + sub.radius * c, y = sub.cy + sub.radius * sn;
        double gx, gy;
        detail::interpolate_gradient(s, x, y, gx, gy);
        const double e2m = std::exp(-2.0 * chart.factor(x, y).phi);
        const double W = std::sqrt(1.0 + e2m * (gx * gx + gy * gy));
        flux += (gx * c + gy * sn) / W;
    }
    f.flux = flux * sub.radius * (2 * std::numbers::pi / M);
    f.ratio = f.flux / f.boundary_area;
    const double h = s.grid.spacing();
    f.identity_tol = identity_tol.value_or(10.0 * h * h);
    f.identity_defect = std::abs(f.curvature_integral - f.flux);
    f.identity_ok = f.identity_defect <= f.identity_tol;
    f.bound_ok = std::abs(f.flux) <= f.boundary_area;
    f.necessary_ok = f.curvature_integral <= f.boundary_area;
    return f;
}

struct NecessaryCondition {
    double H_inf = 0;
    double volume = 0;
    double lhs = 0;  // 2 inf H V
    double boundary_area = 0;
    bool ok = true;
};

/// 2 inf H V(Omega) <= A(dOmega). For an H field the infimum is sampled on a 101 x 101 grid over the region.
inline NecessaryCondition necessary_condition(const Chart& chart, const Region& region, double H,
                                              const ScalarField& H_field = {}, const QuadratureOptions& q = {}) {
    if (region.empty() || region.kind == Region::Kind::plane)
        throw Error(ErrorKind::domain, "necessary condition needs a bounded disk or rectangle");
    NecessaryCondition nc;
    nc.H_inf = H;
    if (H_field) {
        nc.H_inf = std::numeric_limits<double>::infinity();
        double x0, x1, y0, y1;
        if (region.kind == Region::Kind::disk) {
            x0 = region.cx - region.radius, x1 = region.cx + region.radius;
            y0 = region.cy - region.radius, y1 = region.cy + region.radius;
        } else {
            x0 = region.xmin, x1 = region.xmax, y0 = region.ymin, y1 = region.ymax;
        }
        for (int j = 0; j <= 100; ++j)
            for (int i = 0; i <= 100; ++i) {
                const double x = x0 + (x1 - x0) * i / 100, y = y0 + (y1 - y0) * j / 100;
                if (region.contains_closed(x, y)) nc.H_inf = std::min(nc.H_inf, H_field(x, y));
            }
    }
    nc.volume = detail::region_volume(chart, region, {}, q);
    nc.boundary_area = detail::region_boundary_length(chart, region, q);
    nc.lhs = 2.0 * nc.H_inf * nc.volume;
    nc.ok = nc.lhs <= nc.boundary_area;
    return nc;
}

/// Geodesic radius at which the necessary condition on balls about the origin
/// flips from ok to violated, located by bisection on [lo, hi].
inline double obstruction_radius(const Chart& chart, double H, double lo, double hi, double tol = 1e-10) {
    auto ok = [&](double delta) {
        return necessary_condition(chart, Region::disk(0, 0, coordinate_radius_of_ball(chart, delta)), H).ok;
    };
    if (!ok(lo) || ok(hi)) throw Error(ErrorKind::search, "necessary condition does not change on the bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Mean curvature and angle function of the solved graph, recomputed on the lattice.
/// H uses an independent wide centered divergence of grad0 u / W; nu = 1/W (upward normal).
struct GraphGeometry {
    std::vector<double> H, nu;  // per lattice node; NaN where unavailable
};

inline GraphGeometry graph_to_geometry(const GraphSolution& s) {
    const GraphGrid& g = s.grid;
    const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    GraphGeometry out;
    out.H.assign(n, nan);
    out.nu.assign(n, nan);
    std::vector<double> Fx(n, nan), Fy(n, nan);
    for (std::size_t L = 0; L < n; ++L)
        if (!std::isnan(s.W[L])) {
            out.nu[L] = 1.0 / s.W[L];
            Fx[L] = s.ux[L] / s.W[L];
            Fy[L] = s.uy[L] / s.W[L];
        }
    for (int j = 1; j + 1 < g.ny; ++j)
        for (int i = 1; i + 1 < g.nx; ++i) {
            const std::size_t L = g.lattice(i, j);
            const double div = (Fx[g.lattice(i + 1, j)] - Fx[g.lattice(i - 1, j)]) / (2 * g.hx) +
                               (Fy[g.lattice(i, j + 1)] - Fy[g.lattice(i, j - 1)]) / (2 * g.hy);
            if (std::isnan(div)) continue;
            out.H[L] = 0.5 * std::exp(-2.0 * s.problem.chart.factor(g.x(i), g.y(j)).phi) * div;
        }
    return out;
}

/// Laplace-Beltrami operator of the induced graph metric g_ij = e^{2 phi} delta_ij + u_i u_j
/// applied to a lattice field (NaN where unavailable).
inline std::vector<double> graph_laplacian(const GraphSolution& s, const std::vector<double>& f) {
    const GraphGrid& g = s.grid;
    const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> Vx(n, nan), Vy(n, nan), out(n, nan);
    auto at = [&](const std::vector<double>& v, int i, int j) {
        if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) return nan;
        return v[g.lattice(i, j)];
    };
    std::vector<double> e2m(n, nan);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (!std::isnan(s.W[g.lattice(i, j)])) e2m[g.lattice(i, j)] = std::exp(-2.0 * s.problem.chart.factor(g.x(i), g.y(j)).phi);
    // sqrt(G) g^{ij} = W (delta_ij - e^{-2 phi} u_i u_j / W^2)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t L = g.lattice(i, j);
            const double W = s.W[L];
            if (std::isnan(W)) continue;
            const double fx = (at(f, i + 1, j) - at(f, i - 1, j)) / (2 * g.hx);
            const double fy = (at(f, i, j + 1) - at(f, i, j - 1)) / (2 * g.hy);
            if (std::isnan(fx) || std::isnan(fy)) continue;
            const double a = e2m[L] / (W * W);
            const double ux = s.ux[L], uy = s.uy[L];
            Vx[L] = W * ((1 - a * ux * ux) * fx - a * ux * uy * fy);
            Vy[L] = W * (-a * ux * uy * fx + (1 - a * uy * uy) * fy);
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t L = g.lattice(i, j);
            const double div = (at(Vx, i + 1, j) - at(Vx, i - 1, j)) / (2 * g.hx) +
                               (at(Vy, i, j + 1) - at(Vy, i, j - 1)) / (2 * g.hy);
            if (std::isnan(div) || std::isnan(s.W[L])) continue;
            out[L] = div * e2m[L] / s.W[L];  // divide by sqrt(G) = e^{2 phi} W
        }
    return out;
}

/// f_m on a solved graph with the downward normal (nu = -1/W <= 0).
inline SubharmonicProfile graph_subharmonic(const GraphSolution& s, double m, double c = -1.0,
                                            const SubharmonicOptions& opt = {}) {
    if (s.problem.H_field) throw Error(ErrorKind::hypothesis, "f_m needs constant mean curvature");
    const double H = std::abs(s.problem.H);
    if (!(H > 0.5)) throw Error(ErrorKind::hypothesis, "f_m needs H > 1/2");
    const std::size_t n = s.W.size();
    std::vector<double> fm(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t L = 0; L < n; ++L)
        if (!std::isnan(s.W[L])) fm[L] = f_m(-1.0 / s.W[L], m, H);
    const auto lap = graph_laplacian(s, fm);
    std::vector<double> nu, lf;
    for (std::size_t L = 0; L < n; ++L)
        if (!std::isnan(lap[L])) {
            nu.push_back(-1.0 / s.W[L]);
            lf.push_back(lap[L]);
        }
    if (nu.empty()) throw Error(ErrorKind::capability, "graph too coarse for a Laplacian");
    return f_subharmonic_from_fields(nu, lf, H, m, c, opt);
}

/// "# cmclab graph solution v1", chart line, domain, grid, then rows x y u W.
inline void write_solution(const GraphSolution& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path);
    char buf[160];
    out << "# cmclab graph solution v1\n";
    out << "chart " << chart_spec_string(s.problem.chart) << "\n";
    out << "domain " << s.grid.domain.to_string() << "\n";
    std::snprintf(buf, sizeof buf, "grid %d %d H %.17g converged %d residual %.17g\n", s.grid.nx, s.grid.ny,
                  s.problem.H, s.converged ? 1 : 0, s.final_residual);
    out << buf;
    for (int j = 0; j < s.grid.ny; ++j)
        for (int i = 0; i < s.grid.nx; ++i) {
            const std::size_t L = s.grid.lattice(i, j);
            if (std::isnan(s.u[L])) continue;
            std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", s.grid.x(i), s.grid.y(j), s.u[L], s.W[L]);
            out << buf;
        }
    if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

}  // namespace cmc
