#pragma once

// Dirichlet eigenvalues of geodesic balls, Cheeger ratios, and the spectrum of
// J = Delta + a, a = 4H^2 + kappa0, on rectangles.

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "cmc/ambient.hpp"
#include "cmc/errors.hpp"
#include "cmc/graph_solver.hpp"

namespace cmc {

/// First zero of the Bessel function J0.
inline double bessel_j0_zero() {
    static const double z = [] {
        double x = 2.4;
        for (int i = 0; i < 50; ++i) {
            const double step = std::cyl_bessel_j(0.0, x) / -std::cyl_bessel_j(1.0, x);  // J0' = -J1
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        return x;
    }();
    return z;
}

struct SpectrumResult {
    double lambda1 = 0;
    double lambda2 = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> eigenfunction;  // radial nodes, or row-major interior grid (ny rows of nx)
    int nx = 0, ny = 0;
    int iterations = 0;
    double discretization_error_estimate = 0;
    double rayleigh_quotient = std::numeric_limits<double>::quiet_NaN();
    double reference = std::numeric_limits<double>::quiet_NaN();  // closed form, when known
    bool one_signed = true;
};

namespace detail {

// sn'/sn for the model of curvature k; at rho = 0 the caller uses the limit.
inline double log_sn_derivative(double k, double rho) {
    if (k == 0.0) return 1.0 / rho;
    const double a = std::sqrt(std::abs(k));
    return k < 0 ? a / std::tanh(a * rho) : a / std::tan(a * rho);
}

// phi'' = -(sn'/sn) phi' - lambda phi, phi(0) = 1, phi'(0) = 0; phi''(0) = -lambda/2.
// Returns true if phi vanishes somewhere in (0, delta]; optionally records phi.
inline bool radial_shoot(double k, double delta, double lambda, int n, std::vector<double>* trace = nullptr) {
    const double h = delta / n;
    auto rhs = [&](double rho, double f, double g, double& df, double& dg) {
        df = g;
        dg = rho == 0.0 ? -0.5 * lambda * f : -log_sn_derivative(k, rho) * g - lambda * f;
    };
    double f = 1.0, g = 0.0;
    if (trace) {
        trace->assign(1, f);
        trace->reserve(n + 1);
    }
    bool crossed = false;
    for (int s = 0; s < n; ++s) {
        const double rho = s * h;
        double k1f, k1g, k2f, k2g, k3f, k3g, k4f, k4g;
        rhs(rho, f, g, k1f, k1g);
        rhs(rho + 0.5 * h, f + 0.5 * h * k1f, g + 0.5 * h * k1g, k2f, k2g);
        rhs(rho + 0.5 * h, f + 0.5 * h * k2f, g + 0.5 * h * k2g, k3f, k3g);
        rhs(rho + h, f + h * k3f, g + h * k3g, k4f, k4g);
        f += h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
        g += h / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g);
        if (trace) trace->push_back(f);
        if (f <= 0.0) crossed = true;
        if (crossed && !trace) break;
    }
    return crossed;
}

inline double shoot_lambda1(double k, double delta, int n) {
    const double j0 = bessel_j0_zero();
    double hi = 4.0 * j0 * j0 / (delta * delta);
    int doublings = 0;
    while (!radial_shoot(k, delta, hi, n)) {
        if (++doublings > 60) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "no eigenvalue bracket in [0, %.6g] for kappa0 = %g, delta = %g", hi, k, delta);
            throw Error(ErrorKind::search, buf);
        }
        hi *= 2.0;
    }
    double lo = 0.0;
    if (radial_shoot(k, delta, lo, n)) throw Error(ErrorKind::search, "lambda = 0 already has a zero; bracket invalid");
    while (hi - lo > 1e-14 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (radial_shoot(k, delta, mid, n) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// lambda_1 of the geodesic ball of radius delta in the model of curvature kappa0, by shooting
/// on the radial equation with RK4 on n steps and bisection on lambda.
inline SpectrumResult dirichlet_lambda1_ball(double kappa0, double delta, int n = 4096) {
    if (!(delta > 0) || !std::isfinite(delta)) throw Error(ErrorKind::domain, "ball radius must be positive");
    if (kappa0 > 0 && !(delta < std::numbers::pi / std::sqrt(kappa0)))
        throw Error(ErrorKind::domain, "spherical ball radius must be below pi / sqrt(kappa0)");
    if (n < 16) throw Error(ErrorKind::domain, "radial resolution must be at least 16");
    SpectrumResult r;
    r.lambda1 = detail::shoot_lambda1(kappa0, delta, n);
    const double coarse = detail::shoot_lambda1(kappa0, delta, n / 2);
    r.discretization_error_estimate = std::abs(r.lambda1 - coarse);
    detail::radial_shoot(kappa0, delta, r.lambda1, n, &r.eigenfunction);
    r.nx = n + 1;
    r.ny = 1;
    if (kappa0 == 0.0) {
        const double j0 = bessel_j0_zero();
        r.reference = j0 * j0 / (delta * delta);
    }
    for (int i = 0; i + 1 < n; ++i)
        if (!(r.eigenfunction[i] > 0)) r.one_signed = false;
    return r;
}

struct EigenOptions {
    int max_iterations = 2000;
    double tol = 1e-10;  // on Rayleigh-quotient increments
};

namespace detail {

[[noreturn]] inline void eigen_not_converged(const std::vector<double>& trace) {
    std::string msg = "inverse iteration did not converge; Rayleigh quotient trace:";
    const std::size_t from = trace.size() > 5 ? trace.size() - 5 : 0;
    char buf[40];
    for (std::size_t i = from; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, " %.12g", trace[i]);
        msg += buf;
    }
    throw Error(ErrorKind::solver, msg);
}

}  // namespace detail

/// lambda_1 of -Delta on a geodesic ball realized as a coordinate disk of the chart, by a
/// Shortley-Weller discretization with mass e^{2 phi} and inverse iteration.
inline SpectrumResult dirichlet_lambda1_disk_grid(const Chart& chart, double delta, int n = 129,
                                                  const EigenOptions& opt = {}) {
    GraphProblem p;
    p.chart = chart;
    p.domain = Region::disk(0, 0, coordinate_radius_of_ball(chart, delta));
    p.n = n;
    const GraphGrid g = detail::build_grid(p);
    const int N = static_cast<int>(g.nodes.size());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd mass(N);
    for (int k = 0; k < N; ++k) {
        const auto& nd = g.nodes[k];
        mass[k] = 1.0 / nd.e2m;
        double diag = 0;
        for (int d = 0; d < 4; ++d) {
            const auto& a = nd.arm[d];
            const double span = d < 2 ? nd.arm[0].len + nd.arm[1].len : nd.arm[2].len + nd.arm[3].len;
            const double w = 2.0 / (span * a.len);
            diag += w;
            if (a.node >= 0) trip.emplace_back(k, a.node, -w);
        }
        trip.emplace_back(k, k, diag);
    }
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::linear_solve, "disk Laplacian factorization failed");

    Eigen::VectorXd x = Eigen::VectorXd::Ones(N);
    double mu = 0;
    std::vector<double> trace;
    SpectrumResult r;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const Eigen::VectorXd y = lu.solve(mass.cwiseProduct(x));
        const double next = x.dot(y) / y.dot(y);
        trace.push_back(next);
        x = y / y.norm();
        r.iterations = it;
        if (it > 1 && std::abs(next - mu) <= opt.tol * std::abs(next)) {
            mu = next;
            break;
        }
        mu = next;
        if (it == opt.max_iterations) detail::eigen_not_converged(trace);
    }
    r.lambda1 = mu;
    r.nx = r.ny = n;
    if (x.sum() < 0) x = -x;
    r.eigenfunction.assign(x.data(), x.data() + N);
    for (double v : r.eigenfunction)
        if (!(v > 0)) r.one_signed = false;
    r.rayleigh_quotient = x.dot(A * x) / x.dot(mass.cwiseProduct(x));
    if (chart.tag() == ModelTag::flat) {
        const double j0 = bessel_j0_zero();
        r.reference = j0 * j0 / (delta * delta);
    }
    return r;
}

struct CheegerEstimate {
    double kappa0 = 0;
    std::vector<std::pair<double, double>> ratios;  // (delta, A/V)
    double infimum_estimate = 0;
};

inline CheegerEstimate cheeger_ball_family(double kappa0, const std::vector<double>& deltas) {
    if (deltas.empty()) throw Error(ErrorKind::domain, "empty list of ball radii");
    CheegerEstimate c;
    c.kappa0 = kappa0;
    c.infimum_estimate = std::numeric_limits<double>::infinity();
    for (double d : deltas) {
        if (!(d > 0) || !std::isfinite(d)) throw Error(ErrorKind::domain, "ball radii must be positive and finite");
        const double ratio = ball_geometry(kappa0, d).ratio();
        c.ratios.emplace_back(d, ratio);
        c.infimum_estimate = std::min(c.infimum_estimate, ratio);
    }
    return c;
}

/// j^2 <= 4 lambda + tol.
inline bool cheeger_inequality_check(double j, double lambda1, double tol = 1e-12) {
    return j * j <= 4.0 * lambda1 + tol;
}

/// pi^2/L^2 + pi^2/(4 r^2) < 4H^2 + kappa0.
inline bool instability_condition(double H, double kappa0, double L, double r) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return pi2 / (L * L) + pi2 / (4.0 * r * r) < 4.0 * H * H + kappa0;
}

/// Smallest side s (L = 2r = s) satisfying the instability condition, by bisection.
inline double minimal_unstable_square(double H, double kappa0, double tol = 1e-9) {
    const double a = 4.0 * H * H + kappa0;
    if (!(a > 0)) throw Error(ErrorKind::no_instability, "4H^2 + kappa0 <= 0: J = Delta + a has no negative eigenvalue");
    auto unstable = [&](double s) { return instability_condition(H, kappa0, s, 0.5 * s); };
    double lo = 1e-3, hi = 1.0;
    while (unstable(lo)) lo *= 0.5;
    while (!unstable(hi)) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw Error(ErrorKind::no_instability, "no unstable square found");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (unstable(mid) ? hi : lo) = mid;
    }
    return hi;
}

namespace detail {

struct RectangleEigen {
    double lambda1 = 0, lambda2 = 0;
    Eigen::VectorXd v1;
    int iterations = 0;
    double rayleigh = 0;
};

// Lowest two eigenvalues of the 5-point -Delta_h with zero boundary values on
// [0, L] x [-r, r], nx x ny interior nodes. Inverse iteration from the all-ones vector;
// the second eigenvalue by deflation.
inline RectangleEigen rectangle_laplacian(double L, double r, int intervals_x, int intervals_y, const EigenOptions& opt,
                                          bool second) {
    const int nx = intervals_x - 1, ny = intervals_y - 1;
    const double hx = L / intervals_x, hy = 2.0 * r / intervals_y;
    const int N = nx * ny;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(N) * 5);
    const double cx = 1.0 / (hx * hx), cy = 1.0 / (hy * hy);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int k = j * nx + i;
            trip.emplace_back(k, k, 2 * cx + 2 * cy);
            if (i > 0) trip.emplace_back(k, k - 1, -cx);
            if (i + 1 < nx) trip.emplace_back(k, k + 1, -cx);
            if (j > 0) trip.emplace_back(k, k - nx, -cy);
            if (j + 1 < ny) trip.emplace_back(k, k + nx, -cy);
        }
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::linear_solve, "rectangle Laplacian factorization failed");

    auto iterate = [&](const Eigen::VectorXd* deflate, int& its) {
        Eigen::VectorXd x = Eigen::VectorXd::Ones(N);
        if (deflate) {
            // all-ones is symmetric in both axes; break the symmetry deterministically
            for (int k = 0; k < N; ++k) x[k] += 0.5 * std::sin(1.0 + 0.37 * k);
            x -= deflate->dot(x) * *deflate;
        }
        x.normalize();
        double mu = 0;
        std::vector<double> trace;
        for (int it = 1; it <= opt.max_iterations; ++it) {
            Eigen::VectorXd y = ldlt.solve(x);
            if (deflate) y -= deflate->dot(y) * *deflate;
            x = y / y.norm();
            const double next = x.dot(A * x);  // Rayleigh quotient
            trace.push_back(next);
            its = it;
            if (it > 1 && std::abs(next - mu) <= opt.tol * std::abs(next)) return std::make_pair(next, x);
            mu = next;
        }
        eigen_not_converged(trace);
    };
    RectangleEigen out;
    auto [l1, v1] = iterate(nullptr, out.iterations);
    if (v1.sum() < 0) v1 = -v1;
    out.lambda1 = l1;
    out.rayleigh = l1;
    out.v1 = v1;
    if (second) {
        int its2 = 0;
        out.lambda2 = iterate(&out.v1, its2).first;
        out.iterations += its2;
    } else {
        out.lambda2 = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace detail

/// Lowest eigenvalue of -J = -(Delta + a), a = 4H^2 + kappa0, on [0, L] x [-r, r] with zero
/// boundary values; `grid` intervals per unit length (at least 16 per axis). The error
/// estimate is the Richardson difference against half the resolution.
inline SpectrumResult stability_spectrum(double H, double kappa0, double L, double r, int grid = 16,
                                         const EigenOptions& opt = {}) {
    const double a = 4.0 * H * H + kappa0;
    if (!(L > 0) || !(r > 0)) throw Error(ErrorKind::domain, "rectangle sides must be positive");
    if (!(a > 0)) throw Error(ErrorKind::hypothesis, "stability operator needs 4H^2 + kappa0 > 0");
    const int ix = std::max(16, static_cast<int>(std::ceil(grid * L)));
    const int iy = std::max(16, static_cast<int>(std::ceil(grid * 2.0 * r)));
    const auto fine = detail::rectangle_laplacian(L, r, ix, iy, opt, true);
    const auto coarse = detail::rectangle_laplacian(L, r, ix / 2, iy / 2, opt, false);
    SpectrumResult s;
    s.lambda1 = fine.lambda1 - a;
    s.lambda2 = fine.lambda2 - a;
    s.rayleigh_quotient = fine.rayleigh - a;
    s.iterations = fine.iterations;
    s.discretization_error_estimate = std::abs(fine.lambda1 - coarse.lambda1) / 3.0;
    s.nx = ix - 1;
    s.ny = iy - 1;
    s.eigenfunction.assign(fine.v1.data(), fine.v1.data() + fine.v1.size());
    for (double v : s.eigenfunction)
        if (!(v > 0)) s.one_signed = false;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    s.reference = pi2 / (L * L) + pi2 / (4.0 * r * r) - a;
    return s;
}

}  // namespace cmc
