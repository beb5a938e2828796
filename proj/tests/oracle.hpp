#pragma once

// Test-side reference computations. Nothing here calls into the library's
// derivative machinery: geometry comes from central differences of plain
// position functions, and Christoffel symbols are written out by hand.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle {

using Phi = std::function<double(double, double)>;
using Map = std::function<std::array<double, 3>(double, double)>;

inline constexpr double pi = std::numbers::pi;

// First zero of J0 (Abramowitz & Stegun table 9.5).
inline constexpr double j0_zero = 2.404825557695773;

// lambda_1 of hyperbolic balls, shooting with scipy solve_ivp (rtol 1e-13) + brentq; frozen.
struct BallValue {
    double delta, lambda1;
};
inline constexpr BallValue hyperbolic_balls[] = {
    {1, 6.11308181971167},  {2, 1.76725309033808},   {4, 0.66331962651644},  {8, 0.367416674085805},
    {10, 0.328270761683171}, {16, 0.282926104930038}, {20, 0.271678838709047},
};

inline double poincare_phi(double x, double y) { return std::log(2.0 / (1.0 - x * x - y * y)); }

/// -e^{-2 phi} (phi_xx + phi_yy) by a five-point stencil.
inline double fd_curvature(const Phi& phi, double x, double y, double h = 1e-3) {
    const double lap = (phi(x + h, y) + phi(x - h, y) + phi(x, y + h) + phi(x, y - h) - 4 * phi(x, y)) / (h * h);
    return -std::exp(-2 * phi(x, y)) * lap;
}

struct Geometry {
    double lambda, nu, H, K, conformality;
    std::complex<double> p, h_z;
};

/// Fundamental forms of X = (x, y, t) in (e^{2 phi}(dx^2 + dy^2) + dt^2), from differences of X.
/// `sign` picks the normal: +1 uses g^{-1}(X_u x X_v).
inline Geometry fd_geometry(const Map& X, const Phi& phi, double u, double v, double sign = 1, double h = 1e-4) {
    auto d = [&](double du, double dv) { return X(u + du, v + dv); };
    std::array<double, 3> Xu, Xv, Xuu, Xvv, Xuv;
    const auto c = d(0, 0);
    for (int k = 0; k < 3; ++k) {
        Xu[k] = (d(h, 0)[k] - d(-h, 0)[k]) / (2 * h);
        Xv[k] = (d(0, h)[k] - d(0, -h)[k]) / (2 * h);
        Xuu[k] = (d(h, 0)[k] - 2 * c[k] + d(-h, 0)[k]) / (h * h);
        Xvv[k] = (d(0, h)[k] - 2 * c[k] + d(0, -h)[k]) / (h * h);
        Xuv[k] = (d(h, h)[k] - d(h, -h)[k] - d(-h, h)[k] + d(-h, -h)[k]) / (4 * h * h);
    }
    const double x = c[0], y = c[1];
    const double e2 = std::exp(2 * phi(x, y));
    const double hp = 1e-5;
    const double px = (phi(x + hp, y) - phi(x - hp, y)) / (2 * hp);
    const double py = (phi(x, y + hp) - phi(x, y - hp)) / (2 * hp);
    auto g = [&](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return e2 * (a[0] * b[0] + a[1] * b[1]) + a[2] * b[2];
    };
    // Covariant derivative D_a b with Gamma^k_ij = delta_ik phi_j + delta_jk phi_i - delta_ij phi_k on (x, y).
    auto cov = [&](const std::array<double, 3>& second, const std::array<double, 3>& a, const std::array<double, 3>& b) {
        std::array<double, 3> r = second;
        const double grad[2] = {px, py};
        const double ab = a[0] * b[0] + a[1] * b[1];
        for (int k = 0; k < 2; ++k) {
            const double aphi = a[0] * grad[0] + a[1] * grad[1];
            const double bphi = b[0] * grad[0] + b[1] * grad[1];
            r[k] += a[k] * bphi + b[k] * aphi - ab * grad[k];
        }
        return r;
    };
    std::array<double, 3> cr = {Xu[1] * Xv[2] - Xu[2] * Xv[1], Xu[2] * Xv[0] - Xu[0] * Xv[2], Xu[0] * Xv[1] - Xu[1] * Xv[0]};
    std::array<double, 3> N = {cr[0] / e2, cr[1] / e2, cr[2]};
    const double n = std::sqrt(g(N, N));
    for (auto& a : N) a *= sign / n;
    const double E = g(Xu, Xu), F = g(Xu, Xv), G = g(Xv, Xv);
    const double L = g(cov(Xuu, Xu, Xu), N), M = g(cov(Xuv, Xu, Xv), N), Nn = g(cov(Xvv, Xv, Xv), N);
    Geometry out;
    out.lambda = 0.5 * (E + G);
    out.conformality = 0.5 * std::hypot(E - G, 2 * F);
    out.nu = N[2];
    out.H = (L + Nn) / (2 * out.lambda);
    out.K = (L * Nn - M * M) / (out.lambda * out.lambda);
    out.p = 0.25 * std::complex<double>(L - Nn, -2 * M);
    out.h_z = 0.5 * std::complex<double>(Xu[2], -Xv[2]);
    return out;
}

/// Hyperbolic circle of geodesic curvature 2H about the origin of the Poincare disk, unit speed, times R.
inline Map hyperbolic_cylinder(double H) {
    const double rho = std::atanh(1.0 / (2 * H));
    const double R = std::tanh(rho / 2);
    const double w = 1.0 / std::sinh(rho);
    return [R, w](double s, double t) { return std::array<double, 3>{R * std::cos(w * s), R * std::sin(w * s), t}; };
}

/// Spherical cap over a flat disk: u(r) = (sqrt(1 - H^2 R^2) - sqrt(1 - H^2 r^2)) / H, u = 0 at r = R.
inline double cap_height(double H, double R, double r) {
    return (std::sqrt(1 - H * H * r * r) - std::sqrt(1 - H * H * R * R)) / H;
}

/// 2 H V over the flat coordinate disk of radius r.
inline double flat_curvature_integral(double H, double r) { return 2 * H * pi * r * r; }

inline double coth(double x) { return 1.0 / std::tanh(x); }

/// Separable closed form of the bottom of J = Delta + 4H^2 + kappa0 on [0, L] x [-r, r].
inline double stability_closed_form(double H, double k, double L, double r) {
    return pi * pi / (L * L) + pi * pi / (4 * r * r) - (4 * H * H + k);
}

inline double f_m(double m, double H, double nu) {
    const double s = std::sqrt(4 * H * H - 1);
    return m / s * std::asin(nu / std::sqrt(4 * H * H - 1 + nu * nu));
}

}  // namespace oracle
