#pragma once

// Geometry of a conformally parametrized surface X = (F, h) in M^2 x R and
// residual checks of the identities it must satisfy.
//
// Conventions: z = u + i v, d/dz = (d/du - i d/dv) / 2, d/dzbar = (d/du + i d/dv) / 2.
// I = lambda |dz|^2, II = p dz^2 + lambda H |dz|^2 + conj(p) dzbar^2, with the
// normal N completing (X_u, X_v, N) to a positive frame of the product.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cmc/ambient.hpp"
#include "cmc/errors.hpp"
#include "cmc/jet.hpp"
#include "cmc/residuals.hpp"

namespace cmc {

using complex = std::complex<double>;

/// Third-order jets carry every derivative the structure equations need:
/// X to order 3 gives N, nu, lambda to order 2 and the second fundamental form to order 1.
using SurfaceJet = Jet<3>;
using AnalyticMap = std::function<std::array<SurfaceJet, 3>(const SurfaceJet& u, const SurfaceJet& v)>;

struct ParameterRect {
    double u0 = 0, u1 = 1, v0 = 0, v1 = 1;
    friend bool operator==(const ParameterRect&, const ParameterRect&) = default;
};

/// Samples of (F1, F2, h) on a uniform nu x nv grid over the parameter rectangle,
/// row-major in v: index j * nu + i.
struct SampledMap {
    int nu = 0, nv = 0;
    std::vector<double> F1, F2, h;
};

class ConformalImmersion {
public:
    ConformalImmersion() : chart_(Chart::flat()) {}

    static ConformalImmersion analytic(Chart chart, ParameterRect rect, AnalyticMap map, std::string label = {}) {
        if (!(rect.u1 > rect.u0) || !(rect.v1 > rect.v0))
            throw Error(ErrorKind::domain, "empty parameter rectangle");
        ConformalImmersion imm(std::move(chart), rect, std::move(label));
        imm.analytic_ = std::move(map);
        return imm;
    }

    static ConformalImmersion sampled(Chart chart, ParameterRect rect, SampledMap map, std::string label = {}) {
        if (!(rect.u1 > rect.u0) || !(rect.v1 > rect.v0))
            throw Error(ErrorKind::domain, "empty parameter rectangle");
        const std::size_t n = static_cast<std::size_t>(map.nu) * map.nv;
        if (map.nu < 5 || map.nv < 5) throw Error(ErrorKind::domain, "sampled immersion needs at least 5x5 samples");
        if (map.F1.size() != n || map.F2.size() != n || map.h.size() != n)
            throw Error(ErrorKind::domain, "sampled immersion: array sizes do not match grid shape");
        ConformalImmersion imm(std::move(chart), rect, std::move(label));
        imm.sampled_ = std::move(map);
        return imm;
    }

    bool is_analytic() const { return static_cast<bool>(analytic_); }
    const Chart& chart() const { return chart_; }
    const ParameterRect& rect() const { return rect_; }
    const std::string& label() const { return label_; }
    /// Stored samples. Heights exclude height_offset().
    const SampledMap& samples() const {
        if (!sampled_) throw Error(ErrorKind::capability, "analytic immersion has no stored samples");
        return *sampled_;
    }

    /// (F1, F2, h) at a parameter point; analytic immersions only.
    std::array<double, 3> position(double u, double v) const {
        if (!analytic_) throw Error(ErrorKind::capability, "position() needs an analytic immersion");
        const auto X = analytic_(SurfaceJet(u), SurfaceJet(v));
        return {X[0].value(), X[1].value(), X[2].value()};
    }

    std::array<SurfaceJet, 3> jets(double u, double v) const {
        if (!analytic_) throw Error(ErrorKind::capability, "analytic derivatives requested from a sampled immersion");
        return analytic_(SurfaceJet::variable_u(u), SurfaceJet::variable_v(v));
    }

    /// Grid-sampled copy on nu x nv nodes (edges included).
    ConformalImmersion sample(int nu, int nv) const {
        if (!analytic_) throw Error(ErrorKind::capability, "only analytic immersions can be resampled");
        if (nu < 5 || nv < 5) throw Error(ErrorKind::domain, "sampled immersion needs at least 5x5 samples");
        SampledMap m;
        m.nu = nu;
        m.nv = nv;
        const std::size_t n = static_cast<std::size_t>(nu) * nv;
        m.F1.resize(n);
        m.F2.resize(n);
        m.h.resize(n);
        for (int j = 0; j < nv; ++j)
            for (int i = 0; i < nu; ++i) {
                const auto p = position(u_at(i, nu), v_at(j, nv));
                const std::size_t k = static_cast<std::size_t>(j) * nu + i;
                m.F1[k] = p[0];
                m.F2[k] = p[1];
                m.h[k] = p[2];
            }
        return sampled(chart_, rect_, std::move(m), label_);
    }

    /// Vertical translation by t0.
    ConformalImmersion translated(double t0) const {
        ConformalImmersion out = *this;
        if (analytic_) {
            auto base = analytic_;
            out.analytic_ = [base, t0](const SurfaceJet& u, const SurfaceJet& v) {
                auto X = base(u, v);
                X[2] += t0;
                return X;
            };
        } else {
            // kept apart so height differences, and everything derived from them, stay bitwise unchanged
            out.height_offset_ += t0;
        }
        return out;
    }

    double height_offset() const { return height_offset_; }

    double u_at(int i, int n) const { return rect_.u0 + (rect_.u1 - rect_.u0) * i / (n - 1); }
    double v_at(int j, int n) const { return rect_.v0 + (rect_.v1 - rect_.v0) * j / (n - 1); }

private:
    ConformalImmersion(Chart chart, ParameterRect rect, std::string label)
        : chart_(std::move(chart)), rect_(rect), label_(std::move(label)) {}

    Chart chart_;
    ParameterRect rect_;
    std::string label_;
    AnalyticMap analytic_;
    std::optional<SampledMap> sampled_;
    double height_offset_ = 0;
};

/// Everything known at one parameter sample.
struct FundamentalSample {
    double u = 0, v = 0;
    double x = 0, y = 0;  // projected base point F(u, v)
    double lambda = 0, nu = 0, H = 0, K = 0, KI = 0, kappa = 0;
    complex p, h_z;
    double T_norm2 = 0;                   // <T, T> for T = d/dt - nu N
    std::array<double, 2> T_coords{};     // T = T_coords[0] X_u + T_coords[1] X_v
    double conformality = 0;              // |<X_z, X_z>|

    // Derivative data; meaningful when `interior` is set.
    bool interior = false;
    complex lambda_z, h_zz, nu_z, p_zbar, H_z;
    double h_zzbar = 0, lap_nu = 0, grad_nu2 = 0;
    Jet<2> nu_taylor;  // local expansion of nu (analytic data only)

    friend bool operator==(const FundamentalSample&, const FundamentalSample&) = default;
};

struct FundamentalData {
    std::string label;
    bool analytic = false;
    bool flipped = false;
    int nu = 0, nv = 0;
    double du = 0, dv = 0;
    ParameterRect rect;
    double tol_conf = 0;
    double max_conformality = 0;
    std::vector<FundamentalSample> samples;

    const FundamentalSample& at(int i, int j) const { return samples[static_cast<std::size_t>(j) * nu + i]; }
    /// Grid spacing (0 for analytic data).
    double spacing() const { return analytic ? 0.0 : std::max(du, dv); }
};

struct InducedOptions {
    int nu = 101, nv = 101;           // analytic sample grid
    bool flip_normal = false;
    bool nonpositive_nu = false;    // choose N so that mean nu <= 0
    std::optional<double> tol_conf;   // default 1e-8 analytic, 10 h^2 sampled
    double tol_degenerate = 1e-12;
};

namespace detail {

template <class S>
using Vec3 = std::array<S, 3>;

template <class S>
S dot3(const Vec3<S>& a, const Vec3<S>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class S>
struct PointGeometry {
    S lambda, E, F, G;
    Vec3<S> n;  // unit normal in the orthonormal frame (e^{-phi} d/dx, e^{-phi} d/dy, d/dt)
    S nu, L, M, Nn, H, K, p_re, p_im, kappa, T_norm2;
};

// Pointwise geometry from X and its first and second parameter derivatives,
// all given in chart coordinates (x, y, t).
template <class S>
PointGeometry<S> point_geometry(const Chart& chart, const Vec3<S>& X, const Vec3<S>& Xu, const Vec3<S>& Xv,
                                const Vec3<S>& Xuu, const Vec3<S>& Xuv, const Vec3<S>& Xvv, bool flip) {
    using std::exp;
    using std::sqrt;
    const ConformalFactor<S> cf = chart.factor(X[0], X[1]);
    const S e = exp(cf.phi);

    const Vec3<S> au{e * Xu[0], e * Xu[1], Xu[2]};
    const Vec3<S> av{e * Xv[0], e * Xv[1], Xv[2]};
    PointGeometry<S> g;
    g.E = dot3(au, au);
    g.F = dot3(au, av);
    g.G = dot3(av, av);
    g.lambda = 0.5 * (g.E + g.G);

    Vec3<S> c{au[1] * av[2] - au[2] * av[1], au[2] * av[0] - au[0] * av[2], au[0] * av[1] - au[1] * av[0]};
    S inv = 1.0 / sqrt(dot3(c, c));
    if (flip) inv = -inv;
    g.n = {c[0] * inv, c[1] * inv, c[2] * inv};
    g.nu = g.n[2];

    // Horizontal part of the Levi-Civita connection of e^{2 phi} |dx|^2:
    // Gamma^k_ij = delta^k_i phi_j + delta^k_j phi_i - delta_ij phi_k.
    auto second_form = [&](const Vec3<S>& a, const Vec3<S>& b, const Vec3<S>& ab) {
        const S a_phi = a[0] * cf.phi_x + a[1] * cf.phi_y;
        const S b_phi = b[0] * cf.phi_x + b[1] * cf.phi_y;
        const S ab_h = a[0] * b[0] + a[1] * b[1];
        const S d0 = ab[0] + a[0] * b_phi + b[0] * a_phi - ab_h * cf.phi_x;
        const S d1 = ab[1] + a[1] * b_phi + b[1] * a_phi - ab_h * cf.phi_y;
        return e * (d0 * g.n[0] + d1 * g.n[1]) + ab[2] * g.n[2];
    };
    g.L = second_form(Xu, Xu, Xuu);
    g.M = second_form(Xu, Xv, Xuv);
    g.Nn = second_form(Xv, Xv, Xvv);

    const S inv_lambda = 1.0 / g.lambda;
    g.H = 0.5 * (g.L + g.Nn) * inv_lambda;
    g.K = (g.L * g.Nn - g.M * g.M) * inv_lambda * inv_lambda;
    g.p_re = 0.25 * (g.L - g.Nn);
    g.p_im = -0.5 * g.M;
    g.kappa = chart.tag() == ModelTag::flat ? S(0.0) : gauss_curvature_of(cf);

    const Vec3<S> T{-g.nu * g.n[0], -g.nu * g.n[1], 1.0 - g.nu * g.n[2]};
    g.T_norm2 = dot3(T, T);
    return g;
}

// f_z for real f with partials (fu, fv).
inline complex dz(double fu, double fv) { return {0.5 * fu, -0.5 * fv}; }
// For complex f = a + i b: f_zbar = ((a_u - b_v) + i (b_u + a_v)) / 2.
inline complex dzbar(double au, double av, double bu, double bv) { return {0.5 * (au - bv), 0.5 * (bu + av)}; }

inline void check_regular(const FundamentalSample& s, double tol_degenerate, double tol_conf) {
    if (!(s.lambda > tol_degenerate)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "lambda = %.3g at (u, v) = (%.6g, %.6g)", s.lambda, s.u, s.v);
        throw Error(ErrorKind::degenerate, buf);
    }
    if (!(s.conformality <= tol_conf)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "|<X_z, X_z>| = %.3g exceeds %.3g at (u, v) = (%.6g, %.6g)", s.conformality,
                      tol_conf, s.u, s.v);
        throw Error(ErrorKind::not_conformal, buf);
    }
}

inline FundamentalData induced_analytic(const ConformalImmersion& imm, const InducedOptions& opt, bool flip) {
    if (opt.nu < 2 || opt.nv < 2) throw Error(ErrorKind::domain, "analytic sample grid must be at least 2x2");
    FundamentalData d;
    d.label = imm.label();
    d.analytic = true;
    d.flipped = flip;
    d.nu = opt.nu;
    d.nv = opt.nv;
    d.rect = imm.rect();
    d.du = (d.rect.u1 - d.rect.u0) / (opt.nu - 1);
    d.dv = (d.rect.v1 - d.rect.v0) / (opt.nv - 1);
    d.tol_conf = opt.tol_conf.value_or(1e-8);
    d.samples.resize(static_cast<std::size_t>(opt.nu) * opt.nv);

    const Chart& chart = imm.chart();
    for (int j = 0; j < opt.nv; ++j)
        for (int i = 0; i < opt.nu; ++i) {
            FundamentalSample& s = d.samples[static_cast<std::size_t>(j) * opt.nu + i];
            s.u = imm.u_at(i, opt.nu);
            s.v = imm.v_at(j, opt.nv);
            const auto X = imm.jets(s.u, s.v);
            s.x = X[0].value();
            s.y = X[1].value();
            chart.require_inside(s.x, s.y);

            const Vec3<SurfaceJet> Xu{X[0].du(), X[1].du(), X[2].du()};
            const Vec3<SurfaceJet> Xv{X[0].dv(), X[1].dv(), X[2].dv()};
            const Vec3<SurfaceJet> Xuu{Xu[0].du(), Xu[1].du(), Xu[2].du()};
            const Vec3<SurfaceJet> Xuv{Xu[0].dv(), Xu[1].dv(), Xu[2].dv()};
            const Vec3<SurfaceJet> Xvv{Xv[0].dv(), Xv[1].dv(), Xv[2].dv()};
            const auto g = point_geometry<SurfaceJet>(chart, X, Xu, Xv, Xuu, Xuv, Xvv, flip);

            s.lambda = g.lambda.value();
            s.nu = g.nu.value();
            s.H = g.H.value();
            s.K = g.K.value();
            s.kappa = g.kappa.value();
            s.p = {g.p_re.value(), g.p_im.value()};
            s.T_norm2 = g.T_norm2.value();
            s.conformality = 0.25 * std::hypot(g.E.value() - g.G.value(), 2.0 * g.F.value());

            const SurfaceJet& h = X[2];
            const double hu = h.partial(1, 0), hv = h.partial(0, 1);
            const double huu = h.partial(2, 0), huv = h.partial(1, 1), hvv = h.partial(0, 2);
            s.h_z = dz(hu, hv);
            s.h_zz = {0.25 * (huu - hvv), -0.5 * huv};
            s.h_zzbar = 0.25 * (huu + hvv);
            s.T_coords = {hu / s.lambda, hv / s.lambda};

            s.lambda_z = dz(g.lambda.partial(1, 0), g.lambda.partial(0, 1));
            const SurfaceJet log_lambda = log(g.lambda);
            s.KI = -0.5 / s.lambda * (log_lambda.partial(2, 0) + log_lambda.partial(0, 2));

            const double nu_u = g.nu.partial(1, 0), nu_v = g.nu.partial(0, 1);
            s.nu_z = dz(nu_u, nu_v);
            s.lap_nu = (g.nu.partial(2, 0) + g.nu.partial(0, 2)) / s.lambda;
            s.grad_nu2 = (nu_u * nu_u + nu_v * nu_v) / s.lambda;
            for (int a = 0; a <= 2; ++a)
                for (int b = 0; a + b <= 2; ++b) s.nu_taylor.at(a, b) = g.nu.at(a, b);

            s.p_zbar = dzbar(g.p_re.partial(1, 0), g.p_re.partial(0, 1), g.p_im.partial(1, 0), g.p_im.partial(0, 1));
            s.H_z = dz(g.H.partial(1, 0), g.H.partial(0, 1));
            s.interior = true;

            check_regular(s, opt.tol_degenerate, d.tol_conf);
            d.max_conformality = std::max(d.max_conformality, s.conformality);
        }
    return d;
}

inline FundamentalData induced_sampled(const ConformalImmersion& imm, const InducedOptions& opt, bool flip) {
    const SampledMap& m = imm.samples();
    FundamentalData d;
    d.label = imm.label();
    d.analytic = false;
    d.flipped = flip;
    d.nu = m.nu;
    d.nv = m.nv;
    d.rect = imm.rect();
    d.du = (d.rect.u1 - d.rect.u0) / (m.nu - 1);
    d.dv = (d.rect.v1 - d.rect.v0) / (m.nv - 1);
    const double h = std::max(d.du, d.dv);
    d.tol_conf = opt.tol_conf.value_or(10.0 * h * h);
    d.samples.resize(static_cast<std::size_t>(m.nu) * m.nv);

    const Chart& chart = imm.chart();
    const double du = d.du, dv = d.dv;
    auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * m.nu + i; };
    auto X = [&](int i, int j) -> Vec3<double> {
        const std::size_t k = idx(i, j);
        return {m.F1[k], m.F2[k], m.h[k]};
    };

    // Fields on ring >= 1 (centered stencils for X derivatives).
    const std::size_t n = d.samples.size();
    std::vector<double> lam(n, 0.0), nuf(n, 0.0), Hf(n, 0.0), pre(n, 0.0), pim(n, 0.0), hf(n, 0.0);
    for (int j = 0; j < m.nv; ++j)
        for (int i = 0; i < m.nu; ++i) {
            FundamentalSample& s = d.samples[idx(i, j)];
            s.u = imm.u_at(i, m.nu);
            s.v = imm.v_at(j, m.nv);
            const auto P = X(i, j);
            s.x = P[0];
            s.y = P[1];
            hf[idx(i, j)] = P[2];
        }
    for (int j = 1; j + 1 < m.nv; ++j)
        for (int i = 1; i + 1 < m.nu; ++i) {
            FundamentalSample& s = d.samples[idx(i, j)];
            const auto P = X(i, j), E = X(i + 1, j), W = X(i - 1, j), N = X(i, j + 1), S = X(i, j - 1);
            const auto NE = X(i + 1, j + 1), NW = X(i - 1, j + 1), SE = X(i + 1, j - 1), SW = X(i - 1, j - 1);
            Vec3<double> Xu, Xv, Xuu, Xuv, Xvv;
            for (int c = 0; c < 3; ++c) {
                Xu[c] = (E[c] - W[c]) / (2 * du);
                Xv[c] = (N[c] - S[c]) / (2 * dv);
                Xuu[c] = (E[c] - 2 * P[c] + W[c]) / (du * du);
                Xvv[c] = (N[c] - 2 * P[c] + S[c]) / (dv * dv);
                Xuv[c] = (NE[c] - NW[c] - SE[c] + SW[c]) / (4 * du * dv);
            }
            chart.require_inside(P[0], P[1]);
            const auto g = point_geometry<double>(chart, P, Xu, Xv, Xuu, Xuv, Xvv, flip);
            s.lambda = g.lambda;
            s.nu = g.nu;
            s.H = g.H;
            s.K = g.K;
            s.kappa = g.kappa;
            s.p = {g.p_re, g.p_im};
            s.T_norm2 = g.T_norm2;
            s.conformality = 0.25 * std::hypot(g.E - g.G, 2.0 * g.F);
            s.h_z = dz(Xu[2], Xv[2]);
            s.h_zz = {0.25 * (Xuu[2] - Xvv[2]), -0.5 * Xuv[2]};
            s.h_zzbar = 0.25 * (Xuu[2] + Xvv[2]);
            s.T_coords = {Xu[2] / s.lambda, Xv[2] / s.lambda};
            check_regular(s, opt.tol_degenerate, d.tol_conf);
            d.max_conformality = std::max(d.max_conformality, s.conformality);
            const std::size_t k = idx(i, j);
            lam[k] = s.lambda;
            nuf[k] = s.nu;
            Hf[k] = s.H;
            pre[k] = s.p.real();
            pim[k] = s.p.imag();
        }

    // Derivatives of the computed fields on ring >= 2.
    for (int j = 2; j + 2 < m.nv; ++j)
        for (int i = 2; i + 2 < m.nu; ++i) {
            FundamentalSample& s = d.samples[idx(i, j)];
            auto cu = [&](const std::vector<double>& f) { return (f[idx(i + 1, j)] - f[idx(i - 1, j)]) / (2 * du); };
            auto cv = [&](const std::vector<double>& f) { return (f[idx(i, j + 1)] - f[idx(i, j - 1)]) / (2 * dv); };
            auto lap = [&](const std::vector<double>& f) {
                const double c = f[idx(i, j)];
                return (f[idx(i + 1, j)] - 2 * c + f[idx(i - 1, j)]) / (du * du) +
                       (f[idx(i, j + 1)] - 2 * c + f[idx(i, j - 1)]) / (dv * dv);
            };
            s.lambda_z = dz(cu(lam), cv(lam));
            const double nu_u = cu(nuf), nu_v = cv(nuf);
            s.nu_z = dz(nu_u, nu_v);
            s.lap_nu = lap(nuf) / s.lambda;
            s.grad_nu2 = (nu_u * nu_u + nu_v * nu_v) / s.lambda;
            s.p_zbar = dzbar(cu(pre), cv(pre), cu(pim), cv(pim));
            s.H_z = dz(cu(Hf), cv(Hf));
            // K(I) = -(1 / (2 lambda)) Laplacian(log lambda)
            const double l0 = std::log(lam[idx(i, j)]);
            const double lap_log = (std::log(lam[idx(i + 1, j)]) - 2 * l0 + std::log(lam[idx(i - 1, j)])) / (du * du) +
                                   (std::log(lam[idx(i, j + 1)]) - 2 * l0 + std::log(lam[idx(i, j - 1)])) / (dv * dv);
            s.KI = -0.5 / s.lambda * lap_log;
            s.interior = true;
        }
    return d;
}

}  // namespace detail

/// Induced geometry of a conformal immersion. Analytic immersions are sampled
/// on an opt.nu x opt.nv grid with exact jet derivatives; sampled immersions use
/// centered differences and flag the ring two samples deep as non-interior.
inline FundamentalData induced_data(const ConformalImmersion& imm, const InducedOptions& opt = {}) {
    auto build = [&](bool flip) {
        return imm.is_analytic() ? detail::induced_analytic(imm, opt, flip) : detail::induced_sampled(imm, opt, flip);
    };
    FundamentalData d = build(opt.flip_normal);
    if (opt.nonpositive_nu) {
        double sum = 0;
        std::size_t count = 0;
        for (const auto& s : d.samples)
            if (s.lambda > 0) {
                sum += s.nu;
                ++count;
            }
        if (count && sum > 0) d = build(!opt.flip_normal);
    }
    return d;
}

struct StructureOptions {
    std::optional<double> tolerance;  // default 1e-9 analytic, 50 h^2 sampled
    bool include_H_z = false;         // variable-H form of the Codazzi equation
};

inline double default_tolerance(const FundamentalData& d) {
    const double h = d.spacing();
    return d.analytic ? 1e-9 : 50.0 * h * h;
}

/// Residuals of the six structure equations.
inline ResidualReport verify_structure(const FundamentalData& d, const StructureOptions& opt = {}) {
    const double tol = opt.tolerance.value_or(default_tolerance(d));
    ResidualAccumulator r2, r3, r4, r5, r6, r7;
    bool any = false;
    for (const auto& s : d.samples) {
        if (!s.interior) continue;
        any = true;
        const double nu2 = s.nu * s.nu;
        r2.add(s.KI - (s.K + s.kappa * nu2));
        r3.add(std::norm(s.h_z) - 0.25 * s.lambda * (1.0 - nu2));
        r4.add(std::abs(s.h_zz - (s.lambda_z / s.lambda) * s.h_z - s.p * s.nu));
        r5.add(s.h_zzbar - 0.5 * s.lambda * s.H * s.nu);
        r6.add(std::abs(s.nu_z + s.H * s.h_z + (2.0 / s.lambda) * s.p * std::conj(s.h_z)));
        const complex Hz = opt.include_H_z ? s.H_z : complex(0.0);
        r7.add(std::abs(s.p_zbar - 0.5 * s.lambda * (Hz + s.kappa * s.nu * s.h_z)));
    }
    if (!any) throw Error(ErrorKind::capability, "no samples with second derivatives available");
    ResidualReport rep;
    rep.subject = d.label;
    rep.entries = {r2.finish("eq2_gauss", tol),        r3.finish("eq3_height_gradient", tol),
                   r4.finish("eq4_height_hessian", tol), r5.finish("eq5_height_laplacian", tol),
                   r6.finish("eq6_nu_z", tol),         r7.finish("eq7_codazzi", tol)};
    return rep;
}

/// Q = 2 H p - c h_z^2 per sample, with |dQ/dzbar| from directly differentiated data.
struct QField {
    double c = 0;
    std::vector<complex> Q;
    std::vector<double> qzbar_abs;   // NaN at non-interior samples
    double max_qzbar = 0;
    double rms_qzbar = 0;
    bool constant_H = false;
    bool kappa_matches_c = false;    // kappa == c on every sample
    bool holomorphic_expected() const { return constant_H && kappa_matches_c; }
};

inline bool is_constant_H(const FundamentalData& d, double tol) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : d.samples)
        if (s.interior) {
            lo = std::min(lo, s.H);
            hi = std::max(hi, s.H);
        }
    return hi - lo <= tol * std::max(1.0, std::abs(hi));
}

inline QField ar_differential(const FundamentalData& d, double c) {
    QField q;
    q.c = c;
    q.Q.reserve(d.samples.size());
    q.qzbar_abs.reserve(d.samples.size());
    const double tol = d.analytic ? 1e-9 : 1e-6;
    q.constant_H = is_constant_H(d, d.analytic ? 1e-9 : std::max(1e-6, 10 * d.spacing() * d.spacing()));
    q.kappa_matches_c = true;
    ResidualAccumulator acc;
    for (const auto& s : d.samples) {
        q.Q.push_back(2.0 * s.H * s.p - c * s.h_z * s.h_z);
        if (!s.interior) {
            q.qzbar_abs.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        if (std::abs(s.kappa - c) > tol) q.kappa_matches_c = false;
        // (2 H p - c h_z^2)_zbar = 2 H_zbar p + 2 H p_zbar - 2 c h_z h_{z zbar}, H real.
        const complex qz = 2.0 * std::conj(s.H_z) * s.p + 2.0 * s.H * s.p_zbar - 2.0 * c * s.h_z * s.h_zzbar;
        q.qzbar_abs.push_back(std::abs(qz));
        acc.add(std::abs(qz));
    }
    const auto stats = acc.finish("qzbar", 0.0);
    q.max_qzbar = stats.max_residual;
    q.rms_qzbar = stats.rms_residual;
    return q;
}

/// |grad nu|^2 against (c/4)(4H^2 + c(1-nu^2) - 2K)^2 - c(K^2 + 4|Q|^2/lambda^2).
inline ResidualReport nu_gradient_identity(const FundamentalData& d, double c, const QField& q,
                                           std::optional<double> tolerance = {}) {
    if (c == 0.0) throw Error(ErrorKind::hypothesis, "the gradient identity for nu needs c != 0");
    if (q.Q.size() != d.samples.size() || q.c != c)
        throw Error(ErrorKind::domain, "Q field does not belong to this data set and constant");
    ResidualAccumulator acc;
    for (std::size_t k = 0; k < d.samples.size(); ++k) {
        const auto& s = d.samples[k];
        if (!s.interior) continue;
        const double a = 4.0 * s.H * s.H + c * (1.0 - s.nu * s.nu) - 2.0 * s.K;
        const double rhs = 0.25 * c * a * a - c * (s.K * s.K + 4.0 * std::norm(q.Q[k]) / (s.lambda * s.lambda));
        acc.add(s.grad_nu2 - rhs);
    }
    ResidualReport rep;
    rep.subject = d.label;
    rep.entries = {acc.finish("eq8_grad_nu", tolerance.value_or(default_tolerance(d)))};
    return rep;
}

/// Per-sample residual of Laplacian(nu) + (4H^2 + kappa(1-nu^2) - 2K) nu (NaN off the interior).
inline std::vector<double> nu_laplacian_residuals(const FundamentalData& d) {
    std::vector<double> out;
    out.reserve(d.samples.size());
    for (const auto& s : d.samples) {
        if (!s.interior) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double potential = exact_sum({4.0 * s.H * s.H, s.kappa * (1.0 - s.nu * s.nu), -2.0 * s.K});
        out.push_back(s.lap_nu + potential * s.nu);
    }
    return out;
}

/// Per-sample Jacobi residual Laplacian(nu) + (|A|^2 + Ric(N)) nu,
/// |A|^2 = 4H^2 - 2K, Ric(N) = kappa (1 - nu^2).
inline std::vector<double> jacobi_residuals(const FundamentalData& d) {
    std::vector<double> out;
    out.reserve(d.samples.size());
    for (const auto& s : d.samples) {
        if (!s.interior) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double ric = s.kappa * (1.0 - s.nu * s.nu);
        const double potential = exact_sum({ric, 4.0 * s.H * s.H, -2.0 * s.K});
        out.push_back(s.lap_nu + potential * s.nu);
    }
    return out;
}

namespace detail {
inline ResidualReport aggregate(const FundamentalData& d, const std::vector<double>& r, const char* id,
                                std::optional<double> tolerance) {
    ResidualAccumulator acc;
    for (double x : r)
        if (!std::isnan(x)) acc.add(x);
    ResidualReport rep;
    rep.subject = d.label;
    rep.entries = {acc.finish(id, tolerance.value_or(default_tolerance(d)))};
    return rep;
}
}  // namespace detail

inline ResidualReport nu_laplacian_identity(const FundamentalData& d, std::optional<double> tolerance = {}) {
    return detail::aggregate(d, nu_laplacian_residuals(d), "eq9_laplacian_nu", tolerance);
}

inline ResidualReport jacobi_residual(const FundamentalData& d, std::optional<double> tolerance = {}) {
    return detail::aggregate(d, jacobi_residuals(d), "jacobi_nu", tolerance);
}

/// f_m(nu) = m / sqrt(4H^2 - 1) * asin(nu / sqrt(4H^2 - 1 + nu^2)).
template <class S>
S f_m(const S& nu, double m, double H) {
    using std::asin;
    using std::sqrt;
    const double a = 4.0 * H * H - 1.0;
    return (m / std::sqrt(a)) * asin(nu / sqrt(a + nu * nu));
}

inline double f_m_lower_bound(double m, double H) {
    return m / std::sqrt(4.0 * H * H - 1.0) * std::asin(-1.0 / (2.0 * std::abs(H)));
}

struct SubharmonicProfile {
    double m = 0, H = 0, c = -1;
    double lower_bound = 0;
    std::vector<double> f;      // per sample (NaN where nu is undefined)
    std::vector<double> lap_f;  // NaN off the interior
    double min_lap_f = 0, f_min = 0, f_max = 0;
    bool subharmonic = false;   // min lap f >= -lap_tol
    bool within_bounds = false; // lower_bound - bound_tol <= f <= bound_tol
};

struct SubharmonicOptions {
    double lap_tol = 1e-8;
    double bound_tol = 1e-12;
    double nu_tol = 1e-12;      // nu may exceed 0 by this much
    double kappa_tol = 1e-9;    // kappa may undershoot -1 by this much
};

namespace detail {
inline void check_subharmonic_hypotheses(double H, double m, double c) {
    if (!(m > 0)) throw Error(ErrorKind::hypothesis, "m must be positive");
    if (c != -1.0) throw Error(ErrorKind::hypothesis, "f_m is normalized for c = -1");
    if (!(std::abs(H) > 0.5)) throw Error(ErrorKind::hypothesis, "f_m needs H > 1/2");
}

inline void finish_profile(SubharmonicProfile& p, const SubharmonicOptions& opt) {
    p.min_lap_f = std::numeric_limits<double>::infinity();
    p.f_min = std::numeric_limits<double>::infinity();
    p.f_max = -p.f_min;
    for (double x : p.lap_f)
        if (!std::isnan(x)) p.min_lap_f = std::min(p.min_lap_f, x);
    for (double x : p.f) {
        if (std::isnan(x)) continue;
        p.f_min = std::min(p.f_min, x);
        p.f_max = std::max(p.f_max, x);
    }
    p.subharmonic = p.min_lap_f >= -opt.lap_tol;
    p.within_bounds = p.f_min >= p.lower_bound - opt.bound_tol && p.f_max <= opt.bound_tol;
}
}  // namespace detail

/// The bounded subharmonic function f_m(nu) on an H-surface with c = -1, H > 1/2, nu <= 0.
/// Its Laplacian is obtained by differentiating f_m(nu) directly, not by the chain rule.
inline SubharmonicProfile f_subharmonic(const FundamentalData& d, double m, double c = -1.0,
                                        const SubharmonicOptions& opt = {}) {
    double H_sum = 0;
    std::size_t count = 0;
    for (const auto& s : d.samples)
        if (s.interior) {
            H_sum += s.H;
            ++count;
        }
    if (!count) throw Error(ErrorKind::capability, "no interior samples");
    const double H = std::abs(H_sum / static_cast<double>(count));
    detail::check_subharmonic_hypotheses(H, m, c);
    if (!is_constant_H(d, d.analytic ? 1e-9 : std::max(1e-6, 10 * d.spacing() * d.spacing())))
        throw Error(ErrorKind::hypothesis, "f_m needs constant mean curvature");
    for (const auto& s : d.samples) {
        if (s.lambda == 0) continue;  // unsampled outer ring
        if (s.nu > opt.nu_tol) throw Error(ErrorKind::hypothesis, "f_m needs nu <= 0 (flip the normal)");
        if (s.kappa < c - opt.kappa_tol) throw Error(ErrorKind::hypothesis, "f_m needs kappa >= -1");
    }

    SubharmonicProfile p;
    p.m = m;
    p.H = H;
    p.c = c;
    p.lower_bound = f_m_lower_bound(m, H);
    p.f.reserve(d.samples.size());
    p.lap_f.reserve(d.samples.size());
    if (d.analytic) {
        for (const auto& s : d.samples) {
            const Jet<2> f = f_m(s.nu_taylor, m, H);
            p.f.push_back(f.value());
            p.lap_f.push_back((f.partial(2, 0) + f.partial(0, 2)) / s.lambda);
        }
    } else {
        std::vector<double> fv(d.samples.size(), 0.0);
        for (std::size_t k = 0; k < d.samples.size(); ++k)
            fv[k] = d.samples[k].lambda > 0 ? f_m(d.samples[k].nu, m, H) : std::numeric_limits<double>::quiet_NaN();
        for (int j = 0; j < d.nv; ++j)
            for (int i = 0; i < d.nu; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * d.nu + i;
                const auto& s = d.samples[k];
                p.f.push_back(fv[k]);
                if (!s.interior) {
                    p.lap_f.push_back(std::numeric_limits<double>::quiet_NaN());
                    continue;
                }
                const double lap = (fv[k + 1] - 2 * fv[k] + fv[k - 1]) / (d.du * d.du) +
                                   (fv[k + d.nu] - 2 * fv[k] + fv[k - d.nu]) / (d.dv * d.dv);
                p.lap_f.push_back(lap / s.lambda);
            }
    }
    detail::finish_profile(p, opt);
    return p;
}

/// Profile from raw per-sample nu values and their Laplacians computed elsewhere
/// (e.g. on a graph in non-conformal coordinates).
inline SubharmonicProfile f_subharmonic_from_fields(const std::vector<double>& nu, const std::vector<double>& lap_f,
                                                    double H, double m, double c = -1.0,
                                                    const SubharmonicOptions& opt = {}) {
    detail::check_subharmonic_hypotheses(H, m, c);
    for (double x : nu)
        if (x > opt.nu_tol) throw Error(ErrorKind::hypothesis, "f_m needs nu <= 0");
    SubharmonicProfile p;
    p.m = m;
    p.H = std::abs(H);
    p.c = c;
    p.lower_bound = f_m_lower_bound(m, H);
    for (double x : nu) p.f.push_back(f_m(x, m, p.H));
    p.lap_f = lap_f;
    detail::finish_profile(p, opt);
    return p;
}

/// Grid file:
///   # cmclab immersion grid v1
///   chart <key=value ...>
///   bounds u0 u1 v0 v1
///   shape nu nv
///   u v F1 F2 h        (nu * nv rows, u fastest)
inline void write_immersion_grid(const ConformalImmersion& imm, const std::string& path) {
    const SampledMap& m = imm.samples();
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path);
    const ParameterRect& r = imm.rect();
    char buf[200];
    out << "# cmclab immersion grid v1\n";
    out << "chart " << chart_spec_string(imm.chart()) << "\n";
    std::snprintf(buf, sizeof buf, "bounds %.17g %.17g %.17g %.17g\n", r.u0, r.u1, r.v0, r.v1);
    out << buf;
    out << "shape " << m.nu << " " << m.nv << "\n";
    for (int j = 0; j < m.nv; ++j)
        for (int i = 0; i < m.nu; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * m.nu + i;
            std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g\n", imm.u_at(i, m.nu), imm.v_at(j, m.nv),
                          m.F1[k], m.F2[k], m.h[k] + imm.height_offset());
            out << buf;
        }
    if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

inline ConformalImmersion read_immersion_grid(std::istream& in, const std::string& label = "grid") {
    std::string line;
    int lineno = 0;
    auto next = [&]() {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next() || line.rfind("# cmclab immersion grid v1", 0) != 0)
        throw ParseError("missing immersion grid header", lineno, 1);
    if (!next() || line.rfind("chart ", 0) != 0) throw ParseError("expected chart line", lineno, 1);
    Chart chart = chart_from_config(parse_chart_spec(line.substr(6)));
    ParameterRect r;
    if (!next()) throw ParseError("expected bounds line", lineno, 1);
    {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key >> r.u0 >> r.u1 >> r.v0 >> r.v1) || key != "bounds")
            throw ParseError("malformed bounds line", lineno, 1);
    }
    SampledMap m;
    if (!next()) throw ParseError("expected shape line", lineno, 1);
    {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key >> m.nu >> m.nv) || key != "shape" || m.nu < 1 || m.nv < 1)
            throw ParseError("malformed shape line", lineno, 1);
    }
    const std::size_t n = static_cast<std::size_t>(m.nu) * m.nv;
    m.F1.resize(n);
    m.F2.resize(n);
    m.h.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!next()) throw ParseError("grid file ends after " + std::to_string(k) + " rows", lineno, 1);
        std::istringstream ls(line);
        double u, v;
        if (!(ls >> u >> v >> m.F1[k] >> m.F2[k] >> m.h[k])) throw ParseError("malformed sample row", lineno, 1);
    }
    return ConformalImmersion::sampled(std::move(chart), r, std::move(m), label);
}

inline ConformalImmersion read_immersion_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot read " + path);
    return read_immersion_grid(in, path);
}

}  // namespace cmc
