#pragma once

// Model surfaces: slices, vertical planes, tilted planes, vertical cylinders.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cmc/ambient.hpp"
#include "cmc/errors.hpp"
#include "cmc/immersion.hpp"

namespace cmc {

enum class ModelKind { slice, vertical_plane, tilted_plane, vertical_cylinder };

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::slice: return "slice";
        case ModelKind::vertical_plane: return "vertical_plane";
        case ModelKind::tilted_plane: return "tilted_plane";
        case ModelKind::vertical_cylinder: return "vertical_cylinder";
    }
    return "unknown";
}

/// CLI names: slice, vplane, tilted, cylinder.
inline std::optional<ModelKind> model_kind_from_name(const std::string& s) {
    if (s == "slice") return ModelKind::slice;
    if (s == "vplane" || s == "vertical_plane") return ModelKind::vertical_plane;
    if (s == "tilted" || s == "tilted_plane") return ModelKind::tilted_plane;
    if (s == "cylinder" || s == "vertical_cylinder") return ModelKind::vertical_cylinder;
    return std::nullopt;
}

struct ExpectedInvariants {
    double lambda = 1;  // NaN when not constant
    double nu = 0, H = 0, K = 0;
    complex p;
};

struct ModelDescriptor {
    ModelKind kind = ModelKind::slice;
    Chart chart = Chart::flat();
    std::map<std::string, double> parameters;
    ExpectedInvariants expected;
    std::string note;
    ConformalImmersion immersion;
};

namespace detail {

// Coordinate position at signed geodesic distance s along a ray from the origin.
template <class S>
S geodesic_coordinate(double k, const S& s) {
    if (k == 0.0) return s;
    const double a = std::sqrt(std::abs(k));
    return k < 0 ? tanh(0.5 * a * s) / a : tan(0.5 * a * s) / a;
}

inline ParameterRect default_chart_rect(const Chart& chart) {
    const Region& dom = chart.domain();
    if (dom.kind == Region::Kind::disk) {
        const double r = 0.5 * dom.radius;
        return {dom.cx - r, dom.cx + r, dom.cy - r, dom.cy + r};
    }
    if (dom.kind == Region::Kind::rectangle) {
        const double w = 0.25 * (dom.xmax - dom.xmin), hgt = 0.25 * (dom.ymax - dom.ymin);
        return {dom.xmin + w, dom.xmax - w, dom.ymin + hgt, dom.ymax - hgt};
    }
    return {-1, 1, -1, 1};
}

inline const char* covering_note() {
    return "parametrized on the universal cover; quotient surfaces are not represented";
}

}  // namespace detail

/// Horizontal slice M x {t0}. The parameter is the chart coordinate reflected in
/// y so that the normal points down (nu = -1).
inline ModelDescriptor slice_model(const Chart& chart, double t0, std::optional<ParameterRect> rect = {}) {
    ModelDescriptor d;
    d.kind = ModelKind::slice;
    d.chart = chart;
    d.parameters = {{"t0", t0}};
    d.expected = {std::numeric_limits<double>::quiet_NaN(), -1.0, 0.0, 0.0, {}};
    d.note = detail::covering_note();
    ParameterRect r = rect.value_or(detail::default_chart_rect(chart));
    // v -> -v keeps the parameter rectangle over the same region after reflection
    const ParameterRect pr{r.u0, r.u1, -r.v1, -r.v0};
    d.immersion = ConformalImmersion::analytic(
        chart, pr,
        [t0](const SurfaceJet& u, const SurfaceJet& v) { return std::array<SurfaceJet, 3>{u, -v, SurfaceJet(t0)}; },
        "slice");
    return d;
}

inline ConformalImmersion slice(const Chart& chart, double t0) { return slice_model(chart, t0).immersion; }

/// gamma x R for the geodesic through the origin along the x axis, z = s + i t.
inline ModelDescriptor vertical_plane_model(const Chart& chart, ParameterRect rect = {-1, 1, -1, 1}) {
    if (!chart.constant_curvature())
        throw Error(ErrorKind::capability, "vertical planes are built only in flat and space-form charts");
    const double k = chart.kappa0();
    if (k > 0 && std::max(std::abs(rect.u0), std::abs(rect.u1)) >= std::numbers::pi / std::sqrt(k))
        throw Error(ErrorKind::domain, "geodesic leaves the stereographic chart");
    ModelDescriptor d;
    d.kind = ModelKind::vertical_plane;
    d.chart = chart;
    d.parameters = {{"kappa0", k}};
    d.expected = {1.0, 0.0, 0.0, 0.0, {}};
    d.note = detail::covering_note();
    d.immersion = ConformalImmersion::analytic(
        chart, rect,
        [k](const SurfaceJet& s, const SurfaceJet& t) {
            return std::array<SurfaceJet, 3>{detail::geodesic_coordinate(k, s), SurfaceJet(0.0), t};
        },
        "vertical_plane");
    return d;
}

inline ConformalImmersion vertical_plane(const Chart& chart) { return vertical_plane_model(chart).immersion; }

/// X(u, v) = (u, v cos theta, v sin theta) in R^2 x R.
inline ModelDescriptor tilted_plane_model(const Chart& chart, double theta, ParameterRect rect = {-1, 1, -1, 1}) {
    if (chart.tag() != ModelTag::flat) throw Error(ErrorKind::capability, "tilted planes exist only over the flat chart");
    if (!(theta > 0.0 && theta <= 0.5 * std::numbers::pi))
        throw Error(ErrorKind::domain, "tilt angle must lie in (0, pi/2]");
    ModelDescriptor d;
    d.kind = ModelKind::tilted_plane;
    d.chart = chart;
    d.parameters = {{"theta", theta}};
    const double c = std::cos(theta), s = std::sin(theta);
    d.expected = {1.0, c, 0.0, 0.0, {}};
    d.note = detail::covering_note();
    d.immersion = ConformalImmersion::analytic(
        chart, rect,
        [c, s](const SurfaceJet& u, const SurfaceJet& v) { return std::array<SurfaceJet, 3>{u, c * v, s * v}; },
        "tilted_plane");
    return d;
}

inline ConformalImmersion tilted_plane(double theta) { return tilted_plane_model(Chart::flat(), theta).immersion; }

/// Vertical cylinder over the circle of geodesic curvature 2|H| centred at the origin,
/// z = s + i t with s arclength. The circle is traversed clockwise for H > 0,
/// so that the normal points inward and the mean curvature equals H.
inline ModelDescriptor vertical_cylinder_model(const Chart& chart, double H, std::optional<ParameterRect> rect = {}) {
    if (!chart.constant_curvature() || chart.kappa0() > 0)
        throw Error(ErrorKind::capability, "vertical cylinders are built over flat or hyperbolic charts");
    const double k = chart.kappa0();
    const double kg = 2.0 * std::abs(H);
    double R, speed;  // coordinate radius, d(angle)/ds
    if (k == 0.0) {
        if (H == 0.0) throw Error(ErrorKind::unsupported_curve, "H = 0 gives a line, not a circle");
        R = 1.0 / kg;
        speed = kg;
    } else {
        const double a = std::sqrt(-k);
        if (!(kg > a))
            throw Error(ErrorKind::unsupported_curve,
                        "curves of geodesic curvature 2H <= sqrt(-kappa0) are horocycles or equidistants");
        const double rho = std::atanh(a / kg);  // radius in the curvature -1 rescaling
        R = std::tanh(0.5 * rho) / a;
        speed = a / std::sinh(rho);
    }
    const double w = H > 0 ? -speed : speed;
    ModelDescriptor d;
    d.kind = ModelKind::vertical_cylinder;
    d.chart = chart;
    d.parameters = {{"H", H}, {"kappa0", k}, {"coordinate_radius", R}};
    d.expected = {1.0, 0.0, H, 0.0, {0.5 * H, 0.0}};
    d.note = detail::covering_note();
    d.immersion = ConformalImmersion::analytic(
        chart, rect.value_or(ParameterRect{-1, 1, -1, 1}),
        [R, w](const SurfaceJet& s, const SurfaceJet& t) {
            const SurfaceJet th = w * s;
            return std::array<SurfaceJet, 3>{R * cos(th), R * sin(th), t};
        },
        "vertical_cylinder");
    return d;
}

inline ConformalImmersion vertical_cylinder(const Chart& chart, double H) {
    return vertical_cylinder_model(chart, H).immersion;
}

/// Which model surfaces a complete H-surface with sign-constant angle function must be,
/// given H, the curvature bound c and optionally a known constant value of nu.
struct Classification {
    double H = 0, c = 0;
    std::optional<double> nu_constant;
    std::vector<ModelKind> kinds;  // empty: not classified
    std::string statement;

    bool classified() const { return !kinds.empty(); }
};

inline Classification classify(double H, double c, std::optional<double> nu_constant = {}) {
    Classification out;
    out.H = std::abs(H);  // orientation flip
    out.c = c;
    out.nu_constant = nu_constant;
    const double h = out.H;
    std::vector<ModelKind> by_H;
    if (c >= 0) {
        by_H = h == 0 ? std::vector{ModelKind::slice, ModelKind::vertical_plane, ModelKind::tilted_plane}
                      : std::vector{ModelKind::vertical_cylinder};
    } else if (h > 0.5 * std::sqrt(-c)) {
        by_H = {ModelKind::vertical_cylinder};
    } else if (h == 0 && nu_constant) {
        // constant nu with H = 0 and c < 0: slices and vertical planes
        by_H = {ModelKind::slice, ModelKind::vertical_plane};
    }

    if (nu_constant) {
        const double nu = *nu_constant;
        std::vector<ModelKind> allowed;
        if (std::abs(nu) == 1.0)
            allowed = {ModelKind::slice};
        else if (nu == 0.0)
            allowed = {ModelKind::vertical_plane, ModelKind::vertical_cylinder};
        else if (std::abs(nu) < 1.0)
            allowed = {ModelKind::tilted_plane};
        for (ModelKind k : by_H)
            if (std::find(allowed.begin(), allowed.end(), k) != allowed.end()) out.kinds.push_back(k);
    } else {
        out.kinds = by_H;
    }

    if (out.kinds.empty()) {
        out.statement = "outside theorem hypotheses";
    } else if (out.kinds.size() == 1 && out.kinds[0] == ModelKind::vertical_cylinder) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "vertical cylinder, geodesic curvature %g", 2.0 * h);
        out.statement = buf;
    } else {
        static const std::map<ModelKind, const char*> names = {{ModelKind::slice, "slice"},
                                                               {ModelKind::vertical_plane, "vertical plane"},
                                                               {ModelKind::tilted_plane, "tilted plane"},
                                                               {ModelKind::vertical_cylinder, "vertical cylinder"}};
        for (std::size_t i = 0; i < out.kinds.size(); ++i) {
            if (i) out.statement += " | ";
            out.statement += names.at(out.kinds[i]);
        }
    }
    return out;
}

}  // namespace cmc
