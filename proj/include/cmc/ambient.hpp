#pragma once

// The base surface M^2 as a single conformal chart g = e^{2 phi} (dx^2 + dy^2),
// its Gauss curvature, and closed-form geodesic balls of the space forms.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cmc/errors.hpp"
#include "cmc/expression.hpp"
#include "cmc/jet.hpp"

namespace cmc {

/// Coordinate region: the whole plane, an axis-aligned rectangle, or a disk.
struct Region {
    enum class Kind { plane, rectangle, disk };

    Kind kind = Kind::plane;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;  // rectangle
    double cx = 0, cy = 0, radius = 0;              // disk

    static Region plane() { return {}; }
    static Region rectangle(double x0, double x1, double y0, double y1) {
        Region r;
        r.kind = Kind::rectangle;
        r.xmin = x0;
        r.xmax = x1;
        r.ymin = y0;
        r.ymax = y1;
        return r;
    }
    static Region disk(double cx, double cy, double radius) {
        Region r;
        r.kind = Kind::disk;
        r.cx = cx;
        r.cy = cy;
        r.radius = radius;
        return r;
    }

    bool empty() const {
        switch (kind) {
            case Kind::plane: return false;
            case Kind::rectangle: return !(xmax > xmin) || !(ymax > ymin);
            case Kind::disk: return !(radius > 0);
        }
        return true;
    }

    /// Open-set membership.
    bool contains(double x, double y) const {
        switch (kind) {
            case Kind::plane: return std::isfinite(x) && std::isfinite(y);
            case Kind::rectangle: return x > xmin && x < xmax && y > ymin && y < ymax;
            case Kind::disk: return std::hypot(x - cx, y - cy) < radius;
        }
        return false;
    }

    /// Closed-set membership, used for sample grids that include their edges.
    bool contains_closed(double x, double y) const {
        switch (kind) {
            case Kind::plane: return std::isfinite(x) && std::isfinite(y);
            case Kind::rectangle: return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
            case Kind::disk: return std::hypot(x - cx, y - cy) <= radius;
        }
        return false;
    }

    /// True if `inner` (closed) lies in this region's interior.
    bool contains(const Region& inner) const {
        if (kind == Kind::plane) return true;
        switch (inner.kind) {
            case Kind::plane: return false;
            case Kind::rectangle:
                return contains(inner.xmin, inner.ymin) && contains(inner.xmin, inner.ymax) &&
                       contains(inner.xmax, inner.ymin) && contains(inner.xmax, inner.ymax);
            case Kind::disk:
                if (kind == Kind::disk)
                    return std::hypot(inner.cx - cx, inner.cy - cy) + inner.radius < radius;
                return inner.cx - inner.radius > xmin && inner.cx + inner.radius < xmax &&
                       inner.cy - inner.radius > ymin && inner.cy + inner.radius < ymax;
        }
        return false;
    }

    std::string to_string() const {
        char buf[160];
        switch (kind) {
            case Kind::plane: return "plane";
            case Kind::rectangle:
                std::snprintf(buf, sizeof buf, "rect:%.17g,%.17g,%.17g,%.17g", xmin, xmax, ymin, ymax);
                return buf;
            case Kind::disk:
                std::snprintf(buf, sizeof buf, "disk:%.17g,%.17g,%.17g", cx, cy, radius);
                return buf;
        }
        return "";
    }

    static Region from_string(const std::string& s) {
        if (s == "plane") return plane();
        auto numbers = [&](std::size_t from) {
            std::vector<double> v;
            std::stringstream ss(s.substr(from));
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    v.push_back(std::stod(item));
                } catch (const std::exception&) {
                    throw Error(ErrorKind::parse, "bad number '" + item + "' in region '" + s + "'");
                }
            }
            return v;
        };
        if (s.rfind("rect:", 0) == 0) {
            const auto v = numbers(5);
            if (v.size() != 4) throw Error(ErrorKind::parse, "rect region needs 4 numbers: '" + s + "'");
            return rectangle(v[0], v[1], v[2], v[3]);
        }
        if (s.rfind("disk:", 0) == 0) {
            const auto v = numbers(5);
            if (v.size() != 3) throw Error(ErrorKind::parse, "disk region needs 3 numbers: '" + s + "'");
            return disk(v[0], v[1], v[2]);
        }
        throw Error(ErrorKind::parse, "unknown region '" + s + "'");
    }

    friend bool operator==(const Region&, const Region&) = default;
};

enum class ModelTag { flat, sphere, hyperbolic, custom };

inline const char* to_string(ModelTag t) {
    switch (t) {
        case ModelTag::flat: return "flat";
        case ModelTag::sphere: return "sphere";
        case ModelTag::hyperbolic: return "hyperbolic";
        case ModelTag::custom: return "custom";
    }
    return "?";
}

/// phi and the derivatives the geometry needs, at one point.
template <class S>
struct ConformalFactor {
    S phi, phi_x, phi_y, lap_phi;
};

namespace chart_models {

struct Flat {
    template <class S>
    ConformalFactor<S> eval(const S&, const S&) const {
        return {S(0.0), S(0.0), S(0.0), S(0.0)};
    }
};

// Stereographic model of constant curvature k: phi = log 2 - log(1 + k r^2).
struct SpaceForm {
    double k;
    template <class S>
    ConformalFactor<S> eval(const S& x, const S& y) const {
        using std::log;
        const S q = 1.0 + k * (x * x + y * y);
        const S inv = 1.0 / q;
        return {std::numbers::ln2 - log(q), -2.0 * k * x * inv, -2.0 * k * y * inv, -4.0 * k * inv * inv};
    }
};

struct Custom {
    Expression phi, phi_x, phi_y, lap;
    template <class S>
    ConformalFactor<S> eval(const S& x, const S& y) const {
        return {phi.evaluate(x, y), phi_x.evaluate(x, y), phi_y.evaluate(x, y), lap.evaluate(x, y)};
    }
};

// phi sampled at nodes x0 + i hx, y0 + j hy; derivatives by centered
// differences at nodes, bilinear interpolation between nodes.
struct Sampled {
    double x0, y0, hx, hy;
    int nx, ny;
    std::vector<double> phi;  // row-major in j: phi[j * nx + i]

    double node(int i, int j) const { return phi[static_cast<std::size_t>(j) * nx + i]; }

    ConformalFactor<double> at_node(int i, int j) const {
        const double c = node(i, j);
        const double xp = node(i + 1, j), xm = node(i - 1, j), yp = node(i, j + 1), ym = node(i, j - 1);
        return {c, (xp - xm) / (2 * hx), (yp - ym) / (2 * hy),
                (xp - 2 * c + xm) / (hx * hx) + (yp - 2 * c + ym) / (hy * hy)};
    }

    ConformalFactor<double> eval(double x, double y) const {
        const double sx = (x - x0) / hx, sy = (y - y0) / hy;
        // Interpolation cell corners must carry full centered stencils.
        if (!(sx >= 1.0 && sx <= nx - 2.0 && sy >= 1.0 && sy <= ny - 2.0))
            throw Error(ErrorKind::boundary_stencil, "sampled chart queried within one spacing of its boundary");
        int i = std::min(static_cast<int>(sx), nx - 3);
        int j = std::min(static_cast<int>(sy), ny - 3);
        const double tx = sx - i, ty = sy - j;
        const auto a = at_node(i, j), b = at_node(i + 1, j), c = at_node(i, j + 1), d = at_node(i + 1, j + 1);
        auto mix = [&](double ua, double ub, double uc, double ud) {
            return (1 - tx) * (1 - ty) * ua + tx * (1 - ty) * ub + (1 - tx) * ty * uc + tx * ty * ud;
        };
        return {mix(a.phi, b.phi, c.phi, d.phi), mix(a.phi_x, b.phi_x, c.phi_x, d.phi_x),
                mix(a.phi_y, b.phi_y, c.phi_y, d.phi_y), mix(a.lap_phi, b.lap_phi, c.lap_phi, d.lap_phi)};
    }
};

}  // namespace chart_models

/// A Riemannian surface given by one conformal chart.
class Chart {
public:
    static Chart flat() { return Chart(ModelTag::flat, 0.0, Region::plane(), chart_models::Flat{}); }

    /// Stereographic space form of curvature k (sphere for k > 0, hyperbolic for k < 0).
    static Chart space_form(double k) {
        if (k == 0.0) return flat();
        const Region dom = k < 0 ? Region::disk(0, 0, 1.0 / std::sqrt(-k)) : Region::plane();
        return Chart(k < 0 ? ModelTag::hyperbolic : ModelTag::sphere, k, dom, chart_models::SpaceForm{k});
    }
    static Chart poincare() { return space_form(-1.0); }
    static Chart sphere(double k = 1.0) {
        if (!(k > 0)) throw Error(ErrorKind::domain, "sphere chart needs kappa0 > 0");
        return space_form(k);
    }

    static Chart custom(const std::string& phi_text, const Region& domain) {
        if (domain.empty()) throw Error(ErrorKind::domain, "custom chart with empty domain");
        chart_models::Custom m;
        m.phi = Expression::parse(phi_text);
        m.phi_x = m.phi.derivative('x');
        m.phi_y = m.phi.derivative('y');
        m.lap = m.phi_x.derivative('x') + m.phi_y.derivative('y');
        Chart c(ModelTag::custom, 0.0, domain, std::move(m));
        c.source_ = phi_text;
        return c;
    }

    /// Grid chart; `phi` holds nx * ny samples over the rectangle `bounds`, row-major in y.
    static Chart sampled(const Region& bounds, int nx, int ny, std::vector<double> phi) {
        if (bounds.kind != Region::Kind::rectangle || bounds.empty())
            throw Error(ErrorKind::domain, "sampled chart needs a nonempty rectangle");
        if (nx < 4 || ny < 4) throw Error(ErrorKind::domain, "sampled chart needs at least 4x4 samples");
        if (phi.size() != static_cast<std::size_t>(nx) * ny)
            throw Error(ErrorKind::domain, "sampled chart: sample count does not match grid shape");
        chart_models::Sampled m{bounds.xmin, bounds.ymin, (bounds.xmax - bounds.xmin) / (nx - 1),
                                (bounds.ymax - bounds.ymin) / (ny - 1), nx, ny, std::move(phi)};
        return Chart(ModelTag::custom, 0.0, bounds, std::move(m));
    }

    /// Samples an analytic chart onto an nx x ny grid over `bounds`.
    Chart resampled(const Region& bounds, int nx, int ny) const {
        if (!analytic()) throw Error(ErrorKind::capability, "resampling needs an analytic chart");
        if (nx < 4 || ny < 4) throw Error(ErrorKind::domain, "sampled chart needs at least 4x4 samples");
        std::vector<double> phi(static_cast<std::size_t>(nx) * ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double x = bounds.xmin + (bounds.xmax - bounds.xmin) * i / (nx - 1);
                const double y = bounds.ymin + (bounds.ymax - bounds.ymin) * j / (ny - 1);
                phi[static_cast<std::size_t>(j) * nx + i] = factor(x, y).phi;
            }
        Chart c = sampled(bounds, nx, ny, std::move(phi));
        c.tag_ = tag_;
        c.kappa0_ = kappa0_;
        return c;
    }

    ModelTag tag() const { return tag_; }
    double kappa0() const { return kappa0_; }
    const Region& domain() const { return domain_; }
    bool analytic() const { return !std::holds_alternative<chart_models::Sampled>(model_); }
    bool constant_curvature() const { return tag_ != ModelTag::custom; }
    /// Expression text for custom analytic charts, empty otherwise.
    const std::string& source() const { return source_; }

    /// Grid spacing of a sampled chart (0 for analytic charts).
    double spacing() const {
        if (auto* s = std::get_if<chart_models::Sampled>(&model_)) return std::max(s->hx, s->hy);
        return 0.0;
    }

    /// phi and its derivatives at (x, y). Jets are accepted by analytic charts only.
    template <class S>
    ConformalFactor<S> factor(const S& x, const S& y) const {
        return std::visit(
            [&](const auto& m) -> ConformalFactor<S> {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, chart_models::Sampled>) {
                    if constexpr (std::is_same_v<S, double>) {
                        return m.eval(x, y);
                    } else {
                        throw Error(ErrorKind::capability, "sampled charts provide no analytic derivatives");
                    }
                } else {
                    return m.eval(x, y);
                }
            },
            model_);
    }

    /// Custom domains are closed; model domains (the Poincare disk) are open.
    void require_inside(double x, double y) const {
        if (!(tag_ == ModelTag::custom ? domain_.contains_closed(x, y) : domain_.contains(x, y))) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "point (%.6g, %.6g) outside chart domain %s", x, y,
                          domain_.to_string().c_str());
            throw Error(ErrorKind::domain, buf);
        }
    }

    /// Serializable description; see chart_from_config.
    std::map<std::string, std::string> config() const;

private:
    using Model = std::variant<chart_models::Flat, chart_models::SpaceForm, chart_models::Custom, chart_models::Sampled>;

    Chart(ModelTag tag, double k, Region domain, Model model)
        : tag_(tag), kappa0_(k), domain_(domain), model_(std::move(model)) {}

    ModelTag tag_;
    double kappa0_;
    Region domain_;
    Model model_;
    std::string source_;
    int sampled_n_ = 0;  // grid resolution when resampled from a config

    friend Chart chart_from_config(const std::map<std::string, std::string>& cfg);
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::map<std::string, std::string> Chart::config() const {
    std::map<std::string, std::string> cfg;
    switch (tag_) {
        case ModelTag::flat: cfg["model"] = "flat"; break;
        case ModelTag::sphere:
        case ModelTag::hyperbolic:
            cfg["model"] = "spaceform";
            cfg["kappa0"] = format_double(kappa0_);
            break;
        case ModelTag::custom:
            if (source_.empty()) throw Error(ErrorKind::capability, "raw sampled charts have no config form");
            cfg["model"] = "custom";
            cfg["phi"] = source_;
            cfg["domain"] = domain_.to_string();
            break;
    }
    if (!analytic()) {
        if (sampled_n_ == 0) throw Error(ErrorKind::capability, "raw sampled charts have no config form");
        cfg["grid"] = std::to_string(sampled_n_);
        cfg["bounds"] = domain_.to_string();
    }
    return cfg;
}

/// Builds a chart from key/value settings:
///   model   = flat | poincare | hyperbolic | sphere | spaceform | custom
///   kappa0  = curvature for spaceform/hyperbolic/sphere (default -1 / +1)
///   phi     = expression in x, y (custom)
///   domain  = plane | rect:x0,x1,y0,y1 | disk:cx,cy,r (custom)
///   grid    = N, bounds = rect:...   optional: resample to an N x N grid chart
inline Chart chart_from_config(const std::map<std::string, std::string>& cfg) {
    auto get = [&](const std::string& key, const std::string& fallback) {
        auto it = cfg.find(key);
        return it == cfg.end() ? fallback : it->second;
    };
    auto number = [&](const std::string& key, double fallback) {
        auto it = cfg.find(key);
        if (it == cfg.end()) return fallback;
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument(key);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorKind::parse, "chart setting " + key + " is not a number: '" + it->second + "'");
        }
    };
    const std::string model = get("model", "flat");
    Chart chart = Chart::flat();
    if (model == "flat") chart = Chart::flat();
    else if (model == "poincare") chart = Chart::poincare();
    else if (model == "hyperbolic") chart = Chart::space_form(-std::abs(number("kappa0", -1.0)));
    else if (model == "sphere") chart = Chart::sphere(std::abs(number("kappa0", 1.0)));
    else if (model == "spaceform") chart = Chart::space_form(number("kappa0", 0.0));
    else if (model == "custom") {
        if (!cfg.count("phi")) throw Error(ErrorKind::parse, "custom chart needs a phi expression");
        chart = Chart::custom(get("phi", ""), Region::from_string(get("domain", "plane")));
    } else {
        throw Error(ErrorKind::parse, "unresolvable chart model '" + model + "'");
    }
    if (cfg.count("grid")) {
        const int n = static_cast<int>(number("grid", 0));
        Region bounds = Region::from_string(get("bounds", chart.domain().to_string()));
        if (bounds.kind != Region::Kind::rectangle)
            throw Error(ErrorKind::parse, "sampled chart bounds must be a rect");
        std::string src = chart.source_;
        chart = chart.resampled(bounds, n, n);
        chart.source_ = src;
        chart.sampled_n_ = n;
    }
    return chart;
}

/// Parses "model=poincare", "model=custom phi=x^2 domain=rect:-1,1,-1,1", or a bare model name.
inline std::map<std::string, std::string> parse_chart_spec(const std::string& spec) {
    std::map<std::string, std::string> cfg;
    std::istringstream in(spec);
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
            cfg["model"] = token;
            continue;
        }
        std::string key = token.substr(0, eq), value = token.substr(eq + 1);
        if (!value.empty() && value.front() == '"') {
            value.erase(0, 1);
            while (value.empty() || value.back() != '"') {
                std::string more;
                if (!(in >> more)) throw Error(ErrorKind::parse, "unterminated quote in chart spec");
                value += " " + more;
            }
            value.pop_back();
        }
        cfg[key] = value;
    }
    return cfg;
}

inline std::string chart_spec_string(const Chart& chart) {
    std::string out;
    for (const auto& [k, v] : chart.config()) {
        if (!out.empty()) out += ' ';
        out += k + '=' + (v.find(' ') != std::string::npos ? '"' + v + '"' : v);
    }
    return out;
}

/// kappa = -e^{-2 phi} (phi_xx + phi_yy).
inline double gauss_curvature(const Chart& chart, double x, double y) {
    chart.require_inside(x, y);
    if (chart.tag() == ModelTag::flat) return 0.0;
    const auto f = chart.factor(x, y);
    return -std::exp(-2.0 * f.phi) * f.lap_phi;
}

template <class S>
S gauss_curvature_of(const ConformalFactor<S>& f) {
    using std::exp;
    return -1.0 * exp(-2.0 * f.phi) * f.lap_phi;
}

struct CurvatureSummary {
    Region region;
    int nx = 0, ny = 0;
    std::vector<double> xs, ys;
    std::vector<double> kappa_field;  // ny * nx, NaN outside a disk region
    double c_inf = 0.0;
    double argmin_x = 0.0, argmin_y = 0.0;
};

/// Sampled infimum of kappa over `region` on an nx x ny grid spanning its bounding box.
inline CurvatureSummary curvature_infimum(const Chart& chart, const Region& region, int nx, int ny) {
    if (region.empty() || region.kind == Region::Kind::plane)
        throw Error(ErrorKind::domain, "curvature infimum needs a bounded nonempty region");
    if (nx < 2 || ny < 2) throw Error(ErrorKind::domain, "curvature infimum needs at least a 2x2 grid");
    CurvatureSummary s;
    s.region = region;
    s.nx = nx;
    s.ny = ny;
    double x0, x1, y0, y1;
    if (region.kind == Region::Kind::rectangle) {
        x0 = region.xmin, x1 = region.xmax, y0 = region.ymin, y1 = region.ymax;
    } else {
        x0 = region.cx - region.radius, x1 = region.cx + region.radius;
        y0 = region.cy - region.radius, y1 = region.cy + region.radius;
    }
    for (int i = 0; i < nx; ++i) s.xs.push_back(x0 + (x1 - x0) * i / (nx - 1));
    for (int j = 0; j < ny; ++j) s.ys.push_back(y0 + (y1 - y0) * j / (ny - 1));
    s.kappa_field.assign(static_cast<std::size_t>(nx) * ny, std::numeric_limits<double>::quiet_NaN());
    s.c_inf = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double x = s.xs[i], y = s.ys[j];
            if (!region.contains_closed(x, y)) continue;
            const double k = gauss_curvature(chart, x, y);
            s.kappa_field[static_cast<std::size_t>(j) * nx + i] = k;
            any = true;
            if (k < s.c_inf) {
                s.c_inf = k;
                s.argmin_x = x;
                s.argmin_y = y;
            }
        }
    if (!any) throw Error(ErrorKind::domain, "curvature infimum: region contains no sample points");
    return s;
}

inline CurvatureSummary curvature_infimum(const Chart& chart, const Region& region, int n) {
    return curvature_infimum(chart, region, n, n);
}

/// Boundary length and area of a geodesic ball of radius delta in the space form of curvature k.
struct BallGeometry {
    double boundary_length;
    double volume;
    double ratio() const { return boundary_length / volume; }
};

inline BallGeometry ball_geometry(double k, double delta) {
    if (!(delta > 0) || !std::isfinite(delta)) throw Error(ErrorKind::domain, "ball radius must be positive");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (k == 0.0) return {two_pi * delta, std::numbers::pi * delta * delta};
    if (k < 0) {
        const double s = std::sqrt(-k);
        // cosh(s d) - 1 = 2 sinh^2(s d / 2) avoids cancellation for small balls.
        const double sh = std::sinh(0.5 * s * delta);
        return {two_pi * std::sinh(s * delta) / s, two_pi * 2.0 * sh * sh / (-k)};
    }
    const double s = std::sqrt(k);
    if (!(delta < std::numbers::pi / s))
        throw Error(ErrorKind::domain, "spherical ball radius must be below pi / sqrt(kappa0)");
    const double sn = std::sin(0.5 * s * delta);
    return {two_pi * std::sin(s * delta) / s, two_pi * 2.0 * sn * sn / k};
}

/// Euclidean radius of the coordinate disk that realizes the geodesic ball of
/// radius delta about the origin of a space-form chart.
inline double coordinate_radius_of_ball(const Chart& chart, double delta) {
    if (!(delta > 0)) throw Error(ErrorKind::domain, "ball radius must be positive");
    if (!chart.constant_curvature())
        throw Error(ErrorKind::capability, "geodesic balls are only built in for constant-curvature charts");
    const double k = chart.kappa0();
    if (k == 0.0) return delta;
    if (k < 0) return std::tanh(0.5 * std::sqrt(-k) * delta) / std::sqrt(-k);
    if (!(delta < std::numbers::pi / std::sqrt(k)))
        throw Error(ErrorKind::domain, "spherical ball radius must be below pi / sqrt(kappa0)");
    return std::tan(0.5 * std::sqrt(k) * delta) / std::sqrt(k);
}

}  // namespace cmc
