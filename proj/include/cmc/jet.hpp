#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace cmc {

/// Truncated bivariate Taylor polynomial in (du, dv).
///
/// A Jet<N> carries the coefficients c(i,j) of du^i dv^j for i + j <= N, so
/// evaluating an analytic map on jets seeded as `u0 + du`, `v0 + dv` yields
/// every partial derivative up to order N at (u0, v0), exact to roundoff.
///
/// Differentiation drops one order of validity: after `du()` the order-N
/// coefficients are zero rather than correct. Products of jets are correct
/// up to the smallest valid order of their factors, so callers only need to
/// track how many derivatives they have taken.
template <int N>
class Jet {
public:
    static constexpr int order = N;
    static constexpr std::size_t size = static_cast<std::size_t>((N + 1) * (N + 2) / 2);

    constexpr Jet() = default;
    constexpr Jet(double value) { c_[0] = value; }  // NOLINT(google-explicit-constructor)

    static constexpr Jet variable_u(double u0) {
        Jet j(u0);
        if constexpr (N >= 1) j.at(1, 0) = 1.0;
        return j;
    }
    static constexpr Jet variable_v(double v0) {
        Jet j(v0);
        if constexpr (N >= 1) j.at(0, 1) = 1.0;
        return j;
    }

    // Coefficients are stored by total degree: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
    static constexpr std::size_t index(int i, int j) {
        const int d = i + j;
        return static_cast<std::size_t>(d * (d + 1) / 2 + j);
    }

    constexpr double& at(int i, int j) { return c_[index(i, j)]; }
    constexpr double at(int i, int j) const { return c_[index(i, j)]; }

    constexpr double value() const { return c_[0]; }

    /// Partial derivative d^{i+j} / du^i dv^j at the expansion point.
    constexpr double partial(int i, int j) const {
        return at(i, j) * factorial(i) * factorial(j);
    }

    constexpr Jet du() const {
        Jet r;
        for (int d = 0; d < N; ++d)
            for (int j = 0; j <= d; ++j) {
                const int i = d - j;
                r.at(i, j) = (i + 1) * at(i + 1, j);
            }
        return r;
    }
    constexpr Jet dv() const {
        Jet r;
        for (int d = 0; d < N; ++d)
            for (int j = 0; j <= d; ++j) {
                const int i = d - j;
                r.at(i, j) = (j + 1) * at(i, j + 1);
            }
        return r;
    }

    constexpr Jet operator-() const {
        Jet r;
        for (std::size_t k = 0; k < size; ++k) r.c_[k] = -c_[k];
        return r;
    }
    constexpr Jet& operator+=(const Jet& o) {
        for (std::size_t k = 0; k < size; ++k) c_[k] += o.c_[k];
        return *this;
    }
    constexpr Jet& operator-=(const Jet& o) {
        for (std::size_t k = 0; k < size; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    constexpr Jet& operator*=(double s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    constexpr Jet& operator/=(double s) {
        for (auto& x : c_) x /= s;
        return *this;
    }
    constexpr Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }
    constexpr Jet& operator-=(double s) {
        c_[0] -= s;
        return *this;
    }

    friend constexpr Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int ia = 0; ia <= N; ++ia)
            for (int ja = 0; ia + ja <= N; ++ja) {
                const double ca = a.at(ia, ja);
                if (ca == 0.0) continue;
                for (int ib = 0; ia + ja + ib <= N; ++ib)
                    for (int jb = 0; ia + ja + ib + jb <= N; ++jb)
                        r.at(ia + ib, ja + jb) += ca * b.at(ib, jb);
            }
        return r;
    }

    friend constexpr Jet reciprocal(const Jet& b) {
        Jet r;
        const double b0 = b.c_[0];
        r.c_[0] = 1.0 / b0;
        for (int d = 1; d <= N; ++d)
            for (int j = 0; j <= d; ++j) {
                const int i = d - j;
                double acc = 0.0;
                for (int k = 0; k <= i; ++k)
                    for (int l = 0; l <= j; ++l) {
                        if (k == 0 && l == 0) continue;
                        acc += b.at(k, l) * r.at(i - k, j - l);
                    }
                r.at(i, j) = -acc / b0;
            }
        return r;
    }

    friend constexpr Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

    friend constexpr Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend constexpr Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend constexpr Jet operator+(Jet a, double s) { return a += s; }
    friend constexpr Jet operator+(double s, Jet a) { return a += s; }
    friend constexpr Jet operator-(Jet a, double s) { return a -= s; }
    friend constexpr Jet operator-(double s, const Jet& a) { return -a + s; }
    friend constexpr Jet operator*(Jet a, double s) { return a *= s; }
    friend constexpr Jet operator*(double s, Jet a) { return a *= s; }
    friend constexpr Jet operator/(Jet a, double s) { return a /= s; }
    friend constexpr Jet operator/(double s, const Jet& a) { return s * reciprocal(a); }

    /// f(a0 + d) = sum_k f^(k)(a0) / k! d^k with d nilpotent of order N + 1.
    /// `derivs[k]` holds f^(k)(a0).
    friend constexpr Jet compose(const Jet& a, const std::array<double, N + 1>& derivs) {
        Jet d = a;
        d.c_[0] = 0.0;
        Jet r(derivs[0]);
        Jet power(1.0);
        double inv_fact = 1.0;
        for (int k = 1; k <= N; ++k) {
            power = power * d;
            inv_fact /= k;
            r += power * (derivs[static_cast<std::size_t>(k)] * inv_fact);
        }
        return r;
    }

    friend Jet exp(const Jet& a) {
        std::array<double, N + 1> f{};
        f.fill(std::exp(a.value()));
        return compose(a, f);
    }
    friend Jet log(const Jet& a) {
        std::array<double, N + 1> f{};
        const double x = a.value();
        f[0] = std::log(x);
        double fact = 1.0;  // (k-1)!
        for (int k = 1; k <= N; ++k) {
            if (k > 1) fact *= (k - 1);
            f[static_cast<std::size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) * fact / std::pow(x, k);
        }
        return compose(a, f);
    }
    friend Jet pow(const Jet& a, double alpha) {
        std::array<double, N + 1> f{};
        const double x = a.value();
        double falling = 1.0;
        for (int k = 0; k <= N; ++k) {
            f[static_cast<std::size_t>(k)] = falling * std::pow(x, alpha - k);
            falling *= (alpha - k);
        }
        return compose(a, f);
    }
    friend Jet sqrt(const Jet& a) { return pow(a, 0.5); }
    friend Jet sin(const Jet& a) {
        std::array<double, N + 1> f{};
        const double s = std::sin(a.value()), c = std::cos(a.value());
        const double cycle[4] = {s, c, -s, -c};
        for (int k = 0; k <= N; ++k) f[static_cast<std::size_t>(k)] = cycle[k % 4];
        return compose(a, f);
    }
    friend Jet cos(const Jet& a) {
        std::array<double, N + 1> f{};
        const double s = std::sin(a.value()), c = std::cos(a.value());
        const double cycle[4] = {c, -s, -c, s};
        for (int k = 0; k <= N; ++k) f[static_cast<std::size_t>(k)] = cycle[k % 4];
        return compose(a, f);
    }
    friend Jet sinh(const Jet& a) {
        std::array<double, N + 1> f{};
        const double s = std::sinh(a.value()), c = std::cosh(a.value());
        for (int k = 0; k <= N; ++k) f[static_cast<std::size_t>(k)] = (k % 2 == 0) ? s : c;
        return compose(a, f);
    }
    friend Jet cosh(const Jet& a) {
        std::array<double, N + 1> f{};
        const double s = std::sinh(a.value()), c = std::cosh(a.value());
        for (int k = 0; k <= N; ++k) f[static_cast<std::size_t>(k)] = (k % 2 == 0) ? c : s;
        return compose(a, f);
    }
    friend Jet tan(const Jet& a) { return sin(a) / cos(a); }
    friend Jet tanh(const Jet& a) { return sinh(a) / cosh(a); }

    // Inverse functions by Newton iteration on the jet: each step doubles the
    // number of correct Taylor orders, so N + 1 steps always suffice.
    friend Jet asin(const Jet& a) {
        Jet y(std::asin(a.value()));
        for (int it = 0; it <= N; ++it) y -= (sin(y) - a) / cos(y);
        return y;
    }
    friend Jet atan(const Jet& a) {
        Jet y(std::atan(a.value()));
        for (int it = 0; it <= N; ++it) {
            const Jet c = cos(y);
            y -= (sin(y) - a * c) * c;  // d/dy (tan y - a) = 1/cos^2 y
        }
        return y;
    }
    friend Jet atanh(const Jet& a) {
        Jet y(std::atanh(a.value()));
        for (int it = 0; it <= N; ++it) {
            const Jet c = cosh(y);
            y -= (sinh(y) - a * c) * c;
        }
        return y;
    }

    /// Coefficient-wise (bitwise for finite values).
    friend constexpr bool operator==(const Jet&, const Jet&) = default;

private:
    static constexpr double factorial(int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    }

    std::array<double, size> c_{};
};

/// Scalar value of a double or a jet.
inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& x) {
    return x.value();
}

}  // namespace cmc
