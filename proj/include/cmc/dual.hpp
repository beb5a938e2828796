#pragma once

#include <array>
#include <cmath>

namespace cmc {

/// Forward-mode dual number with N independent directions.
template <int N>
struct Dual {
    double v = 0;
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT: implicit by design
    static Dual variable(double value, int slot) {
        Dual x(value);
        x.d[slot] = 1.0;
        return x;
    }

    friend Dual operator+(Dual a, const Dual& b) {
        a.v += b.v;
        for (int i = 0; i < N; ++i) a.d[i] += b.d[i];
        return a;
    }
    friend Dual operator-(Dual a, const Dual& b) {
        a.v -= b.v;
        for (int i = 0; i < N; ++i) a.d[i] -= b.d[i];
        return a;
    }
    friend Dual operator-(Dual a) {
        a.v = -a.v;
        for (auto& x : a.d) x = -x;
        return a;
    }
    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual r(a.v * b.v);
        for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
        return r;
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        const double inv = 1.0 / b.v;
        Dual r(a.v * inv);
        for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
        return r;
    }
    friend Dual sqrt(const Dual& a) {
        Dual r(std::sqrt(a.v));
        const double s = 0.5 / r.v;
        for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * s;
        return r;
    }
};

}  // namespace cmc
