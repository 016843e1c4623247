// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace sgfem {

/// Bivariate truncated Taylor expansion of order N at a point: forward-mode
/// differentiation that carries all partial derivatives up to order N exactly
/// (up to rounding). Coefficient c(i,j) stores d^{i+j} f / dx^i dy^j / (i! j!).
template <int N>
class Jet2 {
public:
    static constexpr int kCount = (N + 1) * (N + 2) / 2;

    Jet2() { c_.fill(0.0); }
    explicit Jet2(double v) {
        c_.fill(0.0);
        c_[0] = v;
    }

    static constexpr int idx(int i, int j) {
        const int d = i + j;
        return d * (d + 1) / 2 + j;
    }

    static Jet2 variable_x(double x0) {
        Jet2 r(x0);
        r.c_[idx(1, 0)] = 1.0;
        return r;
    }
    static Jet2 variable_y(double y0) {
        Jet2 r(y0);
        r.c_[idx(0, 1)] = 1.0;
        return r;
    }

    double coeff(int i, int j) const { return c_[idx(i, j)]; }
    double& coeff(int i, int j) { return c_[idx(i, j)]; }
    double value() const { return c_[0]; }

    /// Partial derivative d^{i+j} / dx^i dy^j at the expansion point.
    double derivative(int i, int j) const {
        double f = 1.0;
        for (int k = 2; k <= i; ++k) f *= k;
        for (int k = 2; k <= j; ++k) f *= k;
        return c_[idx(i, j)] * f;
    }

    Jet2 operator+(const Jet2& o) const {
        Jet2 r;
        for (int k = 0; k < kCount; ++k) r.c_[k] = c_[k] + o.c_[k];
        return r;
    }
    Jet2 operator-(const Jet2& o) const {
        Jet2 r;
        for (int k = 0; k < kCount; ++k) r.c_[k] = c_[k] - o.c_[k];
        return r;
    }
    Jet2 operator-() const {
        Jet2 r;
        for (int k = 0; k < kCount; ++k) r.c_[k] = -c_[k];
        return r;
    }
    Jet2 operator+(double s) const {
        Jet2 r = *this;
        r.c_[0] += s;
        return r;
    }
    Jet2 operator-(double s) const {
        Jet2 r = *this;
        r.c_[0] -= s;
        return r;
    }
    Jet2 operator*(double s) const {
        Jet2 r;
        for (int k = 0; k < kCount; ++k) r.c_[k] = c_[k] * s;
        return r;
    }
    Jet2& operator+=(const Jet2& o) {
        for (int k = 0; k < kCount; ++k) c_[k] += o.c_[k];
        return *this;
    }

    Jet2 operator*(const Jet2& o) const {
        Jet2 r;
        for (int d1 = 0; d1 <= N; ++d1) {
            for (int j1 = 0; j1 <= d1; ++j1) {
                const double a = c_[d1 * (d1 + 1) / 2 + j1];
                if (a == 0.0) continue;
                const int i1 = d1 - j1;
                for (int d2 = 0; d2 + d1 <= N; ++d2) {
                    for (int j2 = 0; j2 <= d2; ++j2) {
                        const double b = o.c_[d2 * (d2 + 1) / 2 + j2];
                        if (b == 0.0) continue;
                        r.c_[idx(i1 + d2 - j2, j1 + j2)] += a * b;
                    }
                }
            }
        }
        return r;
    }

    /// Composition f(g) from the derivatives f^(k)(g0), k = 0..N.
    static Jet2 compose(const Jet2& g, const std::array<double, N + 1>& derivs) {
        Jet2 delta = g;
        delta.c_[0] = 0.0;
        Jet2 r(derivs[0]);
        Jet2 pow = delta;
        double fact = 1.0;
        for (int k = 1; k <= N; ++k) {
            fact *= k;
            r += pow * (derivs[k] / fact);
            if (k < N) pow = pow * delta;
        }
        return r;
    }

private:
    std::array<double, kCount> c_;
};

template <int N>
inline Jet2<N> operator*(double s, const Jet2<N>& j) {
    return j * s;
}
template <int N>
inline Jet2<N> operator+(double s, const Jet2<N>& j) {
    return j + s;
}
template <int N>
inline Jet2<N> operator-(double s, const Jet2<N>& j) {
    return (-j) + s;
}

template <int N>
inline Jet2<N> sin(const Jet2<N>& g) {
    std::array<double, N + 1> d;
    const double s = std::sin(g.value()), c = std::cos(g.value());
    const double cycle[4] = {s, c, -s, -c};
    for (int k = 0; k <= N; ++k) d[k] = cycle[k % 4];
    return Jet2<N>::compose(g, d);
}

template <int N>
inline Jet2<N> cos(const Jet2<N>& g) {
    std::array<double, N + 1> d;
    const double s = std::sin(g.value()), c = std::cos(g.value());
    const double cycle[4] = {c, -s, -c, s};
    for (int k = 0; k <= N; ++k) d[k] = cycle[k % 4];
    return Jet2<N>::compose(g, d);
}

template <int N>
inline Jet2<N> exp(const Jet2<N>& g) {
    std::array<double, N + 1> d;
    d.fill(std::exp(g.value()));
    return Jet2<N>::compose(g, d);
}

template <int N>
inline Jet2<N> log(const Jet2<N>& g) {
    if (g.value() <= 0.0) throw std::domain_error("Jet2 log: nonpositive argument");
    std::array<double, N + 1> d;
    d[0] = std::log(g.value());
    double t = 1.0 / g.value();
    for (int k = 1; k <= N; ++k) {
        double fk = t;
        for (int m = 1; m < k; ++m) fk *= -m / g.value();
        d[k] = fk;
    }
    return Jet2<N>::compose(g, d);
}

/// Real power g^p for g > 0.
template <int N>
inline Jet2<N> pow(const Jet2<N>& g, double p) {
    if (g.value() <= 0.0) throw std::domain_error("Jet2 pow: nonpositive base");
    std::array<double, N + 1> d;
    double coef = 1.0;
    for (int k = 0; k <= N; ++k) {
        d[k] = coef * std::pow(g.value(), p - k);
        coef *= (p - k);
    }
    return Jet2<N>::compose(g, d);
}

template <int N>
inline Jet2<N> sqrt(const Jet2<N>& g) {
    return pow(g, 0.5);
}

template <int N>
inline Jet2<N> reciprocal(const Jet2<N>& g) {
    return pow(g, -1.0);
}

template <int N>
inline Jet2<N> operator/(const Jet2<N>& a, const Jet2<N>& b) {
    return a * reciprocal(b);
}

template <int N>
inline Jet2<N> atan(const Jet2<N>& g) {
    // Taylor coefficients a_k of atan(t0 + t) from (1 + (t0+t)^2) u'(t) = 1.
    const double t0 = g.value();
    const double v0 = 1.0 + t0 * t0, v1 = 2.0 * t0, v2 = 1.0;
    std::array<double, N + 1> a{};
    a[0] = std::atan(t0);
    std::array<double, N + 1> ap{}; // ap[k] = (k+1) a_{k+1}
    for (int k = 0; k <= N - 1; ++k) {
        double rhs = (k == 0) ? 1.0 : 0.0;
        if (k >= 1) rhs -= v1 * ap[k - 1];
        if (k >= 2) rhs -= v2 * ap[k - 2];
        ap[k] = rhs / v0;
        a[k + 1] = ap[k] / (k + 1);
    }
    std::array<double, N + 1> d;
    double fact = 1.0;
    d[0] = a[0];
    for (int k = 1; k <= N; ++k) {
        fact *= k;
        d[k] = a[k] * fact;
    }
    return Jet2<N>::compose(g, d);
}

/// atan2(y, x) on the closed first quadrant minus the origin.
template <int N>
inline Jet2<N> atan2_first_quadrant(const Jet2<N>& y, const Jet2<N>& x) {
    if (x.value() >= y.value()) {
        if (x.value() <= 0.0) throw std::domain_error("Jet2 atan2: origin not allowed");
        return atan(y / x);
    }
    return Jet2<N>(M_PI / 2.0) - atan(x / y);
}

} // namespace sgfem
