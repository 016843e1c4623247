// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "sgfem/geometry.hpp"

namespace sgfem {

/// Quadrature point on the reference triangle, in barycentric coordinates.
struct TriQuadPoint {
    double l1, l2, l3;
    double w; // reference weight; weights of a rule sum to 1/2
};

/// Quadrature point on the unit interval [0,1].
struct EdgeQuadPoint {
    double t;
    double w; // weights sum to 1
};

struct TriangleRule {
    int degree = 0;
    std::vector<TriQuadPoint> points;
};

struct EdgeRule {
    int degree = 0;
    std::vector<EdgeQuadPoint> points;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [0,1], exact for polynomials of degree 2m-1.
inline void gauss_legendre_unit(int m, std::vector<double>& t, std::vector<double>& w) {
    t.resize(m);
    w.resize(m);
    for (int i = 0; i < m; ++i) {
        // Chebyshev initial guess on [-1,1], then Newton on P_m.
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        t[i] = 0.5 * (1.0 + x);
        w[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

} // namespace detail

constexpr int kMaxQuadDegree = 14;

/// Rule exact for all bivariate polynomials of total degree <= degree on the
/// reference triangle. Conical product of two Gauss-Legendre rules on the
/// collapsed square x = xi (1 - eta), y = eta with the Jacobian (1 - eta)
/// folded into the weights; all weights positive.
inline TriangleRule triangle_rule(int degree) {
    require(degree >= 1 && degree <= kMaxQuadDegree, "triangle_rule: degree must be in [1,14]");
    const int mx = (degree + 2) / 2;     // 2*mx-1 >= degree
    const int my = (degree + 3) / 2;     // 2*my-1 >= degree+1, covers the (1-eta) factor
    std::vector<double> tx, wx, ty, wy;
    detail::gauss_legendre_unit(mx, tx, wx);
    detail::gauss_legendre_unit(my, ty, wy);

    TriangleRule rule;
    rule.degree = degree;
    rule.points.reserve(static_cast<std::size_t>(mx) * my);
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            const double x = tx[i] * (1.0 - ty[j]);
            const double y = ty[j];
            rule.points.push_back({1.0 - x - y, x, y, wx[i] * wy[j] * (1.0 - ty[j])});
        }
    }
    return rule;
}

/// Gauss-Legendre rule on [0,1], exact for degree <= degree.
inline EdgeRule edge_rule(int degree) {
    require(degree >= 1 && degree <= kMaxQuadDegree, "edge_rule: degree must be in [1,14]");
    const int m = (degree + 2) / 2;
    std::vector<double> t, w;
    detail::gauss_legendre_unit(m, t, w);
    EdgeRule rule;
    rule.degree = degree;
    rule.points.reserve(m);
    for (int i = 0; i < m; ++i) rule.points.push_back({t[i], w[i]});
    return rule;
}

/// Composite rule on a triangle, geometrically refined toward a designated
/// vertex. Each level splits off the shell away from the corner at scale 1/2
/// and applies the base rule on it; the innermost corner triangle keeps the
/// base rule. Points are reported in barycentric coordinates of the original
/// triangle with weights summing to 1/2. corner is the local slot 0..2.
inline TriangleRule corner_refined_rule(const TriangleRule& base, int levels, int corner = 0) {
    require(levels >= 0, "corner_refined_rule: levels must be >= 0");
    require(corner >= 0 && corner < 3, "corner_refined_rule: corner slot must be 0..2");

    using Bary = std::array<double, 3>;
    Bary v1{}, v2{}, v3{};
    v1[corner] = 1.0;
    v2[(corner + 1) % 3] = 1.0;
    v3[(corner + 2) % 3] = 1.0;

    TriangleRule rule;
    rule.degree = base.degree;

    auto emit = [&](const Bary& a, const Bary& b, const Bary& c) {
        // Area of sub-triangle relative to the original, via the (l2,l3) plane.
        const double r = (b[1] - a[1]) * (c[2] - a[2]) - (b[2] - a[2]) * (c[1] - a[1]);
        const double ar = std::abs(r);
        for (const auto& q : base.points) {
            Bary l;
            for (int k = 0; k < 3; ++k) l[k] = q.l1 * a[k] + q.l2 * b[k] + q.l3 * c[k];
            rule.points.push_back({l[0], l[1], l[2], q.w * ar});
        }
    };

    auto mid = [](const Bary& a, const Bary& b) {
        return Bary{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
    };

    for (int lev = 0; lev < levels; ++lev) {
        const Bary m12 = mid(v1, v2);
        const Bary m13 = mid(v1, v3);
        emit(m12, v2, v3);
        emit(m12, v3, m13);
        v2 = m12;
        v3 = m13;
    }
    emit(v1, v2, v3);
    return rule;
}

/// Integrate a callable f(Vec2) over the physical triangle (a,b,c).
template <typename F>
inline double integrate_triangle(const TriangleRule& rule, const Vec2& a, const Vec2& b, const Vec2& c, F&& f) {
    const double two_area = std::abs((b - a).cross(c - a));
    double s = 0.0;
    for (const auto& q : rule.points) {
        const Vec2 x = a * q.l1 + b * q.l2 + c * q.l3;
        s += q.w * f(x);
    }
    return s * two_area;
}

/// Integrate a callable f(Vec2) over the physical segment [a,b].
template <typename F>
inline double integrate_edge(const EdgeRule& rule, const Vec2& a, const Vec2& b, F&& f) {
    const double len = (b - a).norm();
    double s = 0.0;
    for (const auto& q : rule.points) {
        const Vec2 x = a * (1.0 - q.t) + b * q.t;
        s += q.w * f(x);
    }
    return s * len;
}

} // namespace sgfem
