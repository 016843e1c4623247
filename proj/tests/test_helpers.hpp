// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "sgfem/bary_poly.hpp"
#include "sgfem/element.hpp"
#include "sgfem/geometry.hpp"

namespace sgfem::testing {

/// Scalar field defined by lambdas, for dof_functionals and interpolation.
struct FnField {
    std::function<double(Vec2)> val;
    std::function<Vec2(Vec2)> grad;
    double value(const Vec2& x) const { return val(x); }
    Vec2 gradient(const Vec2& x) const { return grad(x); }
};

/// Scalar field given by a barycentric polynomial on a fixed triangle.
struct PolyField {
    const TriangleGeometry* geom;
    BaryPoly p;
    std::array<BaryPoly, 3> dp;

    PolyField(const TriangleGeometry& g, const BaryPoly& poly) : geom(&g), p(poly) {
        for (int i = 0; i < 3; ++i) dp[i] = p.dlam(i);
    }
    double value(const Vec2& x) const {
        const auto l = geom->barycentric(x);
        return p.eval(l[0], l[1], l[2]);
    }
    Vec2 gradient(const Vec2& x) const {
        const auto l = geom->barycentric(x);
        Vec2 g{0, 0};
        for (int i = 0; i < 3; ++i) g += geom->grad_lambda[i] * dp[i].eval(l[0], l[1], l[2]);
        return g;
    }
};

/// Seeded random triangle with shape quality h_K/rho_K below the given cap.
inline TriangleGeometry random_triangle(std::mt19937_64& gen, double quality_cap = 10.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        Vec2 a{u(gen), u(gen)}, b{u(gen), u(gen)}, c{u(gen), u(gen)};
        double area = signed_area(a, b, c);
        if (area < 0.0) {
            std::swap(b, c);
            area = -area;
        }
        if (area < 1e-3) continue;
        const double per = (b - a).norm() + (c - b).norm() + (a - c).norm();
        const double hk = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
        const double rk = 2.0 * area / per;
        if (hk / rk > quality_cap) continue;
        return make_geometry(a, b, c);
    }
}

/// Central difference gradient with Richardson extrapolation.
template <typename F>
inline Vec2 fd_gradient(const F& f, const Vec2& x, double h = 1e-3) {
    auto d = [&](double hh) {
        return Vec2{(f(Vec2{x.x + hh, x.y}) - f(Vec2{x.x - hh, x.y})) / (2 * hh),
                    (f(Vec2{x.x, x.y + hh}) - f(Vec2{x.x, x.y - hh})) / (2 * hh)};
    };
    const Vec2 g1 = d(h), g2 = d(h / 2);
    return (g2 * 4.0 - g1) / 3.0;
}

} // namespace sgfem::testing
