// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

#include "sgfem/geometry.hpp"
#include "sgfem/jet.hpp"

namespace sgfem {

/// Lame constants from Young's modulus and Poisson ratio.
struct LameParams {
    double E = 1.0;
    double nu = 0.3;
    double lambda = 0.0;
    double mu = 0.0;
};

inline LameParams lame_from_poisson(double nu, double E = 1.0) {
    require(nu > 0.0 && nu < 0.5, "lame_from_poisson: nu must be in (0, 0.5)");
    LameParams p;
    p.E = E;
    p.nu = nu;
    p.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    p.mu = E / (2.0 * (1.0 + nu));
    return p;
}

/// Closed-form benchmark cases on the unit square.
///
/// 1: incompressible trigonometric displacement, div u = 0, homogeneous BCs.
/// 2: nearly incompressible smooth displacement with a closed-form pressure,
///    homogeneous BCs.
/// 3: crack-type corner singularity written in polar coordinates around
///    (0,0); zero volume load, inhomogeneous displacement trace and boundary
///    double traction.
/// 4: trigonometric solution of the unperturbed second-order system; the
///    load solves that limit problem and the perturbed solution develops a
///    boundary layer, so errors are measured against this field.
///
/// All derivative evaluations are exact via nested Taylor (jet) arithmetic;
/// nothing is expanded by hand.
struct ManufacturedCase {
    int id = 1;
    double E = 1.0, nu = 0.3, lambda = 0.0, mu = 0.0, iota = 1.0;
    bool homogeneous_bc = true;
    bool zero_mean_pressure = true;
    bool zero_load = false;     // volume load vanishes identically (case 3)
    bool singular_corner = false;
    Vec2 corner{0.0, 0.0};

    Vec2 u(const Vec2& x) const;
    Mat2 grad_u(const Vec2& x) const;
    void hess_u(const Vec2& x, Sym2& h1, Sym2& h2) const;
    double div_u(const Vec2& x) const;
    double p(const Vec2& x) const;
    Vec2 grad_p(const Vec2& x) const;
    /// Volume load of the fourth-order problem; case 4 uses the load of the
    /// unperturbed limit, which is independent of iota.
    Vec2 f(const Vec2& x) const;
    /// Double traction dn(C eps(u)) n at a boundary point with outward normal n.
    Vec2 boundary_traction(const Vec2& x, const Vec2& n) const;

    template <int Ord>
    void u_jets(double x0, double y0, Jet2<Ord>& u1, Jet2<Ord>& u2) const;
    template <int Ord>
    Jet2<Ord> p_jet(double x0, double y0) const;
};

inline ManufacturedCase make_case(int id, double nu, double iota, double E = 1.0) {
    require(id >= 1 && id <= 4, "make_case: id must be 1..4");
    require(iota > 0.0 && iota <= 1.0, "make_case: iota must be in (0, 1]");
    const LameParams lp = lame_from_poisson(nu, E);
    ManufacturedCase c;
    c.id = id;
    c.E = E;
    c.nu = nu;
    c.lambda = lp.lambda;
    c.mu = lp.mu;
    c.iota = iota;
    if (id == 3) {
        c.homogeneous_bc = false;
        c.zero_mean_pressure = false;
        c.zero_load = true;
        c.singular_corner = true;
    }
    return c;
}

template <int Ord>
void ManufacturedCase::u_jets(double x0, double y0, Jet2<Ord>& u1, Jet2<Ord>& u2) const {
    using J = Jet2<Ord>;
    const J x = J::variable_x(x0);
    const J y = J::variable_y(y0);
    const double pi = M_PI;
    switch (id) {
        case 1: {
            const J sx = sin(x * pi), sy = sin(y * pi);
            const J s2x = sin(x * (2 * pi)), s2y = sin(y * (2 * pi));
            const J sx2 = sx * sx, sy2 = sy * sy;
            u1 = -(sx2 * sx2) * sy2 * s2y;
            u2 = sx2 * s2x * (sy2 * sy2);
            break;
        }
        case 2: {
            const J sx = sin(x * pi), sy = sin(y * pi);
            const J s2x = sin(x * (2 * pi)), s2y = sin(y * (2 * pi));
            const J sx2 = sx * sx, sy2 = sy * sy;
            u1 = sx2 * sy2 * s2y * (-2.0);
            u2 = s2x * (sy2 * sy2) * ((2.0 * mu + lambda) / lambda);
            break;
        }
        case 3: {
            if (x0 * x0 + y0 * y0 == 0.0)
                throw std::domain_error("case 3: derivative evaluation at the singular corner");
            const double alpha = 1.5;
            const double omega = 3.0 * M_PI / 4.0;
            const double C1 = -std::cos((alpha + 1.0) * omega) / std::cos((alpha - 1.0) * omega);
            const double C2 = 2.0 * (lambda + 2.0 * mu) / (lambda + mu);
            const J r2 = x * x + y * y;
            const J ralpha = pow(r2, alpha / 2.0);
            const J th = atan2_first_quadrant(y, x);
            const J ur = (cos(th * (alpha + 1.0)) * (-(alpha + 1.0)) +
                          cos(th * (alpha - 1.0)) * ((C2 - (alpha + 1.0)) * C1)) *
                         ralpha * (0.5 / mu);
            const J ut = (sin(th * (alpha + 1.0)) * (alpha + 1.0) +
                          sin(th * (alpha - 1.0)) * ((C2 + alpha - 1.0) * C1)) *
                         ralpha * (0.5 / mu);
            const J ct = cos(th), st = sin(th);
            u1 = ur * ct - ut * st;
            u2 = ur * st + ut * ct;
            break;
        }
        case 4: {
            const J sx = sin(x * pi), sy = sin(y * pi);
            const J s2x = sin(x * (2 * pi)), s2y = sin(y * (2 * pi));
            u1 = -(sx * sx) * s2y;
            u2 = s2x * (sy * sy);
            break;
        }
        default:
            throw std::invalid_argument("ManufacturedCase: bad id");
    }
}

template <int Ord>
Jet2<Ord> ManufacturedCase::p_jet(double x0, double y0) const {
    using J = Jet2<Ord>;
    const J x = J::variable_x(x0);
    const J y = J::variable_y(y0);
    switch (id) {
        case 1:
        case 4:
            return J(0.0); // div u = 0
        case 2: {
            const double pi = M_PI;
            const J sy = sin(y * pi);
            return sin(x * (2 * pi)) * sy * sy * sin(y * (2 * pi)) * (4.0 * pi * mu);
        }
        case 3: {
            if (x0 * x0 + y0 * y0 == 0.0)
                throw std::domain_error("case 3: pressure derivative at the singular corner");
            const double alpha = 1.5;
            const double omega = 3.0 * M_PI / 4.0;
            const double C1 = -std::cos((alpha + 1.0) * omega) / std::cos((alpha - 1.0) * omega);
            const J r2 = x * x + y * y;
            const J th = atan2_first_quadrant(y, x);
            // lambda * div u with div u = 2 alpha C1/(lambda+mu) r^{alpha-1} cos((alpha-1) theta)
            return pow(r2, (alpha - 1.0) / 2.0) * cos(th * (alpha - 1.0)) *
                   (2.0 * alpha * C1 * lambda / (lambda + mu));
        }
        default:
            throw std::invalid_argument("ManufacturedCase: bad id");
    }
}

inline Vec2 ManufacturedCase::u(const Vec2& x) const {
    if (id == 3 && x.squared_norm() == 0.0) return {0.0, 0.0}; // r^alpha limit
    Jet2<2> u1, u2;
    u_jets<2>(x.x, x.y, u1, u2);
    return {u1.value(), u2.value()};
}

inline Mat2 ManufacturedCase::grad_u(const Vec2& x) const {
    Jet2<2> u1, u2;
    u_jets<2>(x.x, x.y, u1, u2);
    return {u1.derivative(1, 0), u1.derivative(0, 1), u2.derivative(1, 0), u2.derivative(0, 1)};
}

inline void ManufacturedCase::hess_u(const Vec2& x, Sym2& h1, Sym2& h2) const {
    Jet2<2> u1, u2;
    u_jets<2>(x.x, x.y, u1, u2);
    h1 = {u1.derivative(2, 0), u1.derivative(1, 1), u1.derivative(0, 2)};
    h2 = {u2.derivative(2, 0), u2.derivative(1, 1), u2.derivative(0, 2)};
}

inline double ManufacturedCase::div_u(const Vec2& x) const {
    const Mat2 g = grad_u(x);
    return g.trace();
}

inline double ManufacturedCase::p(const Vec2& x) const {
    if (id == 3 && x.squared_norm() == 0.0) return 0.0;
    return p_jet<1>(x.x, x.y).value();
}

inline Vec2 ManufacturedCase::grad_p(const Vec2& x) const {
    const auto pj = p_jet<1>(x.x, x.y);
    return {pj.derivative(1, 0), pj.derivative(0, 1)};
}

inline Vec2 ManufacturedCase::f(const Vec2& x) const {
    // f = iota^2 Delta(L u) - L u with L u = mu Delta u + (lambda+mu) grad div u.
    // Case 4 takes the load of the iota -> 0 limit problem: f = -L u.
    const double i2 = (id == 4) ? 0.0 : iota * iota;
    const double lam = lambda, m = mu;
    if (i2 == 0.0) {
        Jet2<2> u1, u2;
        u_jets<2>(x.x, x.y, u1, u2);
        const double L1 = (lam + 2 * m) * u1.derivative(2, 0) + m * u1.derivative(0, 2) +
                          (lam + m) * u2.derivative(1, 1);
        const double L2 = m * u2.derivative(2, 0) + (lam + 2 * m) * u2.derivative(0, 2) +
                          (lam + m) * u1.derivative(1, 1);
        return {-L1, -L2};
    }
    Jet2<4> u1, u2;
    u_jets<4>(x.x, x.y, u1, u2);
    const double L1 = (lam + 2 * m) * u1.derivative(2, 0) + m * u1.derivative(0, 2) +
                      (lam + m) * u2.derivative(1, 1);
    const double L2 = m * u2.derivative(2, 0) + (lam + 2 * m) * u2.derivative(0, 2) +
                      (lam + m) * u1.derivative(1, 1);
    const double dL1 = (lam + 2 * m) * (u1.derivative(4, 0) + u1.derivative(2, 2)) +
                       m * (u1.derivative(2, 2) + u1.derivative(0, 4)) +
                       (lam + m) * (u2.derivative(3, 1) + u2.derivative(1, 3));
    const double dL2 = m * (u2.derivative(4, 0) + u2.derivative(2, 2)) +
                       (lam + 2 * m) * (u2.derivative(2, 2) + u2.derivative(0, 4)) +
                       (lam + m) * (u1.derivative(3, 1) + u1.derivative(1, 3));
    return {i2 * dL1 - L1, i2 * dL2 - L2};
}

inline Vec2 ManufacturedCase::boundary_traction(const Vec2& x, const Vec2& n) const {
    Jet2<2> u1, u2;
    u_jets<2>(x.x, x.y, u1, u2);
    // sigma_ij = mu (u_{i,j} + u_{j,i}) + lambda delta_ij div u
    // (g_N)_i = n_k n_j d_k sigma_ij, from second derivatives of u.
    const double H1[2][2][2] = {{{u1.derivative(2, 0), u1.derivative(1, 1)},
                                 {u1.derivative(1, 1), u1.derivative(0, 2)}},
                                {{u2.derivative(2, 0), u2.derivative(1, 1)},
                                 {u2.derivative(1, 1), u2.derivative(0, 2)}}};
    const double nn[2] = {n.x, n.y};
    double g[2] = {0.0, 0.0};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                double dsig = mu * (H1[i][j][k] + H1[j][i][k]);
                if (i == j) dsig += lambda * (H1[0][0][k] + H1[1][1][k]);
                g[i] += nn[k] * nn[j] * dsig;
            }
        }
    }
    return {g[0], g[1]};
}

} // namespace sgfem
