// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "sgfem/bary_poly.hpp"
#include "sgfem/geometry.hpp"
#include "sgfem/quadrature.hpp"

namespace sgfem {

/// Per-triangle geometry: barycentric gradients, edge data, outward normals.
/// Edge i is opposite vertex i and joins vertices i+1, i+2 (mod 3).
struct TriangleGeometry {
    std::array<Vec2, 3> v;
    double area = 0.0;
    std::array<Vec2, 3> grad_lambda;
    std::array<double, 3> glen;     // |grad lambda_i|
    std::array<double, 3> edge_len;
    std::array<Vec2, 3> edge_mid;
    std::array<Vec2, 3> edge_normal; // outward unit normal on edge i

    Vec2 point(double l1, double l2, double l3) const {
        return v[0] * l1 + v[1] * l2 + v[2] * l3;
    }
    std::array<double, 3> barycentric(const Vec2& x) const {
        const double l2 = signed_area(v[0], x, v[2]) / area;
        const double l3 = signed_area(v[0], v[1], x) / area;
        return {1.0 - l2 - l3, l2, l3};
    }
    Vec2 edge_point(int i, double t) const {
        return v[(i + 1) % 3] * (1.0 - t) + v[(i + 2) % 3] * t;
    }
};

inline TriangleGeometry make_geometry(const Vec2& a, const Vec2& b, const Vec2& c) {
    TriangleGeometry g;
    g.v = {a, b, c};
    g.area = signed_area(a, b, c);
    require(g.area > 0.0, "make_geometry: triangle must be nondegenerate and counterclockwise");
    for (int i = 0; i < 3; ++i) {
        const Vec2 d = g.v[(i + 2) % 3] - g.v[(i + 1) % 3];
        g.grad_lambda[i] = Vec2{-d.y, d.x} / (2.0 * g.area);
        g.glen[i] = g.grad_lambda[i].norm();
        g.edge_len[i] = d.norm();
        g.edge_mid[i] = (g.v[(i + 1) % 3] + g.v[(i + 2) % 3]) * 0.5;
        g.edge_normal[i] = (g.grad_lambda[i] * (-1.0 / g.glen[i]));
    }
    return g;
}

namespace detail {

/// Geometry-independent generator polynomials for the 10-DoF velocity
/// triangle. Every shape function is a geometry-dependent linear combination
/// of these. Order:
///   0..2  Q_i  = lambda_i (2 lambda_i - 1)
///   3..5  M_i  = 4 lambda_j lambda_k
///   6..8  B_i  = b_K (2 lambda_i - 1)
///   9..11 R_i  = 12 b_K (1 - 4 lambda_i)
///   12    Phi0 = 140 b_K (5 (l1 l2 + l2 l3 + l3 l1) - 1)
constexpr int kGenCount = 13;

inline const std::array<BaryPoly, kGenCount>& generators() {
    static const auto gens = [] {
        std::array<BaryPoly, kGenCount> g;
        const BaryPoly l1 = BaryPoly::lambda(0), l2 = BaryPoly::lambda(1), l3 = BaryPoly::lambda(2);
        const BaryPoly one = BaryPoly::constant(1.0);
        const BaryPoly bK = l1 * l2 * l3;
        const BaryPoly sumll = l1 * l2 + l2 * l3 + l3 * l1;
        const std::array<BaryPoly, 3> lam = {l1, l2, l3};
        for (int i = 0; i < 3; ++i) {
            const BaryPoly& li = lam[i];
            const BaryPoly& lj = lam[(i + 1) % 3];
            const BaryPoly& lk = lam[(i + 2) % 3];
            g[i] = li * (li * 2.0 - one);
            g[3 + i] = lj * lk * 4.0;
            g[6 + i] = bK * (li * 2.0 - one);
            g[9 + i] = (bK * (one - li * 4.0)) * 12.0;
        }
        g[12] = (bK * (sumll * 5.0 - one)) * 140.0;
        return g;
    }();
    return gens;
}

} // namespace detail

/// The 10 shape functions of the velocity triangle on a physical element,
/// ordered [phi_1..3 (vertex values), phi^b_1..3 (midpoint values),
/// psi_1..3 (edge normal-derivative averages), phi_0 (cell average)].
///
/// The moment and mean degrees of freedom are normalized as averages: the
/// functionals are f(a_i), f(b_i), avg_{e_i} dn f, avg_K f. Construction
/// checks biorthogonality of functionals and shape functions numerically and
/// fails hard when the deviation from the identity exceeds 1e-10.
struct LocalBasis {
    TriangleGeometry geom;
    std::array<std::array<double, detail::kGenCount>, 10> coef{};

    BaryPoly poly(int i) const {
        BaryPoly p;
        const auto& gens = detail::generators();
        for (int g = 0; g < detail::kGenCount; ++g)
            if (coef[i][g] != 0.0) p += gens[g] * coef[i][g];
        return p;
    }

    /// Values, physical gradients and Hessians of all 10 shape functions.
    void eval_all(double l1, double l2, double l3,
                  std::array<double, 10>& val,
                  std::array<Vec2, 10>& grad,
                  std::array<Sym2, 10>& hess) const;
};

namespace detail {

/// Values and barycentric derivatives of the generators at fixed points.
struct GeneratorTable {
    int npts = 0;
    std::vector<double> val; // npts x 13
    std::vector<double> d1;  // npts x 13 x 3
    std::vector<double> d2;  // npts x 13 x 6, order (11,22,33,12,13,23)

    static GeneratorTable build(const std::vector<std::array<double, 3>>& pts) {
        const auto& gens = generators();
        std::array<std::array<BaryPoly, 3>, kGenCount> gd1;
        std::array<std::array<BaryPoly, 6>, kGenCount> gd2;
        for (int g = 0; g < kGenCount; ++g) {
            for (int i = 0; i < 3; ++i) gd1[g][i] = gens[g].dlam(i);
            int q = 0;
            for (int i = 0; i < 3; ++i) gd2[g][q++] = gd1[g][i].dlam(i);
            gd2[g][3] = gd1[g][0].dlam(1);
            gd2[g][4] = gd1[g][0].dlam(2);
            gd2[g][5] = gd1[g][1].dlam(2);
        }
        GeneratorTable t;
        t.npts = static_cast<int>(pts.size());
        t.val.resize(t.npts * kGenCount);
        t.d1.resize(t.npts * kGenCount * 3);
        t.d2.resize(t.npts * kGenCount * 6);
        for (int p = 0; p < t.npts; ++p) {
            const auto& l = pts[p];
            for (int g = 0; g < kGenCount; ++g) {
                t.val[p * kGenCount + g] = gens[g].eval(l[0], l[1], l[2]);
                for (int i = 0; i < 3; ++i)
                    t.d1[(p * kGenCount + g) * 3 + i] = gd1[g][i].eval(l[0], l[1], l[2]);
                for (int i = 0; i < 6; ++i)
                    t.d2[(p * kGenCount + g) * 6 + i] = gd2[g][i].eval(l[0], l[1], l[2]);
            }
        }
        return t;
    }

    static GeneratorTable build(const TriangleRule& rule) {
        std::vector<std::array<double, 3>> pts;
        pts.reserve(rule.points.size());
        for (const auto& q : rule.points) pts.push_back({q.l1, q.l2, q.l3});
        return build(pts);
    }
};

/// Combine generator data with the coefficient matrix of a basis at table
/// point p. Any output pointer may be null.
inline void eval_basis_at(const LocalBasis& basis, const GeneratorTable& table, int p,
                          std::array<double, 10>* val,
                          std::array<Vec2, 10>* grad,
                          std::array<Sym2, 10>* hess) {
    const auto& gl = basis.geom.grad_lambda;
    const double* tv = &table.val[p * kGenCount];
    const double* t1 = &table.d1[(p * kGenCount) * 3];
    const double* t2 = &table.d2[(p * kGenCount) * 6];
    for (int f = 0; f < 10; ++f) {
        const auto& cf = basis.coef[f];
        if (val) {
            double s = 0.0;
            for (int g = 0; g < kGenCount; ++g) s += cf[g] * tv[g];
            (*val)[f] = s;
        }
        if (grad || hess) {
            double d1[3] = {0.0, 0.0, 0.0};
            for (int g = 0; g < kGenCount; ++g) {
                const double c = cf[g];
                if (c == 0.0) continue;
                d1[0] += c * t1[g * 3 + 0];
                d1[1] += c * t1[g * 3 + 1];
                d1[2] += c * t1[g * 3 + 2];
            }
            if (grad)
                (*grad)[f] = gl[0] * d1[0] + gl[1] * d1[1] + gl[2] * d1[2];
            if (hess) {
                double d2[6] = {0, 0, 0, 0, 0, 0};
                for (int g = 0; g < kGenCount; ++g) {
                    const double c = cf[g];
                    if (c == 0.0) continue;
                    for (int k = 0; k < 6; ++k) d2[k] += c * t2[g * 6 + k];
                }
                Sym2 h{};
                // diagonal blocks
                for (int i = 0; i < 3; ++i) {
                    h.xx += d2[i] * gl[i].x * gl[i].x;
                    h.xy += d2[i] * gl[i].x * gl[i].y;
                    h.yy += d2[i] * gl[i].y * gl[i].y;
                }
                // mixed blocks (12,13,23), each appearing twice
                static constexpr int pi[3] = {0, 0, 1};
                static constexpr int pj[3] = {1, 2, 2};
                for (int k = 0; k < 3; ++k) {
                    const double c = d2[3 + k];
                    const Vec2& a = gl[pi[k]];
                    const Vec2& b = gl[pj[k]];
                    h.xx += c * 2.0 * a.x * b.x;
                    h.xy += c * (a.x * b.y + a.y * b.x);
                    h.yy += c * 2.0 * a.y * b.y;
                }
                (*hess)[f] = h;
            }
        }
    }
}

} // namespace detail

inline void LocalBasis::eval_all(double l1, double l2, double l3,
                                 std::array<double, 10>& val,
                                 std::array<Vec2, 10>& grad,
                                 std::array<Sym2, 10>& hess) const {
    const std::vector<std::array<double, 3>> pts{{l1, l2, l3}};
    const auto table = detail::GeneratorTable::build(pts);
    detail::eval_basis_at(*this, table, 0, &val, &grad, &hess);
}

/// Apply the 10 DoF functionals to a scalar field with value() and
/// gradient() evaluators. Ordering matches LocalBasis.
template <typename Field>
inline std::array<double, 10> dof_functionals(const TriangleGeometry& g, const Field& f,
                                              const TriangleRule& vol_rule,
                                              const EdgeRule& e_rule) {
    std::array<double, 10> dofs{};
    for (int i = 0; i < 3; ++i) dofs[i] = f.value(g.v[i]);
    for (int i = 0; i < 3; ++i) dofs[3 + i] = f.value(g.edge_mid[i]);
    for (int i = 0; i < 3; ++i) {
        double s = 0.0;
        for (const auto& q : e_rule.points)
            s += q.w * f.gradient(g.edge_point(i, q.t)).dot(g.edge_normal[i]);
        dofs[6 + i] = s; // edge weights sum to 1, so this is the average
    }
    double mean = 0.0;
    for (const auto& q : vol_rule.points)
        mean += q.w * f.value(g.point(q.l1, q.l2, q.l3));
    dofs[9] = 2.0 * mean; // reference weights sum to 1/2
    return dofs;
}

namespace detail {

/// Exact evaluation of the 10 DoF functionals on each shape function:
/// point evaluations plus small Gauss rules that are exact for P5.
inline std::array<std::array<double, 10>, 10> dof_matrix(const LocalBasis& basis) {
    // Verification points: 3 vertices, 3 midpoints, 3 edges x 3 Gauss points,
    // and a degree-5 interior rule for the mean.
    static const auto setup = [] {
        std::vector<std::array<double, 3>> pts;
        pts.push_back({1, 0, 0});
        pts.push_back({0, 1, 0});
        pts.push_back({0, 0, 1});
        pts.push_back({0, 0.5, 0.5});
        pts.push_back({0.5, 0, 0.5});
        pts.push_back({0.5, 0.5, 0});
        const EdgeRule er = edge_rule(5);
        for (int e = 0; e < 3; ++e) {
            for (const auto& q : er.points) {
                std::array<double, 3> l{0, 0, 0};
                l[(e + 1) % 3] = 1.0 - q.t;
                l[(e + 2) % 3] = q.t;
                pts.push_back(l);
            }
        }
        const TriangleRule tr = triangle_rule(5);
        for (const auto& q : tr.points) pts.push_back({q.l1, q.l2, q.l3});
        struct Setup {
            GeneratorTable table;
            EdgeRule er;
            TriangleRule tr;
        };
        return Setup{GeneratorTable::build(pts), er, tr};
    }();

    const int n_edge = static_cast<int>(setup.er.points.size());
    std::array<std::array<double, 10>, 10> D{};
    std::array<double, 10> val{};
    std::array<Vec2, 10> grad{};
    for (int p = 0; p < 6; ++p) {
        eval_basis_at(basis, setup.table, p, &val, nullptr, nullptr);
        for (int j = 0; j < 10; ++j) D[p][j] = val[j];
    }
    int p = 6;
    for (int e = 0; e < 3; ++e) {
        std::array<double, 10> mom{};
        for (int q = 0; q < n_edge; ++q, ++p) {
            eval_basis_at(basis, setup.table, p, nullptr, &grad, nullptr);
            for (int j = 0; j < 10; ++j)
                mom[j] += setup.er.points[q].w * grad[j].dot(basis.geom.edge_normal[e]);
        }
        for (int j = 0; j < 10; ++j) D[6 + e][j] = mom[j];
    }
    std::array<double, 10> mean{};
    for (std::size_t q = 0; q < setup.tr.points.size(); ++q, ++p) {
        eval_basis_at(basis, setup.table, p, &val, nullptr, nullptr);
        for (int j = 0; j < 10; ++j) mean[j] += setup.tr.points[q].w * val[j];
    }
    for (int j = 0; j < 10; ++j) D[9][j] = 2.0 * mean[j];
    return D;
}

} // namespace detail

inline LocalBasis build_local_basis(const TriangleGeometry& geom) {
    LocalBasis basis;
    basis.geom = geom;
    const auto& g = geom.glen;
    const auto& gl = geom.grad_lambda;

    // phi_0
    basis.coef[9][12] = 1.0;
    // psi_i = (6/g_i) B_i + phi_0 / (30 g_i)
    for (int i = 0; i < 3; ++i) {
        basis.coef[6 + i][6 + i] = 6.0 / g[i];
        basis.coef[6 + i][12] = 1.0 / (30.0 * g[i]);
    }
    // phi^b_i = M_i + R_i - (4/15) phi_0
    for (int i = 0; i < 3; ++i) {
        basis.coef[3 + i][3 + i] = 1.0;
        basis.coef[3 + i][9 + i] = 1.0;
        basis.coef[3 + i][12] = -4.0 / 15.0;
    }
    // phi_i = Q_i - g_i psi_i + sum_{j != i} (grad l_i . grad l_j / g_j) psi_j
    for (int i = 0; i < 3; ++i) {
        basis.coef[i][i] = 1.0;
        basis.coef[i][6 + i] -= 6.0;
        basis.coef[i][12] -= 1.0 / 30.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            const double d = gl[i].dot(gl[j]);
            basis.coef[i][6 + j] += 6.0 * d / (g[j] * g[j]);
            basis.coef[i][12] += d / (30.0 * g[j] * g[j]);
        }
    }

    const auto D = detail::dof_matrix(basis);
    double dev = 0.0;
    for (int k = 0; k < 10; ++k)
        for (int j = 0; j < 10; ++j)
            dev = std::max(dev, std::abs(D[k][j] - (k == j ? 1.0 : 0.0)));
    if (dev > 1e-10)
        throw std::runtime_error("build_local_basis: DoF matrix deviates from identity by " +
                                 std::to_string(dev) + "; normalization convention violated");
    return basis;
}

/// Coefficients of the local interpolant pi_K f in the shape-function basis.
template <typename Field>
inline std::array<double, 10> interpolate_local(const TriangleGeometry& geom, const Field& f,
                                                const TriangleRule& vol_rule,
                                                const EdgeRule& e_rule) {
    return dof_functionals(geom, f, vol_rule, e_rule);
}

/// P1 pressure element: nodal values at the vertices.
struct P1Basis {
    TriangleGeometry geom;
    double value(int i, double l1, double l2, double l3) const {
        return i == 0 ? l1 : (i == 1 ? l2 : l3);
    }
    Vec2 gradient(int i) const { return geom.grad_lambda[i]; }
};

inline P1Basis p1_basis(const TriangleGeometry& geom) { return P1Basis{geom}; }

} // namespace sgfem
