// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <vector>

#include "sgfem/element.hpp"
#include "sgfem/linalg.hpp"
#include "sgfem/mesh.hpp"
#include "sgfem/quadrature.hpp"

namespace sgfem {

/// Piecewise-linear radial profile with f0(0) = 0 and slope 1/i on the i-th
/// of n uniform segments of (0,1). Its weighted norm grows like
/// h log^{1+1/d}(1/h) while the gradient norm only grows like
/// h log^{1/d}(1/h), which makes the profile the blow-up witness for the
/// critical-exponent Hardy bound.
struct RadialProfile {
    int n = 1;
    int d = 2;

    double h() const { return 1.0 / n; }

    /// f0(i h) = h * sum_{j<=i} 1/j, exactly as a partial harmonic sum.
    double breakpoint_value(int i) const {
        double s = 0.0;
        for (int j = 1; j <= i; ++j) s += 1.0 / j;
        return s * h();
    }

    double value(double rho) const {
        const double hh = h();
        const int i = std::min(n, std::max(1, static_cast<int>(std::ceil(rho / hh))));
        return breakpoint_value(i - 1) + (rho - (i - 1) * hh) / i;
    }

    double slope(double rho) const {
        const double hh = h();
        const int i = std::min(n, std::max(1, static_cast<int>(std::ceil(rho / hh))));
        return 1.0 / i;
    }
};

inline RadialProfile make_radial_profile(int n, int d = 2) {
    require(n >= 1, "make_radial_profile: n must be >= 1");
    require(d == 1 || d == 2, "make_radial_profile: d must be 1 or 2");
    return RadialProfile{n, d};
}

struct RadialNorms {
    double hardy = 0.0; // (int_0^1 |f0|^d / rho drho)^{1/d}, per unit solid angle
    double grad = 0.0;  // (int_0^1 rho^{d-1} |f0'|^d drho)^{1/d}
    double ratio = 0.0;
};

/// Both integrals in closed form per segment (the integrands are elementary
/// on each piece), summed exactly; no quadrature error beyond rounding.
inline RadialNorms radial_norms(const RadialProfile& f) {
    const double h = f.h();
    double ih = 0.0, ig = 0.0;
    double c = 0.0; // f0 at the left endpoint
    for (int i = 1; i <= f.n; ++i) {
        const double a = (i - 1) * h, b = i * h;
        const double s = 1.0 / i;
        const double A = c - s * a; // f0 = A + s rho on (a,b)
        if (f.d == 1) {
            ih += (i == 1 ? 0.0 : A * std::log(b / a)) + s * (b - a);
            ig += s * (b - a);
        } else {
            ih += (i == 1 ? 0.0 : A * A * std::log(b / a)) + 2.0 * A * s * (b - a) +
                  s * s * (b * b - a * a) / 2.0;
            ig += s * s * (b * b - a * a) / 2.0;
        }
        c += s * h;
    }
    RadialNorms out;
    out.hardy = std::pow(ih, 1.0 / f.d);
    out.grad = std::pow(ig, 1.0 / f.d);
    out.ratio = out.hardy / out.grad;
    return out;
}

struct RadialStudyRow {
    int k = 0, n = 0;
    double hardy = 0.0, grad = 0.0, ratio = 0.0, ratio_over_log = 0.0;
};

struct RadialStudy {
    std::vector<RadialStudyRow> rows;
    double p_hardy = 0.0;        // fitted exponent of hardy ~ h log^p(1/h); 3/2 expected
    double p_grad = 0.0;         // fitted exponent of grad ~ h log^p(1/h); 1/2 expected
    double ratio_exponent = 0.0; // p_hardy - p_grad; 1 expected
    bool ratio_diffs_monotone = false;
};

/// Fit the log-power exponents over n = 2^kmin .. 2^kmax for d = 2.
///
/// The squared normalized integrals behave like a (log n + gamma)^{2p} + c
/// (gamma from the harmonic-number expansion H_n = log n + gamma + ...), so
/// consecutive differences cancel the constant and regressing their logs on
/// log(log n + gamma) at interval midpoints recovers 2p - 1. A plain
/// two-parameter fit cannot reach the asymptote by n = 2^10: its slope is
/// still ~0.28 low for the hardy term.
inline RadialStudy radial_study(int kmin = 3, int kmax = 10) {
    require(kmin >= 1 && kmax > kmin, "radial_study: need kmin >= 1 and kmax > kmin");
    constexpr double kEulerGamma = 0.57721566490153286;
    RadialStudy out;
    std::vector<double> L, ih2, ig2;
    for (int k = kmin; k <= kmax; ++k) {
        const int n = 1 << k;
        const auto f = make_radial_profile(n, 2);
        const auto nm = radial_norms(f);
        RadialStudyRow row;
        row.k = k;
        row.n = n;
        row.hardy = nm.hardy;
        row.grad = nm.grad;
        row.ratio = nm.ratio;
        row.ratio_over_log = nm.ratio / std::log(static_cast<double>(n));
        out.rows.push_back(row);
        const double hh = 1.0 / n;
        L.push_back(std::log(static_cast<double>(n)) + kEulerGamma);
        ih2.push_back(nm.hardy * nm.hardy / (hh * hh));
        ig2.push_back(nm.grad * nm.grad / (hh * hh));
    }

    auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= x.size();
        my /= y.size();
        double num = 0, den = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            num += (x[i] - mx) * (y[i] - my);
            den += (x[i] - mx) * (x[i] - mx);
        }
        return num / den;
    };
    std::vector<double> xs, yh, yg;
    for (std::size_t i = 0; i + 1 < L.size(); ++i) {
        xs.push_back(std::log(0.5 * (L[i] + L[i + 1])));
        yh.push_back(std::log(ih2[i + 1] - ih2[i]));
        yg.push_back(std::log(ig2[i + 1] - ig2[i]));
    }
    out.p_hardy = 0.5 * (slope(xs, yh) + 1.0);
    out.p_grad = 0.5 * (slope(xs, yg) + 1.0);
    out.ratio_exponent = out.p_hardy - out.p_grad;

    out.ratio_diffs_monotone = true;
    for (std::size_t i = 2; i < out.rows.size(); ++i) {
        const double d1 = std::abs(out.rows[i - 1].ratio_over_log - out.rows[i - 2].ratio_over_log);
        const double d2 = std::abs(out.rows[i].ratio_over_log - out.rows[i - 1].ratio_over_log);
        if (d2 >= d1) out.ratio_diffs_monotone = false;
    }
    return out;
}

struct FeHardyTerms {
    double lhs = 0.0;       // || f / rho ||_{L2} over the triangulated disk
    double grad_term = 0.0; // broken || grad_h f ||_{L2}
    double jump_term = 0.0; // (sum over interior edges of max |jump|^2)^{1/2}
};

/// Terms of the broken Hardy bound for a piecewise-P1, possibly
/// discontinuous field on a polar disk mesh, given 3 nodal values per
/// triangle (mesh vertex order). The origin value must vanish. The weighted
/// norm uses the corner-refined rule on origin-adjacent elements; the jump
/// term is exact for P1 traces (endpoint evaluation).
inline FeHardyTerms fe_hardy_ratio(const Mesh& mesh, const std::vector<double>& values) {
    require(static_cast<int>(values.size()) == 3 * mesh.num_triangles(),
            "fe_hardy_ratio: need 3 values per triangle");
    require(!mesh.corners.empty() && mesh.corners[0] == 0,
            "fe_hardy_ratio: expected a polar disk mesh with the origin vertex first");

    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (int i = 0; i < 3; ++i)
            if (mesh.triangles[t][i] == 0)
                require(values[3 * t + i] == 0.0, "fe_hardy_ratio: nonzero value at the origin");

    static const TriangleRule plain = triangle_rule(12);
    static const TriangleRule refined0 = corner_refined_rule(triangle_rule(14), 8, 0);
    static const TriangleRule refined1 = corner_refined_rule(triangle_rule(14), 8, 1);
    static const TriangleRule refined2 = corner_refined_rule(triangle_rule(14), 8, 2);

    double lhs2 = 0.0, grad2 = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.triangle_coords(t);
        const auto geom = make_geometry(c[0], c[1], c[2]);
        const double v[3] = {values[3 * t], values[3 * t + 1], values[3 * t + 2]};

        const Vec2 g = geom.grad_lambda[0] * v[0] + geom.grad_lambda[1] * v[1] +
                       geom.grad_lambda[2] * v[2];
        grad2 += geom.area * g.squared_norm();

        int origin_slot = -1;
        for (int i = 0; i < 3; ++i)
            if (mesh.triangles[t][i] == 0) origin_slot = i;
        const TriangleRule& rule =
            origin_slot < 0 ? plain
                            : (origin_slot == 0 ? refined0 : (origin_slot == 1 ? refined1 : refined2));
        for (const auto& q : rule.points) {
            const Vec2 x = geom.point(q.l1, q.l2, q.l3);
            const double fv = v[0] * q.l1 + v[1] * q.l2 + v[2] * q.l3;
            lhs2 += q.w * 2.0 * geom.area * fv * fv / x.squared_norm();
        }
    }

    // interior edges: owners and their trace endpoint values
    std::vector<std::array<int, 2>> owner_count(mesh.num_edges(), {-1, -1});
    std::vector<std::array<double, 4>> traces(mesh.num_edges()); // lo+,hi+,lo-,hi-
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int i = 0; i < 3; ++i) {
            const int e = mesh.tri_edges[t][i];
            const int side = owner_count[e][0] < 0 ? 0 : 1;
            owner_count[e][side] = t;
            for (int s = 0; s < 2; ++s) {
                const int vglob = mesh.edges[e][s];
                for (int j = 0; j < 3; ++j)
                    if (mesh.triangles[t][j] == vglob) traces[e][2 * side + s] = values[3 * t + j];
            }
        }
    }
    double jump2 = 0.0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.edge_boundary[e]) continue;
        const double j_lo = traces[e][0] - traces[e][2];
        const double j_hi = traces[e][1] - traces[e][3];
        const double jmax = std::max(std::abs(j_lo), std::abs(j_hi));
        jump2 += jmax * jmax;
    }

    FeHardyTerms out;
    out.lhs = std::sqrt(lhs2);
    out.grad_term = std::sqrt(grad2);
    out.jump_term = std::sqrt(jump2);
    return out;
}

/// Nodal values (3 per triangle) of a continuous vertex-based field.
inline std::vector<double> dg_values_from_vertex_field(const Mesh& mesh,
                                                       const std::vector<double>& vertex_values) {
    std::vector<double> out(3 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (int i = 0; i < 3; ++i) out[3 * t + i] = vertex_values[mesh.triangles[t][i]];
    return out;
}

struct SeminormRatioResult {
    double ratio = 0.0; // max over the constrained P1 space of [q]_{H1+} / ||grad q||
    int iterations = 0;
    bool converged = false;
};

/// Largest generalized eigenvalue of the corner-weighted mass against the
/// stiffness on the pressure space (corners pinned, zero mean deflated by a
/// multiplier in the inner solve), by forward power iteration. The weight
/// sum_a 1/|x-a|^2 is integrated with the corner-refined rule on
/// corner-adjacent elements.
inline SeminormRatioResult corner_seminorm_ratio(const Mesh& mesh, double tol = 1e-6,
                                                 int max_iter = 2000) {
    std::vector<int> vmap(mesh.num_vertices(), -1);
    std::vector<char> pinned(mesh.num_vertices(), 0);
    for (int v : mesh.corners) pinned[v] = 1;
    int nfree = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (!pinned[v]) vmap[v] = nfree++;

    static const TriangleRule plain = triangle_rule(12);
    const TriangleRule refined[3] = {corner_refined_rule(triangle_rule(14), 8, 0),
                                     corner_refined_rule(triangle_rule(14), 8, 1),
                                     corner_refined_rule(triangle_rule(14), 8, 2)};

    std::vector<Triplet> tw, ts;
    std::vector<double> mean(nfree, 0.0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.triangle_coords(t);
        const auto geom = make_geometry(c[0], c[1], c[2]);
        const auto& tri = mesh.triangles[t];

        double s_loc[3][3];
        for (int m = 0; m < 3; ++m)
            for (int nn = 0; nn < 3; ++nn)
                s_loc[m][nn] = geom.area * geom.grad_lambda[m].dot(geom.grad_lambda[nn]);

        double w_loc[3][3] = {};
        for (int corner : mesh.corners) {
            const Vec2 a = mesh.vertices[corner];
            int slot = -1;
            for (int i = 0; i < 3; ++i)
                if (tri[i] == corner) slot = i;
            const TriangleRule& rule = slot < 0 ? plain : refined[slot];
            for (const auto& q : rule.points) {
                const Vec2 x = geom.point(q.l1, q.l2, q.l3);
                const double w = q.w * 2.0 * geom.area / (x - a).squared_norm();
                const double lam[3] = {q.l1, q.l2, q.l3};
                for (int m = 0; m < 3; ++m) {
                    if (pinned[tri[m]]) continue; // pinned hats stay out of the weighted form
                    for (int nn = 0; nn < 3; ++nn) {
                        if (pinned[tri[nn]]) continue;
                        w_loc[m][nn] += w * lam[m] * lam[nn];
                    }
                }
            }
        }
        for (int m = 0; m < 3; ++m) {
            if (vmap[tri[m]] < 0) continue;
            mean[vmap[tri[m]]] += geom.area / 3.0;
            for (int nn = 0; nn < 3; ++nn) {
                if (vmap[tri[nn]] < 0) continue;
                ts.push_back({vmap[tri[m]], vmap[tri[nn]], s_loc[m][nn]});
                if (w_loc[m][nn] != 0.0) tw.push_back({vmap[tri[m]], vmap[tri[nn]], w_loc[m][nn]});
            }
        }
    }
    const SparseMatrix W = SparseMatrix::from_triplets(nfree, nfree, std::move(tw));
    const SparseMatrix S = SparseMatrix::from_triplets(nfree, nfree, std::move(ts));

    // bordered stiffness for the zero-mean deflation
    std::vector<Triplet> tb;
    tb.reserve(S.nnz() + 2 * nfree);
    for (int r = 0; r < nfree; ++r)
        for (int k = S.row_offsets()[r]; k < S.row_offsets()[r + 1]; ++k)
            tb.push_back({r, S.col_indices()[k], S.values()[k]});
    for (int r = 0; r < nfree; ++r) {
        tb.push_back({r, nfree, mean[r]});
        tb.push_back({nfree, r, mean[r]});
    }
    const SparseMatrix Sb = SparseMatrix::from_triplets(nfree + 1, nfree + 1, std::move(tb));
    Eigen::SparseLU<Eigen::SparseMatrix<double>> slu(Sb.to_eigen());
    require(slu.info() == Eigen::Success, "corner_seminorm_ratio: stiffness factorization failed");

    auto apply_w = [&](const std::vector<double>& v) { return W.multiply(v); };
    auto apply_s = [&](const std::vector<double>& v) { return S.multiply(v); };
    auto solve_s = [&](const std::vector<double>& v) {
        Eigen::VectorXd rhs(nfree + 1);
        for (int i = 0; i < nfree; ++i) rhs[i] = v[i];
        rhs[nfree] = 0.0;
        const Eigen::VectorXd y = slu.solve(rhs);
        return std::vector<double>(y.data(), y.data() + nfree);
    };
    const auto eig = power_largest(apply_w, solve_s, apply_s, nfree, tol, max_iter);
    SeminormRatioResult out;
    out.ratio = std::sqrt(std::max(eig.value, 0.0));
    out.iterations = eig.iterations;
    out.converged = eig.converged;
    return out;
}

} // namespace sgfem
