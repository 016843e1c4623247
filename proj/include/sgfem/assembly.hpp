// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "sgfem/element.hpp"
#include "sgfem/linalg.hpp"
#include "sgfem/mesh.hpp"
#include "sgfem/quadrature.hpp"
#include "sgfem/solutions.hpp"
#include "sgfem/space.hpp"

namespace sgfem {

/// Block system of the penalized mixed formulation:
///   [ A  B^T ] [u]   [F]
///   [ B -C/l ] [p] = [0]
/// with A the strain/strain-gradient form scaled by 2 mu, B the divergence
/// pairing with the iota^2 gradient term, and C the weighted pressure mass.
struct SaddleSystem {
    SparseMatrix A; // velocity x velocity
    SparseMatrix B; // pressure x velocity
    SparseMatrix C; // pressure x pressure
    std::vector<double> F;
    double iota = 1.0, lambda = 1.0, mu = 1.0;
    int num_velocity = 0, num_pressure = 0;
};

namespace detail {

struct BasisPointData {
    std::array<double, 10> val;
    std::array<Vec2, 10> grad;
    std::array<Sym2, 10> hess;
};

inline double hess_row_dot(const Sym2& h, int row, const Vec2& v) {
    return row == 0 ? h.xx * v.x + h.xy * v.y : h.xy * v.x + h.yy * v.y;
}

} // namespace detail

inline SaddleSystem assemble(const Mesh& mesh, const DofLayout& lay, double iota, double lambda,
                             double mu, int quad_degree = 12) {
    require(iota > 0.0 && iota <= 1.0, "assemble: iota must be in (0, 1]");
    require(lambda > 0.0 && mu > 0.0, "assemble: Lame constants must be positive");
    require(quad_degree >= 10, "assemble: quadrature degree must cover P5 basis products (>= 10)");
    const TriangleRule rule = triangle_rule(quad_degree);
    const auto table = detail::GeneratorTable::build(rule);
    const double i2 = iota * iota;

    SaddleSystem sys;
    sys.iota = iota;
    sys.lambda = lambda;
    sys.mu = mu;
    sys.num_velocity = lay.num_velocity;
    sys.num_pressure = lay.num_pressure;
    sys.F.assign(lay.num_velocity, 0.0);

    std::vector<Triplet> ta, tb, tc;
    ta.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 400);
    tb.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 60);
    tc.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);

    detail::BasisPointData bp;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.triangle_coords(t);
        const auto geom = make_geometry(c[0], c[1], c[2]);
        const auto basis = build_local_basis(geom);
        const double two_area = 2.0 * geom.area;

        double a_loc[20][20] = {};
        double b_loc[3][20] = {};
        double c_loc[3][3] = {};
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            detail::eval_basis_at(basis, table, static_cast<int>(q), &bp.val, &bp.grad, &bp.hess);
            const double w = rule.points[q].w * two_area;
            const double lam[3] = {rule.points[q].l1, rule.points[q].l2, rule.points[q].l3};
            for (int i = 0; i < 10; ++i) {
                const double gi[2] = {bp.grad[i].x, bp.grad[i].y};
                const Vec2 hi_row[2] = {{bp.hess[i].xx, bp.hess[i].xy},
                                        {bp.hess[i].xy, bp.hess[i].yy}};
                for (int j = 0; j < 10; ++j) {
                    const double gg = bp.grad[i].dot(bp.grad[j]);
                    const double hh = bp.hess[i].contract(bp.hess[j]);
                    const double gj[2] = {bp.grad[j].x, bp.grad[j].y};
                    const Vec2 hj_row[2] = {{bp.hess[j].xx, bp.hess[j].xy},
                                            {bp.hess[j].xy, bp.hess[j].yy}};
                    for (int a = 0; a < 2; ++a) {
                        for (int b = 0; b < 2; ++b) {
                            // eps(phi_i e_a) : eps(phi_j e_b) and its gradient analogue
                            const double eps_term =
                                0.5 * ((a == b ? gg : 0.0) + gi[b] * gj[a]);
                            const double grad_eps_term =
                                0.5 * ((a == b ? hh : 0.0) + hi_row[b].dot(hj_row[a]));
                            a_loc[2 * i + a][2 * j + b] +=
                                w * 2.0 * mu * (eps_term + i2 * grad_eps_term);
                        }
                    }
                }
            }
            for (int m = 0; m < 3; ++m) {
                const double pm = lam[m];
                const Vec2 gp = geom.grad_lambda[m];
                for (int i = 0; i < 10; ++i) {
                    for (int a = 0; a < 2; ++a) {
                        const double div_part = (a == 0 ? bp.grad[i].x : bp.grad[i].y) * pm;
                        const double grad_div_part = detail::hess_row_dot(bp.hess[i], a, gp);
                        b_loc[m][2 * i + a] += w * (div_part + i2 * grad_div_part);
                    }
                }
                for (int n = 0; n < 3; ++n)
                    c_loc[m][n] += w * (pm * lam[n] + i2 * gp.dot(geom.grad_lambda[n]));
            }
        }

        const auto& dofs = lay.tri_scalar_dofs[t];
        const auto& signs = lay.tri_signs[t];
        for (int i = 0; i < 10; ++i) {
            for (int a = 0; a < 2; ++a) {
                const int gi = lay.velocity_index(dofs[i], a);
                for (int j = 0; j < 10; ++j)
                    for (int b = 0; b < 2; ++b)
                        ta.push_back({gi, lay.velocity_index(dofs[j], b),
                                      signs[i] * signs[j] * a_loc[2 * i + a][2 * j + b]});
            }
        }
        const auto& tri = mesh.triangles[t];
        for (int m = 0; m < 3; ++m) {
            for (int i = 0; i < 10; ++i)
                for (int a = 0; a < 2; ++a)
                    tb.push_back({tri[m], lay.velocity_index(dofs[i], a),
                                  signs[i] * b_loc[m][2 * i + a]});
            for (int n = 0; n < 3; ++n) tc.push_back({tri[m], tri[n], c_loc[m][n]});
        }
    }

    sys.A = SparseMatrix::from_triplets(lay.num_velocity, lay.num_velocity, std::move(ta));
    sys.B = SparseMatrix::from_triplets(lay.num_pressure, lay.num_velocity, std::move(tb));
    sys.C = SparseMatrix::from_triplets(lay.num_pressure, lay.num_pressure, std::move(tc));
    return sys;
}

/// Volume load plus, for inhomogeneous natural data, the boundary term
/// iota^2 int_dOmega g_N . dn(v) with g_N the exact double traction.
inline void assemble_load(const Mesh& mesh, const DofLayout& lay, const ManufacturedCase& mc,
                          SaddleSystem& sys, int vol_degree = 14, int edge_degree = 10) {
    const double i2 = sys.iota * sys.iota;
    sys.F.assign(lay.num_velocity, 0.0);
    detail::BasisPointData bp;

    if (!mc.zero_load) {
        const TriangleRule rule = triangle_rule(vol_degree);
        const auto table = detail::GeneratorTable::build(rule);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto c = mesh.triangle_coords(t);
            const auto geom = make_geometry(c[0], c[1], c[2]);
            const auto basis = build_local_basis(geom);
            const double two_area = 2.0 * geom.area;
            double f_loc[20] = {};
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                detail::eval_basis_at(basis, table, static_cast<int>(q), &bp.val, nullptr, nullptr);
                const auto& qp = rule.points[q];
                const Vec2 x = geom.point(qp.l1, qp.l2, qp.l3);
                const Vec2 fv = mc.f(x);
                const double w = qp.w * two_area;
                for (int i = 0; i < 10; ++i) {
                    f_loc[2 * i] += w * fv.x * bp.val[i];
                    f_loc[2 * i + 1] += w * fv.y * bp.val[i];
                }
            }
            for (int i = 0; i < 10; ++i)
                for (int a = 0; a < 2; ++a)
                    sys.F[lay.velocity_index(lay.tri_scalar_dofs[t][i], a)] +=
                        lay.tri_signs[t][i] * f_loc[2 * i + a];
        }
    }

    if (!mc.homogeneous_bc) {
        const EdgeRule erule = edge_rule(edge_degree);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            bool touches = false;
            for (int i = 0; i < 3; ++i) touches |= (mesh.edge_boundary[mesh.tri_edges[t][i]] != 0);
            if (!touches) continue;
            const auto c = mesh.triangle_coords(t);
            const auto geom = make_geometry(c[0], c[1], c[2]);
            const auto basis = build_local_basis(geom);
            for (int i = 0; i < 3; ++i) {
                if (!mesh.edge_boundary[mesh.tri_edges[t][i]]) continue;
                const Vec2 n = geom.edge_normal[i];
                double f_loc[20] = {};
                for (const auto& q : erule.points) {
                    std::array<double, 3> l{0, 0, 0};
                    l[i] = 0.0;
                    l[(i + 1) % 3] = 1.0 - q.t;
                    l[(i + 2) % 3] = q.t;
                    std::array<double, 10> val;
                    std::array<Vec2, 10> grad;
                    std::array<Sym2, 10> hess;
                    basis.eval_all(l[0], l[1], l[2], val, grad, hess);
                    const Vec2 x = geom.edge_point(i, q.t);
                    const Vec2 gn = mc.boundary_traction(x, n);
                    const double w = q.w * geom.edge_len[i];
                    for (int j = 0; j < 10; ++j) {
                        const double dn = grad[j].dot(n);
                        f_loc[2 * j] += w * i2 * gn.x * dn;
                        f_loc[2 * j + 1] += w * i2 * gn.y * dn;
                    }
                }
                for (int j = 0; j < 10; ++j)
                    for (int a = 0; a < 2; ++a)
                        sys.F[lay.velocity_index(lay.tri_scalar_dofs[t][j], a)] +=
                            lay.tri_signs[t][j] * f_loc[2 * j + a];
            }
        }
    }
}

/// Triplets of the assembled symmetric block matrix [[A, B^T], [B, -C/lambda]].
inline std::vector<Triplet> full_system_triplets(const SaddleSystem& sys) {
    std::vector<Triplet> out;
    out.reserve(sys.A.nnz() + 2 * sys.B.nnz() + sys.C.nnz());
    for (int r = 0; r < sys.A.rows(); ++r)
        for (int k = sys.A.row_offsets()[r]; k < sys.A.row_offsets()[r + 1]; ++k)
            out.push_back({r, sys.A.col_indices()[k], sys.A.values()[k]});
    const int off = sys.num_velocity;
    for (int r = 0; r < sys.B.rows(); ++r) {
        for (int k = sys.B.row_offsets()[r]; k < sys.B.row_offsets()[r + 1]; ++k) {
            const int c = sys.B.col_indices()[k];
            const double v = sys.B.values()[k];
            out.push_back({off + r, c, v});
            out.push_back({c, off + r, v});
        }
    }
    for (int r = 0; r < sys.C.rows(); ++r)
        for (int k = sys.C.row_offsets()[r]; k < sys.C.row_offsets()[r + 1]; ++k)
            out.push_back({off + r, off + sys.C.col_indices()[k], -sys.C.values()[k] / sys.lambda});
    return out;
}

inline std::vector<double> full_rhs(const SaddleSystem& sys) {
    std::vector<double> rhs(sys.num_velocity + sys.num_pressure, 0.0);
    for (int i = 0; i < sys.num_velocity; ++i) rhs[i] = sys.F[i];
    return rhs;
}

/// Eliminate essential DoFs (with boundary interpolation for inhomogeneous
/// cases) and append the zero-mean pressure row when the case calls for it.
inline ReducedSystem apply_constraints(const DofLayout& lay, const Mesh& mesh,
                                       const SaddleSystem& sys, const ManufacturedCase* bc) {
    const bool mean_row = (bc == nullptr) ? true : bc->zero_mean_pressure;
    const ConstraintSet cs = make_constraints(lay, mesh, bc, mean_row);
    return reduce_system(lay.total, full_system_triplets(sys), full_rhs(sys), cs);
}

struct ErrorReport {
    double grad_err = 0.0;    // ||grad(u - u_h)||_L2
    double hess_err = 0.0;    // broken ||grad_h^2 (u - u_h)||_L2
    double energy_err = 0.0;  // grad_err + iota * hess_err
    double grad_norm = 0.0, hess_norm = 0.0, energy_norm = 0.0;
    double rel_energy = 0.0;  // energy_err / energy_norm
    double p_err = 0.0;       // ||p - p_h|| + iota ||grad(p - p_h)||
    double p_norm = 0.0;
    double p_rel = 0.0;
};

/// Broken norms of the discrete error against the exact fields; the exact
/// side uses jets, the discrete side the local basis. Elements touching the
/// singular corner of a singular case are integrated with the corner-refined
/// rule so the near-singular exact Hessian is resolved. Works for any case
/// type exposing grad_u/hess_u/p/grad_p plus iota and corner flags.
template <typename Case>
inline ErrorReport error_norms(const Mesh& mesh, const DofLayout& lay,
                               const std::vector<double>& u_coeffs,
                               const std::vector<double>& p_coeffs, const Case& mc,
                               int quad_degree = 14) {
    const TriangleRule plain = triangle_rule(quad_degree);
    const auto plain_table = detail::GeneratorTable::build(plain);
    const double iota = mc.iota;

    double g2 = 0, h2 = 0, G2 = 0, H2 = 0, p2 = 0, pg2 = 0, P2 = 0, PG2 = 0;
    detail::BasisPointData bp;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto cge = mesh.triangle_coords(t);
        const auto geom = make_geometry(cge[0], cge[1], cge[2]);
        const auto basis = build_local_basis(geom);
        const double two_area = 2.0 * geom.area;

        const TriangleRule* rule = &plain;
        const detail::GeneratorTable* table = &plain_table;
        TriangleRule refined;
        detail::GeneratorTable refined_table;
        if (mc.singular_corner) {
            int corner_slot = -1;
            for (int i = 0; i < 3; ++i)
                if ((geom.v[i] - mc.corner).norm() < 1e-14) corner_slot = i;
            if (corner_slot >= 0) {
                refined = corner_refined_rule(plain, 8, corner_slot);
                refined_table = detail::GeneratorTable::build(refined);
                rule = &refined;
                table = &refined_table;
            }
        }

        double u_loc[2][10];
        for (int i = 0; i < 10; ++i) {
            for (int a = 0; a < 2; ++a)
                u_loc[a][i] = lay.tri_signs[t][i] *
                              u_coeffs[lay.velocity_index(lay.tri_scalar_dofs[t][i], a)];
        }
        const auto& tri = mesh.triangles[t];
        const double p_loc[3] = {p_coeffs[tri[0]], p_coeffs[tri[1]], p_coeffs[tri[2]]};
        const Vec2 p_grad_h = geom.grad_lambda[0] * p_loc[0] + geom.grad_lambda[1] * p_loc[1] +
                              geom.grad_lambda[2] * p_loc[2];

        for (std::size_t q = 0; q < rule->points.size(); ++q) {
            detail::eval_basis_at(basis, *table, static_cast<int>(q), &bp.val, &bp.grad, &bp.hess);
            const auto& qp = rule->points[q];
            const double w = qp.w * two_area;
            const Vec2 x = geom.point(qp.l1, qp.l2, qp.l3);

            Vec2 gh1{0, 0}, gh2{0, 0};
            Sym2 hh1{}, hh2{};
            for (int i = 0; i < 10; ++i) {
                gh1 += bp.grad[i] * u_loc[0][i];
                gh2 += bp.grad[i] * u_loc[1][i];
                hh1 = hh1 + bp.hess[i] * u_loc[0][i];
                hh2 = hh2 + bp.hess[i] * u_loc[1][i];
            }
            const Mat2 ge = mc.grad_u(x);
            Sym2 he1, he2;
            mc.hess_u(x, he1, he2);
            const double dgx1 = gh1.x - ge.a11, dgy1 = gh1.y - ge.a12;
            const double dgx2 = gh2.x - ge.a21, dgy2 = gh2.y - ge.a22;
            g2 += w * (dgx1 * dgx1 + dgy1 * dgy1 + dgx2 * dgx2 + dgy2 * dgy2);
            G2 += w * (ge.a11 * ge.a11 + ge.a12 * ge.a12 + ge.a21 * ge.a21 + ge.a22 * ge.a22);
            const Sym2 dh1 = hh1 - he1, dh2 = hh2 - he2;
            h2 += w * (dh1.contract(dh1) + dh2.contract(dh2));
            H2 += w * (he1.contract(he1) + he2.contract(he2));

            double ph = 0.0;
            const double lam[3] = {qp.l1, qp.l2, qp.l3};
            for (int m = 0; m < 3; ++m) ph += p_loc[m] * lam[m];
            const double dp = ph - mc.p(x);
            const Vec2 dpg = p_grad_h - mc.grad_p(x);
            p2 += w * dp * dp;
            pg2 += w * dpg.squared_norm();
            const double pe = mc.p(x);
            P2 += w * pe * pe;
            PG2 += w * mc.grad_p(x).squared_norm();
        }
    }

    ErrorReport rep;
    rep.grad_err = std::sqrt(g2);
    rep.hess_err = std::sqrt(h2);
    rep.energy_err = rep.grad_err + iota * rep.hess_err;
    rep.grad_norm = std::sqrt(G2);
    rep.hess_norm = std::sqrt(H2);
    rep.energy_norm = rep.grad_norm + iota * rep.hess_norm;
    rep.rel_energy = rep.energy_err / rep.energy_norm;
    rep.p_err = std::sqrt(p2) + iota * std::sqrt(pg2);
    rep.p_norm = std::sqrt(P2) + iota * std::sqrt(PG2);
    rep.p_rel = rep.p_norm > 0.0 ? rep.p_err / rep.p_norm : 0.0;
    return rep;
}

/// Gram matrix of the discrete energy norm ||grad v|| + iota ||grad_h^2 v||
/// in its quadratic form: (grad v, grad w) + iota^2 (grad_h^2 v, grad_h^2 w).
inline SparseMatrix assemble_velocity_gram(const Mesh& mesh, const DofLayout& lay, double iota,
                                           int quad_degree = 12) {
    const TriangleRule rule = triangle_rule(quad_degree);
    const auto table = detail::GeneratorTable::build(rule);
    const double i2 = iota * iota;
    std::vector<Triplet> tx;
    tx.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 200);
    detail::BasisPointData bp;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.triangle_coords(t);
        const auto geom = make_geometry(c[0], c[1], c[2]);
        const auto basis = build_local_basis(geom);
        const double two_area = 2.0 * geom.area;
        double x_loc[10][10] = {};
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            detail::eval_basis_at(basis, table, static_cast<int>(q), nullptr, &bp.grad, &bp.hess);
            const double w = rule.points[q].w * two_area;
            for (int i = 0; i < 10; ++i)
                for (int j = 0; j < 10; ++j)
                    x_loc[i][j] += w * (bp.grad[i].dot(bp.grad[j]) +
                                        i2 * bp.hess[i].contract(bp.hess[j]));
        }
        const auto& dofs = lay.tri_scalar_dofs[t];
        const auto& signs = lay.tri_signs[t];
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j)
                for (int a = 0; a < 2; ++a)
                    tx.push_back({lay.velocity_index(dofs[i], a), lay.velocity_index(dofs[j], a),
                                  signs[i] * signs[j] * x_loc[i][j]});
    }
    return SparseMatrix::from_triplets(lay.num_velocity, lay.num_velocity, std::move(tx));
}

struct InfSupResult {
    double beta = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Numerical probe of the discrete inf-sup constant
///   beta_h = min_p max_v b(v,p) / (|v|_X |p|_M)
/// via the generalized eigenproblem B X^{-1} B^T p = theta M p on the
/// constrained spaces, theta_min found by inverse power iteration. The
/// zero-mean pressure constraint is handled as a multiplier in the inner
/// solve. Meant for small meshes; the Schur complement is formed densely.
inline InfSupResult estimate_infsup(const Mesh& mesh, const DofLayout& lay, double iota,
                                    double tol = 1e-6, int max_iter = 500) {
    const SaddleSystem sys = assemble(mesh, lay, iota, 1.0, 1.0);
    const SparseMatrix X = assemble_velocity_gram(mesh, lay, iota);

    // Reduction maps for homogeneous constraints on both spaces.
    const ConstraintSet cs = make_constraints(lay, mesh, nullptr, true);
    std::vector<int> vmap(lay.num_velocity, -1), pmap(lay.num_pressure, -1);
    int nv = 0, np = 0;
    for (int i = 0; i < lay.num_velocity; ++i)
        if (!cs.fixed[i]) vmap[i] = nv++;
    for (int i = 0; i < lay.num_pressure; ++i)
        if (!cs.fixed[lay.num_velocity + i]) pmap[i] = np++;

    auto reduce = [](const SparseMatrix& m, const std::vector<int>& rmap,
                     const std::vector<int>& cmap, int nr, int nc) {
        std::vector<Triplet> tr;
        tr.reserve(m.nnz());
        for (int r = 0; r < m.rows(); ++r) {
            if (rmap[r] < 0) continue;
            for (int k = m.row_offsets()[r]; k < m.row_offsets()[r + 1]; ++k) {
                const int c = m.col_indices()[k];
                if (cmap[c] < 0) continue;
                tr.push_back({rmap[r], cmap[c], m.values()[k]});
            }
        }
        return SparseMatrix::from_triplets(nr, nc, tr);
    };
    const SparseMatrix Xr = reduce(X, vmap, vmap, nv, nv);
    const SparseMatrix Br = reduce(sys.B, pmap, vmap, np, nv);
    const SparseMatrix Mr = reduce(sys.C, pmap, pmap, np, np);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> xfac(Xr.to_eigen());
    require(xfac.info() == Eigen::Success, "estimate_infsup: velocity Gram factorization failed");

    // Dense Schur complement S = B X^{-1} B^T on the reduced pressure space.
    Eigen::MatrixXd S(np, np), M(np, np);
    {
        std::vector<double> col(nv);
        for (int j = 0; j < np; ++j) {
            std::fill(col.begin(), col.end(), 0.0);
            std::vector<double> ej(np, 0.0);
            ej[j] = 1.0;
            Br.multiply_transpose_add(ej, col);
            const Eigen::VectorXd z =
                xfac.solve(Eigen::Map<const Eigen::VectorXd>(col.data(), nv));
            std::vector<double> zz(z.data(), z.data() + nv);
            const auto bz = Br.multiply(zz);
            for (int i = 0; i < np; ++i) S(i, j) = bz[i];
        }
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < np; ++j) M(i, j) = 0.0;
        for (int r = 0; r < Mr.rows(); ++r)
            for (int k = Mr.row_offsets()[r]; k < Mr.row_offsets()[r + 1]; ++k)
                M(r, Mr.col_indices()[k]) = Mr.values()[k];
    }
    S = 0.5 * (S + S.transpose().eval());

    // Zero-mean constraint vector on the reduced pressure space.
    Eigen::VectorXd mvec = Eigen::VectorXd::Zero(np);
    for (int i = 0; i < lay.num_pressure; ++i)
        if (pmap[i] >= 0) mvec[pmap[i]] = cs.mean_coeffs[lay.num_velocity + i];

    Eigen::MatrixXd bord(np + 1, np + 1);
    bord.topLeftCorner(np, np) = S;
    bord.topRightCorner(np, 1) = mvec;
    bord.bottomLeftCorner(1, np) = mvec.transpose();
    bord(np, np) = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> bord_lu(bord);

    auto solve_s = [&](const std::vector<double>& v) {
        Eigen::VectorXd rhs(np + 1);
        for (int i = 0; i < np; ++i) rhs[i] = v[i];
        rhs[np] = 0.0;
        const Eigen::VectorXd y = bord_lu.solve(rhs);
        return std::vector<double>(y.data(), y.data() + np);
    };
    auto apply_m = [&](const std::vector<double>& v) {
        const Eigen::VectorXd y = M * Eigen::Map<const Eigen::VectorXd>(v.data(), np);
        return std::vector<double>(y.data(), y.data() + np);
    };

    const auto eig = inverse_power_smallest(solve_s, apply_m, np, tol, max_iter);
    InfSupResult res;
    res.beta = std::sqrt(std::max(eig.value, 0.0));
    res.iterations = eig.iterations;
    res.converged = eig.converged;
    return res;
}

} // namespace sgfem
