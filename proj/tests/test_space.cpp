// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sgfem/assembly.hpp"
#include "sgfem/space.hpp"
#include "test_helpers.hpp"

namespace sgfem {
namespace {

struct VecField {
    std::function<Vec2(Vec2)> val;
    std::function<Mat2(Vec2)> grad;
    Vec2 value(const Vec2& x) const { return val(x); }
    Mat2 gradient(const Vec2& x) const { return grad(x); }
};

struct CaseVectorField {
    const ManufacturedCase* mc;
    Vec2 value(const Vec2& x) const { return mc->u(x); }
    Mat2 gradient(const Vec2& x) const { return mc->grad_u(x); }
};

const TriangleRule& vol12() {
    static const TriangleRule r = triangle_rule(12);
    return r;
}
const EdgeRule& edge10() {
    static const EdgeRule r = edge_rule(10);
    return r;
}

TEST(BuildLayout, SmallestSquareCounts) {
    const Mesh mesh = build_structured_square(1);
    const DofLayout lay = build_layout(mesh);
    EXPECT_EQ(lay.num_scalar, 16); // 4 + 5 + 5 + 2
    EXPECT_EQ(lay.num_velocity, 32);
    EXPECT_EQ(lay.num_pressure, 4);
    EXPECT_EQ(lay.fixed_pressure_vertices.size(), 4u);
}

TEST(BuildLayout, ScalarCountMatchesFormula) {
    for (const Mesh& mesh : {build_structured_square(3), build_polar_disk(3, 8),
                             build_structured_square(5, 0.2, 3)}) {
        const DofLayout lay = build_layout(mesh);
        EXPECT_EQ(lay.num_scalar,
                  mesh.num_vertices() + 2 * mesh.num_edges() + mesh.num_triangles());
    }
}

TEST(BuildLayout, OnlyBoundaryValueDofsAreFixed) {
    const Mesh mesh = build_structured_square(8);
    const DofLayout lay = build_layout(mesh);
    std::vector<char> fixed(lay.num_velocity, 0);
    for (int d : lay.fixed_velocity_dofs) fixed[d] = 1;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        for (int comp = 0; comp < 2; ++comp) {
            EXPECT_EQ(fixed[lay.velocity_index(lay.vertex_dof(v), comp)],
                      mesh.vertex_boundary[v] ? 1 : 0);
        }
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        for (int comp = 0; comp < 2; ++comp) {
            EXPECT_EQ(fixed[lay.velocity_index(lay.midpoint_dof(e), comp)],
                      mesh.edge_boundary[e] ? 1 : 0);
            // moments never fixed: the double traction stays natural
            EXPECT_EQ(fixed[lay.velocity_index(lay.moment_dof(e), comp)], 0);
        }
    }
}

TEST(BuildLayout, InteriorMomentsSharedWithOppositeSigns) {
    const Mesh mesh = build_structured_square(4, 0.1, 9);
    const DofLayout lay = build_layout(mesh);
    std::vector<std::vector<double>> edge_signs(mesh.num_edges());
    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (int i = 0; i < 3; ++i)
            edge_signs[mesh.tri_edges[t][i]].push_back(lay.tri_signs[t][6 + i]);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.edge_boundary[e]) {
            ASSERT_EQ(edge_signs[e].size(), 1u);
        } else {
            ASSERT_EQ(edge_signs[e].size(), 2u);
            EXPECT_DOUBLE_EQ(edge_signs[e][0] * edge_signs[e][1], -1.0);
        }
    }
}

TEST(InterpolateGlobal, LinearFieldExactAndContinuous) {
    const Mesh mesh = build_structured_square(3, 0.15, 21);
    const DofLayout lay = build_layout(mesh);
    VecField f{[](Vec2 x) { return Vec2{x.x, x.y}; },
               [](Vec2) {
                   return Mat2{1, 0, 0, 1};
               }};
    const auto coeffs = interpolate_global(lay, mesh, f, vol12(), edge10());
    // reconstruct at interior sample points and compare
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.1, 0.8);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.triangle_coords(t);
        const auto geom = make_geometry(c[0], c[1], c[2]);
        const auto basis = build_local_basis(geom);
        std::array<double, 10> val;
        std::array<Vec2, 10> grad;
        std::array<Sym2, 10> hess;
        for (int s = 0; s < 4; ++s) {
            const double l1 = u(gen), l2 = u(gen) * (1.0 - l1);
            basis.eval_all(l1, l2, 1.0 - l1 - l2, val, grad, hess);
            Vec2 uh{0, 0};
            for (int i = 0; i < 10; ++i) {
                for (int a = 0; a < 2; ++a) {
                    const double cc = lay.tri_signs[t][i] *
                                      coeffs[lay.velocity_index(lay.tri_scalar_dofs[t][i], a)];
                    (a == 0 ? uh.x : uh.y) += cc * val[i];
                }
            }
            const Vec2 x = geom.point(l1, l2, 1.0 - l1 - l2);
            EXPECT_NEAR(uh.x, x.x, 1e-11);
            EXPECT_NEAR(uh.y, x.y, 1e-11);
        }
    }
}

TEST(InterpolateGlobal, QuadraticVectorFieldExactEverywhere) {
    const Mesh mesh = build_structured_square(4, 0.2, 33);
    const DofLayout lay = build_layout(mesh);
    VecField f{[](Vec2 x) {
                   return Vec2{0.5 + x.x * x.x - 0.3 * x.x * x.y, x.y * x.y + 2.0 * x.x - x.y};
               },
               [](Vec2 x) {
                   return Mat2{2 * x.x - 0.3 * x.y, -0.3 * x.x, 2.0, 2 * x.y - 1.0};
               }};
    const auto coeffs = interpolate_global(lay, mesh, f, vol12(), edge10());
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.05, 0.9);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.triangle_coords(t);
        const auto geom = make_geometry(c[0], c[1], c[2]);
        const auto basis = build_local_basis(geom);
        std::array<double, 10> val;
        std::array<Vec2, 10> grad;
        std::array<Sym2, 10> hess;
        for (int s = 0; s < 20; ++s) {
            const double l1 = u(gen), l2 = u(gen) * (1.0 - l1);
            basis.eval_all(l1, l2, 1.0 - l1 - l2, val, grad, hess);
            Vec2 uh{0, 0};
            for (int i = 0; i < 10; ++i)
                for (int a = 0; a < 2; ++a)
                    (a == 0 ? uh.x : uh.y) +=
                        lay.tri_signs[t][i] *
                        coeffs[lay.velocity_index(lay.tri_scalar_dofs[t][i], a)] * val[i];
            const Vec2 x = geom.point(l1, l2, 1.0 - l1 - l2);
            const Vec2 fe = f.value(x);
            EXPECT_NEAR(uh.x, fe.x, 1e-10);
            EXPECT_NEAR(uh.y, fe.y, 1e-10);
        }
    }
}

TEST(InterpolateGlobal, HomogeneousCaseHasZeroBoundaryValues) {
    const Mesh mesh = build_structured_square(8);
    const DofLayout lay = build_layout(mesh);
    const auto mc = make_case(1, 0.3, 1e-6);
    const CaseVectorField f{&mc};
    const auto coeffs = interpolate_global(lay, mesh, f, vol12(), edge10());
    for (int d : lay.fixed_velocity_dofs) EXPECT_NEAR(coeffs[d], 0.0, 1e-12);
}

TEST(JumpCondition, RandomMemberOfTheNonconformingSpace) {
    // Any global coefficient vector defines a function whose normal
    // derivative has zero mean across every interior edge and whose trace is
    // continuous; both checked by quadrature and sampling.
    const Mesh mesh = build_structured_square(4, 0.18, 77);
    const DofLayout lay = build_layout(mesh);
    std::mt19937_64 gen(100);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> coeffs(lay.num_velocity);
    for (auto& c : coeffs) c = u(gen);

    // map interior edges to their two (triangle, slot) owners
    std::vector<std::vector<std::pair<int, int>>> owners(mesh.num_edges());
    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (int i = 0; i < 3; ++i) owners[mesh.tri_edges[t][i]].push_back({t, i});

    const EdgeRule erule = edge_rule(9); // 5-point Gauss
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.edge_boundary[e]) continue;
        ASSERT_EQ(owners[e].size(), 2u);
        const Vec2 lo = mesh.vertices[mesh.edges[e][0]];
        const Vec2 hi = mesh.vertices[mesh.edges[e][1]];

        for (int comp = 0; comp < 2; ++comp) {
            double jump_integral = 0.0;
            std::array<std::array<double, 5>, 2> trace{};
            int side = 0;
            for (const auto& [t, slot] : owners[e]) {
                const auto c = mesh.triangle_coords(t);
                const auto geom = make_geometry(c[0], c[1], c[2]);
                const auto basis = build_local_basis(geom);
                const Vec2 n_out = geom.edge_normal[slot];
                std::array<double, 10> val;
                std::array<Vec2, 10> grad;
                std::array<Sym2, 10> hess;
                for (std::size_t q = 0; q < erule.points.size(); ++q) {
                    const Vec2 x = lo * (1.0 - erule.points[q].t) + hi * erule.points[q].t;
                    const auto l = geom.barycentric(x);
                    basis.eval_all(l[0], l[1], l[2], val, grad, hess);
                    double v = 0.0, dn = 0.0;
                    for (int i = 0; i < 10; ++i) {
                        const double cc =
                            lay.tri_signs[t][i] *
                            coeffs[lay.velocity_index(lay.tri_scalar_dofs[t][i], comp)];
                        v += cc * val[i];
                        dn += cc * grad[i].dot(n_out);
                    }
                    jump_integral += erule.points[q].w * dn;
                    trace[side][q] = v;
                }
                ++side;
            }
            EXPECT_NEAR(jump_integral, 0.0, 1e-10) << "edge " << e << " comp " << comp;
            for (int q = 0; q < 5; ++q)
                EXPECT_NEAR(trace[0][q], trace[1][q], 1e-10) << "edge " << e;
        }
    }
}

TEST(Constraints, HomogeneousReductionDimensions) {
    const Mesh mesh = build_structured_square(4);
    const DofLayout lay = build_layout(mesh);
    const auto sys = assemble(mesh, lay, 1e-2, 1.0, 0.5);
    const auto rs = apply_constraints(lay, mesh, sys, nullptr);
    const int n_fixed = static_cast<int>(lay.fixed_velocity_dofs.size()) + 4;
    EXPECT_EQ(rs.n_free, lay.total - n_fixed);
    EXPECT_TRUE(rs.has_mean_row);
    EXPECT_EQ(rs.matrix.rows(), rs.n_free + 1);

    // residual of the reduced solve maps back to the full system on free rows
    auto sys2 = sys;
    const auto mc = make_case(1, 0.3, 1e-2);
    assemble_load(mesh, lay, mc, sys2);
    const auto rs2 = apply_constraints(lay, mesh, sys2, &mc);
    const auto sol = solve_indefinite(rs2.matrix, rs2.rhs);
    ASSERT_TRUE(sol.contract_met);
    const auto full = rs2.expand(sol.x);
    const auto fullmat = SparseMatrix::from_triplets(lay.total, lay.total,
                                                     full_system_triplets(sys2));
    auto resid = fullmat.multiply(full);
    const auto frhs = full_rhs(sys2);
    double rmax = 0.0;
    for (int i = 0; i < lay.total; ++i) {
        if (rs2.full_to_free[i] < 0) continue; // fixed rows carry reactions
        double ri = resid[i] - frhs[i];
        // subtract the mean-row multiplier contribution on pressure rows
        if (rs2.has_mean_row && i >= lay.num_velocity) {
            const ConstraintSet cs = make_constraints(lay, mesh, &mc, true);
            ri -= cs.mean_coeffs[i] * sol.x[rs2.n_free];
        }
        rmax = std::max(rmax, std::abs(ri));
    }
    EXPECT_LT(rmax, 1e-9 * std::max(1.0, norm2(frhs)));
}

TEST(Constraints, InhomogeneousBoundaryValuesMatchExactField) {
    const Mesh mesh = build_structured_square(4);
    const DofLayout lay = build_layout(mesh);
    const auto mc = make_case(3, 0.3, 1e-6);
    const ConstraintSet cs = make_constraints(lay, mesh, &mc, mc.zero_mean_pressure);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!mesh.vertex_boundary[v]) continue;
        const Vec2 ue = mc.u(mesh.vertices[v]);
        EXPECT_NEAR(cs.value[lay.velocity_index(lay.vertex_dof(v), 0)], ue.x, 1e-12);
        EXPECT_NEAR(cs.value[lay.velocity_index(lay.vertex_dof(v), 1)], ue.y, 1e-12);
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.edge_boundary[e]) continue;
        const Vec2 mid = (mesh.vertices[mesh.edges[e][0]] + mesh.vertices[mesh.edges[e][1]]) * 0.5;
        const Vec2 ue = mc.u(mid);
        EXPECT_NEAR(cs.value[lay.velocity_index(lay.midpoint_dof(e), 0)], ue.x, 1e-12);
        EXPECT_NEAR(cs.value[lay.velocity_index(lay.midpoint_dof(e), 1)], ue.y, 1e-12);
    }
}

TEST(Constraints, CornerPinningAgreesWithVanishingExactPressure) {
    const Mesh mesh = build_structured_square(4);
    const auto mc = make_case(2, 0.4999, 1.0);
    for (int v : mesh.corners) EXPECT_NEAR(mc.p(mesh.vertices[v]), 0.0, 1e-14);
}

TEST(InterpolateGlobal, RejectsSideDependentField) {
    const Mesh mesh = build_structured_square(2);
    const DofLayout lay = build_layout(mesh);
    // A field whose evaluation depends on which element queries it (the
    // shape of a discontinuous per-element reconstruction): repeated
    // extraction of a shared vertex value disagrees and must be rejected.
    struct SideDependent {
        mutable int calls = 0;
        Vec2 value(const Vec2& x) const { return Vec2{x.x + 0.01 * (calls++ % 7), x.y}; }
        Mat2 gradient(const Vec2&) const { return Mat2{1, 0, 0, 1}; }
    } f;
    EXPECT_THROW(interpolate_global(lay, mesh, f, vol12(), edge10()), std::runtime_error);
}

} // namespace
} // namespace sgfem
