// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "sgfem/element.hpp"
#include "sgfem/linalg.hpp"
#include "sgfem/mesh.hpp"
#include "sgfem/solutions.hpp"

namespace sgfem {

/// Global numbering for the velocity pair space and the P1 pressure space.
///
/// Scalar velocity DoFs: vertex values [0,V), midpoint values [V,V+E),
/// edge normal-derivative averages [V+E,V+2E), cell averages [V+2E,N_s).
/// Velocity components are interleaved: index = 2*scalar + component.
/// Pressure DoFs are the P1 vertex values, placed after the velocity block
/// in the assembled system.
///
/// Each interior edge's moment DoF is shared by its two triangles with
/// opposite signs relative to the canonical edge normal (the lower->higher
/// vertex direction rotated clockwise), which enforces a vanishing mean of
/// the normal-derivative jump across the edge. Boundary vertex and midpoint
/// values carry the essential condition; boundary moments stay free, which
/// leaves the double traction natural.
struct DofLayout {
    int n_vertices = 0, n_edges = 0, n_triangles = 0;
    int num_scalar = 0;
    int num_velocity = 0;
    int num_pressure = 0;
    int total = 0;

    std::vector<std::array<int, 10>> tri_scalar_dofs;
    std::vector<std::array<double, 10>> tri_signs;

    std::vector<int> fixed_velocity_dofs;    // indices in the velocity block
    std::vector<int> fixed_pressure_vertices; // corner vertex ids

    int vertex_dof(int v) const { return v; }
    int midpoint_dof(int e) const { return n_vertices + e; }
    int moment_dof(int e) const { return n_vertices + n_edges + e; }
    int mean_dof(int t) const { return n_vertices + 2 * n_edges + t; }
    int velocity_index(int scalar_dof, int comp) const { return 2 * scalar_dof + comp; }
    int pressure_index(int v) const { return num_velocity + v; }
};

inline DofLayout build_layout(const Mesh& mesh) {
    DofLayout lay;
    lay.n_vertices = mesh.num_vertices();
    lay.n_edges = mesh.num_edges();
    lay.n_triangles = mesh.num_triangles();
    lay.num_scalar = lay.n_vertices + 2 * lay.n_edges + lay.n_triangles;
    lay.num_velocity = 2 * lay.num_scalar;
    lay.num_pressure = lay.n_vertices;
    lay.total = lay.num_velocity + lay.num_pressure;

    lay.tri_scalar_dofs.resize(lay.n_triangles);
    lay.tri_signs.resize(lay.n_triangles);
    for (int t = 0; t < lay.n_triangles; ++t) {
        const auto& tri = mesh.triangles[t];
        auto& dofs = lay.tri_scalar_dofs[t];
        auto& signs = lay.tri_signs[t];
        signs.fill(1.0);
        for (int i = 0; i < 3; ++i) {
            dofs[i] = lay.vertex_dof(tri[i]);
            dofs[3 + i] = lay.midpoint_dof(mesh.tri_edges[t][i]);
            dofs[6 + i] = lay.moment_dof(mesh.tri_edges[t][i]);
            signs[6 + i] = static_cast<double>(mesh.tri_edge_signs[t][i]);
        }
        dofs[9] = lay.mean_dof(t);
    }

    for (int v = 0; v < lay.n_vertices; ++v) {
        if (!mesh.vertex_boundary[v]) continue;
        lay.fixed_velocity_dofs.push_back(lay.velocity_index(lay.vertex_dof(v), 0));
        lay.fixed_velocity_dofs.push_back(lay.velocity_index(lay.vertex_dof(v), 1));
    }
    for (int e = 0; e < lay.n_edges; ++e) {
        if (!mesh.edge_boundary[e]) continue;
        lay.fixed_velocity_dofs.push_back(lay.velocity_index(lay.midpoint_dof(e), 0));
        lay.fixed_velocity_dofs.push_back(lay.velocity_index(lay.midpoint_dof(e), 1));
    }
    lay.fixed_pressure_vertices = mesh.corners;
    return lay;
}

namespace detail {

template <typename VectorField>
struct ComponentField {
    const VectorField* f;
    int comp;
    double value(const Vec2& x) const {
        const Vec2 v = f->value(x);
        return comp == 0 ? v.x : v.y;
    }
    Vec2 gradient(const Vec2& x) const {
        const Mat2 g = f->gradient(x);
        return comp == 0 ? Vec2{g.a11, g.a12} : Vec2{g.a21, g.a22};
    }
};

} // namespace detail

/// Componentwise application of the local interpolation on every element,
/// with moment signs mapped to the canonical edge orientation. Shared DoFs
/// extracted from both sides must agree; a mismatch beyond 1e-9 signals a
/// field that is not smooth across edges.
template <typename VectorField>
inline std::vector<double> interpolate_global(const DofLayout& lay, const Mesh& mesh,
                                              const VectorField& field,
                                              const TriangleRule& vol_rule,
                                              const EdgeRule& e_rule) {
    std::vector<double> coeffs(lay.num_velocity, 0.0);
    std::vector<char> seen(lay.num_velocity, 0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.triangle_coords(t);
        const auto geom = make_geometry(c[0], c[1], c[2]);
        for (int comp = 0; comp < 2; ++comp) {
            const detail::ComponentField<VectorField> cf{&field, comp};
            const auto local = dof_functionals(geom, cf, vol_rule, e_rule);
            for (int i = 0; i < 10; ++i) {
                const int g = lay.velocity_index(lay.tri_scalar_dofs[t][i], comp);
                const double v = local[i] * lay.tri_signs[t][i]; // sign in {-1,1}
                if (!seen[g]) {
                    coeffs[g] = v;
                    seen[g] = 1;
                } else if (std::abs(coeffs[g] - v) > 1e-9 * std::max(1.0, std::abs(v))) {
                    throw std::runtime_error(
                        "interpolate_global: inconsistent shared DoF (field not conforming)");
                }
            }
        }
    }
    return coeffs;
}

/// Fixed DoFs and their values, plus the optional zero-mean pressure row.
struct ConstraintSet {
    std::vector<char> fixed;   // size = layout.total
    std::vector<double> value; // boundary values for fixed DoFs
    bool pressure_mean_row = false;
    std::vector<double> mean_coeffs; // full-size; integral of each free pressure hat
};

/// Homogeneous constraints, or boundary interpolation of bc_case's
/// displacement at boundary vertices and midpoints. Pressure corners are
/// always pinned to zero. The zero-mean row follows the case flag (dropped
/// when the exact pressure has nonzero mean, where the penalty block already
/// removes the constant mode).
inline ConstraintSet make_constraints(const DofLayout& lay, const Mesh& mesh,
                                      const ManufacturedCase* bc_case, bool mean_row) {
    ConstraintSet cs;
    cs.fixed.assign(lay.total, 0);
    cs.value.assign(lay.total, 0.0);
    for (int d : lay.fixed_velocity_dofs) cs.fixed[d] = 1;
    for (int v : lay.fixed_pressure_vertices) cs.fixed[lay.pressure_index(v)] = 1;

    if (bc_case != nullptr && !bc_case->homogeneous_bc) {
        for (int v = 0; v < lay.n_vertices; ++v) {
            if (!mesh.vertex_boundary[v]) continue;
            const Vec2 uv = bc_case->u(mesh.vertices[v]);
            cs.value[lay.velocity_index(lay.vertex_dof(v), 0)] = uv.x;
            cs.value[lay.velocity_index(lay.vertex_dof(v), 1)] = uv.y;
        }
        for (int e = 0; e < lay.n_edges; ++e) {
            if (!mesh.edge_boundary[e]) continue;
            const Vec2 mid = (mesh.vertices[mesh.edges[e][0]] + mesh.vertices[mesh.edges[e][1]]) * 0.5;
            const Vec2 um = bc_case->u(mid);
            cs.value[lay.velocity_index(lay.midpoint_dof(e), 0)] = um.x;
            cs.value[lay.velocity_index(lay.midpoint_dof(e), 1)] = um.y;
        }
        // Corner pins carry the exact pressure value: pinning to zero when
        // the exact pressure does not vanish there injects an O(h)
        // consistency error that caps the convergence rate at one.
        for (int v : lay.fixed_pressure_vertices)
            cs.value[lay.pressure_index(v)] = bc_case->p(mesh.vertices[v]);
    }

    cs.pressure_mean_row = mean_row;
    if (mean_row) {
        cs.mean_coeffs.assign(lay.total, 0.0);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const double third = mesh.triangle_area(t) / 3.0;
            for (int i = 0; i < 3; ++i) {
                const int g = lay.pressure_index(mesh.triangles[t][i]);
                if (!cs.fixed[g]) cs.mean_coeffs[g] += third;
            }
        }
    }
    return cs;
}

/// Constrained system after eliminating fixed DoFs; the optional zero-mean
/// pressure constraint is kept as one appended multiplier row.
struct ReducedSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
    std::vector<int> free_to_full;
    std::vector<int> full_to_free;
    std::vector<double> lifting; // full-size, fixed DoFs carry their values
    int n_free = 0;
    bool has_mean_row = false;

    /// Full coefficient vector from the reduced solution.
    std::vector<double> expand(const std::vector<double>& xr) const {
        std::vector<double> full = lifting;
        for (int i = 0; i < n_free; ++i) full[free_to_full[i]] = xr[i];
        return full;
    }
};

/// Eliminate fixed DoFs from a symmetric full system given as triplets:
/// known columns move to the right-hand side via the lifting values.
inline ReducedSystem reduce_system(int full_size, const std::vector<Triplet>& full_triplets,
                                   const std::vector<double>& full_rhs, const ConstraintSet& cs) {
    ReducedSystem rs;
    rs.full_to_free.assign(full_size, -1);
    rs.lifting.assign(full_size, 0.0);
    for (int i = 0; i < full_size; ++i) {
        if (cs.fixed[i]) {
            rs.lifting[i] = cs.value[i];
        } else {
            rs.full_to_free[i] = rs.n_free++;
            rs.free_to_full.push_back(i);
        }
    }
    rs.has_mean_row = cs.pressure_mean_row;
    const int dim = rs.n_free + (rs.has_mean_row ? 1 : 0);

    rs.rhs.assign(dim, 0.0);
    for (int i = 0; i < full_size; ++i)
        if (rs.full_to_free[i] >= 0) rs.rhs[rs.full_to_free[i]] = full_rhs[i];

    std::vector<Triplet> red;
    red.reserve(full_triplets.size());
    for (const auto& t : full_triplets) {
        const int ri = rs.full_to_free[t.row];
        const int rj = rs.full_to_free[t.col];
        if (ri >= 0 && rj >= 0) {
            red.push_back({ri, rj, t.value});
        } else if (ri >= 0 && rj < 0) {
            rs.rhs[ri] -= t.value * rs.lifting[t.col];
        }
    }
    if (rs.has_mean_row) {
        const int mr = rs.n_free;
        for (int i = 0; i < full_size; ++i) {
            const int ri = rs.full_to_free[i];
            if (ri < 0 || cs.mean_coeffs[i] == 0.0) continue;
            red.push_back({ri, mr, cs.mean_coeffs[i]});
            red.push_back({mr, ri, cs.mean_coeffs[i]});
        }
    }
    rs.matrix = SparseMatrix::from_triplets(dim, dim, red);
    return rs;
}

} // namespace sgfem
