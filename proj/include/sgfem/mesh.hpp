// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sgfem/geometry.hpp"

namespace sgfem {

/// Conforming triangulation with edge topology.
///
/// Triangles are counterclockwise. Edges are deduplicated with the canonical
/// orientation lower vertex index -> higher. tri_edges[t][i] is the edge
/// opposite local vertex i (so it joins local vertices i+1 and i+2), and
/// tri_edge_signs[t][i] is +1 when the CCW traversal of that edge inside t
/// runs in canonical direction. The mesh is immutable after construction.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> tri_edges;
    std::vector<std::array<int, 3>> tri_edge_signs;
    std::vector<char> vertex_boundary;
    std::vector<char> edge_boundary;
    std::vector<int> corners;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }

    std::array<Vec2, 3> triangle_coords(int t) const {
        const auto& tri = triangles[t];
        return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
    }

    double triangle_area(int t) const {
        const auto c = triangle_coords(t);
        return signed_area(c[0], c[1], c[2]);
    }

    /// Longest edge of triangle t (the diameter for triangles).
    double triangle_diameter(int t) const {
        const auto c = triangle_coords(t);
        return std::max({(c[1] - c[0]).norm(), (c[2] - c[1]).norm(), (c[0] - c[2]).norm()});
    }

    /// Inradius of triangle t.
    double triangle_inradius(int t) const {
        const auto c = triangle_coords(t);
        const double per = (c[1] - c[0]).norm() + (c[2] - c[1]).norm() + (c[0] - c[2]).norm();
        return 2.0 * std::abs(signed_area(c[0], c[1], c[2])) / per;
    }

    double max_diameter() const {
        double h = 0.0;
        for (int t = 0; t < num_triangles(); ++t) h = std::max(h, triangle_diameter(t));
        return h;
    }
};

/// Build edges, incidence and boundary flags from vertices + triangles.
/// Throws if an edge is shared by more than two triangles.
inline void finalize_topology(Mesh& mesh) {
    mesh.edges.clear();
    mesh.tri_edges.assign(mesh.triangles.size(), {-1, -1, -1});
    mesh.tri_edge_signs.assign(mesh.triangles.size(), {0, 0, 0});

    std::map<std::array<int, 2>, int> edge_id;
    std::vector<int> incidence_count;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int a = tri[(i + 1) % 3];
            const int b = tri[(i + 2) % 3];
            const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
            auto [it, inserted] = edge_id.try_emplace(key, static_cast<int>(mesh.edges.size()));
            if (inserted) {
                mesh.edges.push_back(key);
                incidence_count.push_back(0);
            }
            const int e = it->second;
            if (++incidence_count[e] > 2)
                throw std::runtime_error("finalize_topology: edge shared by more than two triangles");
            mesh.tri_edges[t][i] = e;
            mesh.tri_edge_signs[t][i] = (a < b) ? 1 : -1;
        }
    }

    mesh.edge_boundary.assign(mesh.edges.size(), 0);
    mesh.vertex_boundary.assign(mesh.vertices.size(), 0);
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        if (incidence_count[e] == 1) {
            mesh.edge_boundary[e] = 1;
            mesh.vertex_boundary[mesh.edges[e][0]] = 1;
            mesh.vertex_boundary[mesh.edges[e][1]] = 1;
        }
    }
}

namespace detail {

/// Deterministic uniform double in [-1,1) from a 64-bit generator state.
template <typename Gen>
inline double symmetric_uniform(Gen& gen) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53; // [0,1)
    return 2.0 * u - 1.0;
}

} // namespace detail

/// Structured triangulation of the unit square: n x n cells, each split along
/// the (0,0)-(1,1) diagonal. perturb in [0, 0.3) displaces interior vertices
/// by seeded uniform offsets bounded by perturb/n; if that flips a triangle
/// the magnitude is halved once before failing.
inline Mesh build_structured_square(int n, double perturb = 0.0, std::uint64_t seed = 1) {
    require(n >= 1, "build_structured_square: n must be >= 1");
    require(perturb >= 0.0 && perturb < 0.3, "build_structured_square: perturb must be in [0, 0.3)");

    Mesh mesh;
    const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    mesh.vertices.resize(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.vertices[vid(i, j)] = {static_cast<double>(i) / n, static_cast<double>(j) / n};

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }

    if (perturb > 0.0 && n >= 2) {
        const auto displace = [&](double amplitude) {
            std::mt19937_64 gen(seed);
            for (int j = 0; j <= n; ++j) {
                for (int i = 0; i <= n; ++i) {
                    const double dx = detail::symmetric_uniform(gen) * amplitude;
                    const double dy = detail::symmetric_uniform(gen) * amplitude;
                    if (i > 0 && i < n && j > 0 && j < n) {
                        mesh.vertices[vid(i, j)] = {static_cast<double>(i) / n + dx,
                                                    static_cast<double>(j) / n + dy};
                    }
                }
            }
        };
        const auto min_area = [&]() {
            double m = 1.0;
            for (int t = 0; t < mesh.num_triangles(); ++t) m = std::min(m, mesh.triangle_area(t));
            return m;
        };
        displace(perturb / n);
        if (min_area() <= 0.0) {
            displace(0.5 * perturb / n);
            if (min_area() <= 0.0)
                throw std::runtime_error("build_structured_square: perturbation flips a triangle even after halving");
        }
    }

    mesh.corners = {vid(0, 0), vid(n, 0), vid(n, n), vid(0, n)};
    finalize_topology(mesh);
    return mesh;
}

/// Polar triangulation of the unit disk with a mesh vertex at the origin.
/// Rings at radii i/n_rings with n_sectors equally spaced angles; the
/// innermost ring is a fan around the origin. The corner set is {origin}.
inline Mesh build_polar_disk(int n_rings, int n_sectors) {
    require(n_rings >= 1, "build_polar_disk: n_rings must be >= 1");
    require(n_sectors >= 3, "build_polar_disk: n_sectors must be >= 3");

    Mesh mesh;
    mesh.vertices.push_back({0.0, 0.0});
    const auto vid = [n_sectors](int ring, int j) {
        return 1 + (ring - 1) * n_sectors + (j % n_sectors);
    };
    for (int ring = 1; ring <= n_rings; ++ring) {
        const double r = static_cast<double>(ring) / n_rings;
        for (int j = 0; j < n_sectors; ++j) {
            const double th = 2.0 * M_PI * j / n_sectors;
            mesh.vertices.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }

    for (int j = 0; j < n_sectors; ++j)
        mesh.triangles.push_back({0, vid(1, j), vid(1, j + 1)});
    for (int ring = 2; ring <= n_rings; ++ring) {
        for (int j = 0; j < n_sectors; ++j) {
            mesh.triangles.push_back({vid(ring - 1, j), vid(ring, j), vid(ring, j + 1)});
            mesh.triangles.push_back({vid(ring - 1, j), vid(ring, j + 1), vid(ring - 1, j + 1)});
        }
    }

    mesh.corners = {0};
    finalize_topology(mesh);
    return mesh;
}

struct MeshCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct MeshReport {
    std::vector<MeshCheck> checks;
    double h = 0.0;          // max_K h_K
    double min_h_K = 0.0;
    double max_quality = 0.0; // max_K h_K / rho_K
    double h_ratio = 0.0;     // max_K h_K / min_K h_K

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    const MeshCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// Run every mesh invariant; failures become report entries, not errors.
inline MeshReport validate(const Mesh& mesh, double sigma1 = 12.0, double sigma2 = 6.0) {
    MeshReport rep;
    std::ostringstream detail;

    bool positive = true;
    double min_area = std::numeric_limits<double>::max();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double a = mesh.triangle_area(t);
        min_area = std::min(min_area, a);
        if (a <= 0.0) positive = false;
    }
    detail << "min signed area " << min_area;
    rep.checks.push_back({"positive area", positive, detail.str()});

    std::vector<int> incidence(mesh.edges.size(), 0);
    for (const auto& te : mesh.tri_edges)
        for (int e : te) ++incidence[e];
    bool manifold = true;
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        const int expect = mesh.edge_boundary[e] ? 1 : 2;
        if (incidence[e] != expect) manifold = false;
    }
    rep.checks.push_back({"edge incidence", manifold, "interior edges bound 2 triangles, boundary edges 1"});

    const int euler = mesh.num_vertices() - mesh.num_edges() + mesh.num_triangles();
    rep.checks.push_back({"euler relation", euler == 1, "V-E+T = " + std::to_string(euler)});

    double max_h = 0.0, min_h = std::numeric_limits<double>::max(), max_q = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double hk = mesh.triangle_diameter(t);
        const double rk = mesh.triangle_inradius(t);
        max_h = std::max(max_h, hk);
        min_h = std::min(min_h, hk);
        if (rk > 0.0) max_q = std::max(max_q, hk / rk);
    }
    rep.h = max_h;
    rep.min_h_K = min_h;
    rep.max_quality = max_q;
    rep.h_ratio = (min_h > 0.0) ? max_h / min_h : 0.0;
    rep.checks.push_back({"shape regularity", max_q <= sigma1,
                          "max h_K/rho_K = " + std::to_string(max_q)});
    rep.checks.push_back({"inverse assumption", rep.h_ratio <= sigma2,
                          "max h_K / min h_K = " + std::to_string(rep.h_ratio)});
    return rep;
}

/// Plain-text mesh format: one section per entity array.
inline void write_mesh_text(std::ostream& os, const Mesh& mesh) {
    os << "vertices " << mesh.num_vertices() << "\n";
    os.precision(17);
    for (const auto& v : mesh.vertices) os << v.x << " " << v.y << "\n";
    os << "triangles " << mesh.num_triangles() << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "corners " << mesh.corners.size() << "\n";
    for (int c : mesh.corners) os << c << "\n";
}

inline Mesh read_mesh_text(std::istream& is) {
    Mesh mesh;
    std::string section;
    int count = 0;
    while (is >> section >> count) {
        if (section == "vertices") {
            mesh.vertices.resize(count);
            for (auto& v : mesh.vertices) is >> v.x >> v.y;
        } else if (section == "triangles") {
            mesh.triangles.resize(count);
            for (auto& t : mesh.triangles) is >> t[0] >> t[1] >> t[2];
        } else if (section == "corners") {
            mesh.corners.resize(count);
            for (auto& c : mesh.corners) is >> c;
        } else {
            throw std::runtime_error("read_mesh_text: unknown section '" + section + "'");
        }
    }
    require(!mesh.vertices.empty() && !mesh.triangles.empty(), "read_mesh_text: missing sections");
    finalize_topology(mesh);
    return mesh;
}

} // namespace sgfem
