// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "sgfem/geometry.hpp"
#include "sgfem/mesh.hpp"

namespace sgfem {

inline std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

inline std::string format_fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

/// RFC-4180 CSV: comma separators, quoting only when a field needs it.
inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string& f = fields[i];
        const bool quote = f.find_first_of(",\"\n") != std::string::npos;
        if (i) os << ",";
        if (quote) {
            os << '"';
            for (char c : f) {
                if (c == '"') os << '"';
                os << c;
            }
            os << '"';
        } else {
            os << f;
        }
    }
    os << "\r\n";
}

/// Aligned text table with left-justified first column.
inline void write_text_table(std::ostream& os, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
    for (const auto& r : rows)
        for (std::size_t j = 0; j < r.size() && j < width.size(); ++j)
            width[j] = std::max(width[j], r[j].size());
    auto emit = [&](const std::vector<std::string>& r) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            os << r[j];
            if (j + 1 < r.size()) os << std::string(width[j] - r[j].size() + 2, ' ');
        }
        os << "\n";
    };
    emit(header);
    for (const auto& r : rows) emit(r);
}

/// Legacy ASCII VTK unstructured grid of the bare triangulation.
inline void write_vtk_mesh(std::ostream& os, const Mesh& mesh,
                           const std::string& title = "sgfem mesh") {
    os << "# vtk DataFile Version 3.0\n";
    os << title << "\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_vertices() << " double\n";
    os.precision(12);
    for (const auto& v : mesh.vertices) os << v.x << " " << v.y << " 0\n";
    os << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
    for (const auto& t : mesh.triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "CELL_TYPES " << mesh.num_triangles() << "\n";
    for (int t = 0; t < mesh.num_triangles(); ++t) os << "5\n";
}

/// Legacy ASCII VTK unstructured grid with vertex-sampled point data.
/// err may be empty; u and p must have one entry per mesh vertex.
inline void write_vtk(std::ostream& os, const Mesh& mesh, const std::vector<Vec2>& u,
                      const std::vector<double>& p, const std::vector<double>& err,
                      const std::string& title = "sgfem solution") {
    write_vtk_mesh(os, mesh, title);
    os << "POINT_DATA " << mesh.num_vertices() << "\n";
    os << "VECTORS displacement double\n";
    for (const auto& v : u) os << v.x << " " << v.y << " 0\n";
    os << "SCALARS pressure double 1\n";
    os << "LOOKUP_TABLE default\n";
    for (double v : p) os << v << "\n";
    if (!err.empty()) {
        os << "SCALARS displacement_error double 1\n";
        os << "LOOKUP_TABLE default\n";
        for (double v : err) os << v << "\n";
    }
}

} // namespace sgfem
