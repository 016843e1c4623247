// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sgfem/assembly.hpp"
#include "sgfem/hardy.hpp"
#include "sgfem/io.hpp"
#include "sgfem/solutions.hpp"

namespace sgfem {

/// One batch run: command, study parameters, numerics and output options.
/// Defaults reproduce the reported grids: h in {1/8,...,1/64},
/// nu in {0.3, 0.4999}, iota in {1, 1e-6} (cases 1-3) or {1e-4, 1e-6}
/// (case 4, where the comparison target is the unperturbed limit).
struct RunConfig {
    std::string command = "convergence";
    int case_id = 1;
    std::vector<double> nus = {0.3, 0.4999};
    std::vector<double> iotas;         // empty: filled by case default
    std::vector<int> levels;           // empty: filled by command default
    double perturb = 0.0;
    std::uint64_t seed = 1;
    int quad_degree = 12;              // assembly rule
    int err_quad_degree = 14;          // error norms and loads
    double solver_tol = 1e-10;
    std::string out_dir = ".";
    std::string format = "csv";        // csv | txt (txt adds aligned tables)
    bool dump_matrix = false;          // solve command: MatrixMarket dump of the reduced system
};

inline void finalize_defaults(RunConfig& cfg) {
    if (cfg.iotas.empty())
        cfg.iotas = (cfg.case_id == 4) ? std::vector<double>{1e-4, 1e-6}
                                       : std::vector<double>{1.0, 1e-6};
    if (cfg.levels.empty()) {
        if (cfg.command == "infsup")
            cfg.levels = {4, 8, 16};
        else if (cfg.command == "hardy")
            cfg.levels = {4, 8, 16, 32};
        else
            cfg.levels = {8, 16, 32, 64};
    }
}

namespace detail {

template <typename T>
std::string join_list(const std::vector<T>& v) {
    std::ostringstream os;
    os.precision(16);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i];
    }
    return os.str();
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace detail

/// Canonical flat key = value form with sections; parsing the canonical text
/// reproduces the configuration exactly.
inline std::string canonical_text(const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(16);
    os << "[run]\n";
    os << "command = " << cfg.command << "\n";
    os << "case = " << cfg.case_id << "\n";
    os << "nu = " << detail::join_list(cfg.nus) << "\n";
    os << "iota = " << detail::join_list(cfg.iotas) << "\n";
    os << "levels = " << detail::join_list(cfg.levels) << "\n";
    os << "perturb = " << cfg.perturb << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "[numerics]\n";
    os << "quad_degree = " << cfg.quad_degree << "\n";
    os << "err_quad_degree = " << cfg.err_quad_degree << "\n";
    os << "solver_tol = " << cfg.solver_tol << "\n";
    os << "[output]\n";
    os << "out = " << cfg.out_dir << "\n";
    os << "format = " << cfg.format << "\n";
    return os.str();
}

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    cfg.nus.clear();
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '[') continue; // sections group, keys are flat
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config parse error at line " + std::to_string(lineno) +
                                     ", column " + std::to_string(line.size() + 1) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "command") cfg.command = val;
            else if (key == "case") cfg.case_id = std::stoi(val);
            else if (key == "nu") {
                cfg.nus.clear();
                for (const auto& v : detail::split_list(val)) cfg.nus.push_back(std::stod(v));
            } else if (key == "iota") {
                cfg.iotas.clear();
                for (const auto& v : detail::split_list(val)) cfg.iotas.push_back(std::stod(v));
            } else if (key == "levels") {
                cfg.levels.clear();
                for (const auto& v : detail::split_list(val)) cfg.levels.push_back(std::stoi(v));
            } else if (key == "perturb") cfg.perturb = std::stod(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "quad_degree") cfg.quad_degree = std::stoi(val);
            else if (key == "err_quad_degree") cfg.err_quad_degree = std::stoi(val);
            else if (key == "solver_tol") cfg.solver_tol = std::stod(val);
            else if (key == "out") cfg.out_dir = val;
            else if (key == "format") cfg.format = val;
            else
                throw std::runtime_error("config parse error at line " + std::to_string(lineno) +
                                         ", column 1: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("config parse error at line " + std::to_string(lineno) +
                                     ", column " + std::to_string(eq + 2) + ": bad value for " +
                                     key);
        }
    }
    if (cfg.nus.empty()) cfg.nus = {0.3, 0.4999};
    return cfg;
}

struct SolveRun {
    Mesh mesh;
    DofLayout layout;
    std::vector<double> u_coeffs;
    std::vector<double> p_coeffs;
    SolveResult solve;
    ErrorReport errors;
    double reported_rel = 0.0;
    int dofs = 0;
    SparseMatrix system_matrix; // populated only when a matrix dump is requested
};

/// Assemble, constrain, solve and measure one case on one mesh. The
/// boundary-layer case (4) reports the H1-seminorm relative error against
/// the limit solution; the iota-weighted term would measure the layer the
/// limit lacks rather than discretization quality.
inline SolveRun run_single(const ManufacturedCase& mc, int n, const RunConfig& cfg) {
    SolveRun out;
    out.mesh = build_structured_square(n, cfg.perturb, cfg.seed);
    out.layout = build_layout(out.mesh);
    auto sys = assemble(out.mesh, out.layout, mc.iota, mc.lambda, mc.mu, cfg.quad_degree);
    assemble_load(out.mesh, out.layout, mc, sys, cfg.err_quad_degree, 10);
    const auto rs = apply_constraints(out.layout, out.mesh, sys, &mc);
    out.solve = solve_indefinite(rs.matrix, rs.rhs, cfg.solver_tol);
    if (cfg.dump_matrix) out.system_matrix = rs.matrix;
    const auto full = rs.expand(out.solve.x);
    out.u_coeffs.assign(full.begin(), full.begin() + out.layout.num_velocity);
    out.p_coeffs.assign(full.begin() + out.layout.num_velocity, full.begin() + out.layout.total);
    out.errors = error_norms(out.mesh, out.layout, out.u_coeffs, out.p_coeffs, mc,
                             cfg.err_quad_degree);
    out.reported_rel = (mc.id == 4) ? out.errors.grad_err / out.errors.grad_norm
                                    : out.errors.rel_energy;
    out.dofs = out.layout.total;
    return out;
}

struct ConvergenceRow {
    double nu = 0.0, iota = 0.0;
    int n = 0;
    double h = 0.0;
    int dofs = 0;
    double rel_err = 0.0;
    double rate = 0.0; // 0 for the first level of a ladder
    double residual = 0.0;
    double residual_floor = 0.0;
    bool contract_met = false;
};

struct ConvergenceResult {
    int case_id = 0;
    std::vector<ConvergenceRow> rows;
    bool all_contracts_met = true;
};

namespace detail {

inline void write_convergence_files(const RunConfig& cfg, const ConvergenceResult& res) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string base = cfg.out_dir + "/convergence_case" + std::to_string(res.case_id);
    {
        std::ofstream csv(base + ".csv", std::ios::binary);
        write_csv_row(csv, {"case", "nu", "iota", "n", "h", "dofs", "rel_err", "rate", "residual",
                            "residual_floor", "contract_met"});
        for (const auto& r : res.rows) {
            write_csv_row(csv, {std::to_string(res.case_id), format_full(r.nu), format_full(r.iota),
                                std::to_string(r.n), format_full(r.h), std::to_string(r.dofs),
                                format_full(r.rel_err), format_full(r.rate), format_sci(r.residual),
                                format_sci(r.residual_floor), r.contract_met ? "1" : "0"});
        }
    }
    if (cfg.format == "txt") {
        std::ofstream txt(base + ".txt", std::ios::binary);
        txt << "case " << res.case_id << " relative errors and convergence rates\n";
        for (double nu : cfg.nus) {
            const LameParams lp = lame_from_poisson(nu);
            txt << "\nnu = " << format_fixed2(nu) << ", lambda = " << format_sci(lp.lambda)
                << ", mu = " << format_sci(lp.mu) << "\n";
            std::vector<std::string> header{"iota\\h"};
            for (int n : cfg.levels) header.push_back("1/" + std::to_string(n));
            std::vector<std::vector<std::string>> rows;
            for (double iota : cfg.iotas) {
                std::vector<std::string> er{format_sci(iota)}, rr{"rate"};
                for (const auto& r : res.rows) {
                    if (r.nu != nu || r.iota != iota) continue;
                    er.push_back(format_sci(r.rel_err));
                    rr.push_back(r.rate == 0.0 ? "" : format_fixed2(r.rate));
                }
                rows.push_back(er);
                rows.push_back(rr);
            }
            write_text_table(txt, header, rows);
        }
    }
}

} // namespace detail

/// Mesh ladder for every (nu, iota) pair; relative errors as reported in the
/// benchmark tables plus rate = log2 of successive error ratios.
inline ConvergenceResult cmd_convergence(RunConfig cfg) {
    finalize_defaults(cfg);
    ConvergenceResult res;
    res.case_id = cfg.case_id;
    for (double nu : cfg.nus) {
        for (double iota : cfg.iotas) {
            const auto mc = make_case(cfg.case_id, nu, iota);
            double prev = 0.0;
            for (int n : cfg.levels) {
                const auto run = run_single(mc, n, cfg);
                ConvergenceRow row;
                row.nu = nu;
                row.iota = iota;
                row.n = n;
                row.h = run.mesh.max_diameter();
                row.dofs = run.dofs;
                row.rel_err = run.reported_rel;
                row.rate = prev > 0.0 ? std::log2(prev / run.reported_rel) : 0.0;
                row.residual = run.solve.residual;
                row.residual_floor = run.solve.residual_floor;
                row.contract_met = run.solve.contract_met;
                res.all_contracts_met = res.all_contracts_met && row.contract_met;
                res.rows.push_back(row);
                prev = run.reported_rel;
            }
        }
    }
    detail::write_convergence_files(cfg, res);
    return res;
}

struct HardyCommandResult {
    RadialStudy radial;
    std::vector<std::pair<int, SeminormRatioResult>> seminorm; // (n, result)
    bool seminorm_band_ok = true;
    double band_spread = 0.0;
};

inline HardyCommandResult cmd_hardy(RunConfig cfg) {
    finalize_defaults(cfg);
    HardyCommandResult out;
    out.radial = radial_study(3, 10);
    double wmin = 0.0, wmax = 0.0;
    for (int n : cfg.levels) {
        const Mesh mesh = build_structured_square(n, cfg.perturb, cfg.seed);
        const auto r = corner_seminorm_ratio(mesh);
        out.seminorm.push_back({n, r});
        const double w = r.ratio / std::log(static_cast<double>(n) / std::sqrt(2.0));
        if (wmin == 0.0 || w < wmin) wmin = w;
        if (w > wmax) wmax = w;
    }
    out.band_spread = wmin > 0.0 ? wmax / wmin : 0.0;
    out.seminorm_band_ok = out.band_spread <= 3.0;

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream csv(cfg.out_dir + "/hardy_radial.csv", std::ios::binary);
        write_csv_row(csv, {"k", "n", "weighted_norm", "grad_norm", "ratio", "ratio_over_log"});
        for (const auto& r : out.radial.rows)
            write_csv_row(csv, {std::to_string(r.k), std::to_string(r.n), format_full(r.hardy),
                                format_full(r.grad), format_full(r.ratio),
                                format_full(r.ratio_over_log)});
        write_csv_row(csv, {"fit", "", format_full(out.radial.p_hardy),
                            format_full(out.radial.p_grad), format_full(out.radial.ratio_exponent),
                            out.radial.ratio_diffs_monotone ? "monotone" : "not-monotone"});
    }
    {
        std::ofstream csv(cfg.out_dir + "/hardy_seminorm.csv", std::ios::binary);
        write_csv_row(csv, {"n", "ratio", "ratio_over_log", "iterations", "converged"});
        for (const auto& [n, r] : out.seminorm)
            write_csv_row(csv, {std::to_string(n), format_full(r.ratio),
                                format_full(r.ratio / std::log(n / std::sqrt(2.0))),
                                std::to_string(r.iterations), r.converged ? "1" : "0"});
    }
    return out;
}

struct SolveCommandResult {
    SolveRun run;
    std::string vtk_path;
};

inline SolveCommandResult cmd_solve(RunConfig cfg) {
    finalize_defaults(cfg);
    const int n = cfg.levels.front();
    const auto mc = make_case(cfg.case_id, cfg.nus.front(), cfg.iotas.front());
    SolveCommandResult out;
    out.run = run_single(mc, n, cfg);

    const auto& mesh = out.run.mesh;
    const auto& lay = out.run.layout;
    std::vector<Vec2> u(mesh.num_vertices());
    std::vector<double> p(mesh.num_vertices()), err(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        u[v] = {out.run.u_coeffs[lay.velocity_index(lay.vertex_dof(v), 0)],
                out.run.u_coeffs[lay.velocity_index(lay.vertex_dof(v), 1)]};
        p[v] = out.run.p_coeffs[v];
        const Vec2 ue = mc.u(mesh.vertices[v]);
        err[v] = (u[v] - ue).norm();
    }
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    out.vtk_path = cfg.out_dir + "/solution_case" + std::to_string(cfg.case_id) + "_n" +
                   std::to_string(n) + ".vtk";
    std::ofstream vtk(out.vtk_path, std::ios::binary);
    write_vtk(vtk, mesh, u, p, err);
    if (cfg.dump_matrix) {
        std::ofstream mm(cfg.out_dir + "/system_case" + std::to_string(cfg.case_id) + "_n" +
                             std::to_string(n) + ".mtx",
                         std::ios::binary);
        write_matrix_market(mm, out.run.system_matrix);
    }
    return out;
}

struct InfsupRow {
    double iota = 0.0;
    int n = 0;
    double h = 0.0;
    double beta = 0.0;
    double beta_logweighted = 0.0;
    bool converged = false;
};

struct InfsupCommandResult {
    std::vector<InfsupRow> rows;
};

inline InfsupCommandResult cmd_infsup(RunConfig cfg) {
    finalize_defaults(cfg);
    InfsupCommandResult out;
    for (double iota : cfg.iotas) {
        for (int n : cfg.levels) {
            const Mesh mesh = build_structured_square(n, cfg.perturb, cfg.seed);
            const DofLayout lay = build_layout(mesh);
            const auto r = estimate_infsup(mesh, lay, iota);
            InfsupRow row;
            row.iota = iota;
            row.n = n;
            row.h = mesh.max_diameter();
            row.beta = r.beta;
            row.beta_logweighted = r.beta * std::pow(std::log(1.0 / row.h), 1.5);
            row.converged = r.converged;
            out.rows.push_back(row);
        }
    }
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::ofstream csv(cfg.out_dir + "/infsup.csv", std::ios::binary);
    write_csv_row(csv, {"iota", "n", "h", "beta", "beta_log32", "converged"});
    for (const auto& r : out.rows)
        write_csv_row(csv, {format_full(r.iota), std::to_string(r.n), format_full(r.h),
                            format_full(r.beta), format_full(r.beta_logweighted),
                            r.converged ? "1" : "0"});
    return out;
}

} // namespace sgfem
