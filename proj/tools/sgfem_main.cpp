// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
//
// Batch front-end: convergence studies, Hardy-inequality studies, single
// solves with VTK export, and inf-sup probes.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "sgfem/runner.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    bool dump_matrix = false;
    std::vector<double> nus, iotas;
    std::vector<int> levels;
    int case_id = 1;
    double perturb = 0.0, solver_tol = 1e-10;
    std::uint64_t seed = 1;
    int quad_degree = 12;
    std::string out_dir = ".", format = "csv";
};

void add_common_options(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.config_path, "configuration file (key = value); command line wins");
    cmd->add_option("--case", o.case_id, "benchmark case id 1..4");
    cmd->add_option("--nu", o.nus, "Poisson ratio (repeatable)")->delimiter(',');
    cmd->add_option("--iota", o.iotas, "microscopic length parameter (repeatable)")->delimiter(',');
    cmd->add_option("--levels", o.levels, "mesh subdivisions per side (repeatable)")->delimiter(',');
    cmd->add_option("--perturb", o.perturb, "interior vertex perturbation fraction in [0,0.3)");
    cmd->add_option("--seed", o.seed, "perturbation seed");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--format", o.format, "csv | txt")->check(CLI::IsMember({"csv", "txt"}));
    cmd->add_option("--solver-tol", o.solver_tol, "relative residual contract");
    cmd->add_option("--quad-degree", o.quad_degree, "assembly quadrature degree");
    if (cmd->get_name() == "solve")
        cmd->add_flag("--dump-matrix", o.dump_matrix, "write the reduced system in MatrixMarket form");
}

sgfem::RunConfig merge(const CLI::App* cmd, const CliOverrides& o, const std::string& command) {
    sgfem::RunConfig cfg;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw std::runtime_error("cannot open config file " + o.config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        cfg = sgfem::parse_config_text(ss.str());
    }
    cfg.command = command;
    if (cmd->count("--case")) cfg.case_id = o.case_id;
    if (cmd->count("--nu")) cfg.nus = o.nus;
    if (cmd->count("--iota")) cfg.iotas = o.iotas;
    if (cmd->count("--levels")) cfg.levels = o.levels;
    if (cmd->count("--perturb")) cfg.perturb = o.perturb;
    if (cmd->count("--seed")) cfg.seed = o.seed;
    if (cmd->count("--out")) cfg.out_dir = o.out_dir;
    if (cmd->count("--format")) cfg.format = o.format;
    if (cmd->count("--solver-tol")) cfg.solver_tol = o.solver_tol;
    if (cmd->count("--quad-degree")) cfg.quad_degree = o.quad_degree;
    if (cmd->get_option_no_throw("--dump-matrix") && cmd->count("--dump-matrix"))
        cfg.dump_matrix = o.dump_matrix;
    sgfem::finalize_defaults(cfg);
    return cfg;
}

void print_convergence(const sgfem::RunConfig& cfg, const sgfem::ConvergenceResult& res) {
    std::cout << "case " << res.case_id << " relative errors and convergence rates\n";
    for (double nu : cfg.nus) {
        const auto lp = sgfem::lame_from_poisson(nu);
        std::cout << "\nnu = " << nu << ", lambda = " << sgfem::format_sci(lp.lambda)
                  << ", mu = " << sgfem::format_sci(lp.mu) << "\n";
        std::vector<std::string> header{"iota\\h"};
        for (int n : cfg.levels) header.push_back("1/" + std::to_string(n));
        std::vector<std::vector<std::string>> rows;
        for (double iota : cfg.iotas) {
            std::vector<std::string> er{sgfem::format_sci(iota)}, rr{"rate"};
            for (const auto& r : res.rows) {
                if (r.nu != nu || r.iota != iota) continue;
                er.push_back(sgfem::format_sci(r.rel_err));
                rr.push_back(r.rate == 0.0 ? "" : sgfem::format_fixed2(r.rate));
            }
            rows.push_back(er);
            rows.push_back(rr);
        }
        sgfem::write_text_table(std::cout, header, rows);
    }
    double worst = 0.0;
    for (const auto& r : res.rows) worst = std::max(worst, r.residual);
    std::cout << "\nmax solver residual " << sgfem::format_sci(worst)
              << (res.all_contracts_met ? " (contract met)" : " (CONTRACT MISSED)") << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D mixed finite elements for strain gradient elasticity with natural "
                 "boundary conditions, plus Hardy-inequality probes"};
    app.require_subcommand(1);

    CliOverrides o;
    auto* conv = app.add_subcommand("convergence", "mesh-ladder convergence study");
    auto* hardy = app.add_subcommand("hardy", "radial blow-up and corner seminorm studies");
    auto* solve = app.add_subcommand("solve", "single solve with VTK export");
    auto* infsup = app.add_subcommand("infsup", "discrete inf-sup constant ladder");
    for (auto* c : {conv, hardy, solve, infsup}) add_common_options(c, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (conv->parsed()) {
            const auto cfg = merge(conv, o, "convergence");
            const auto res = sgfem::cmd_convergence(cfg);
            print_convergence(cfg, res);
            return res.all_contracts_met ? 0 : 2;
        }
        if (hardy->parsed()) {
            const auto cfg = merge(hardy, o, "hardy");
            const auto res = sgfem::cmd_hardy(cfg);
            std::cout << "radial study (d = 2), n = 2^3 .. 2^10\n";
            std::vector<std::vector<std::string>> rows;
            for (const auto& r : res.radial.rows)
                rows.push_back({std::to_string(r.n), sgfem::format_sci(r.hardy),
                                sgfem::format_sci(r.grad), sgfem::format_sci(r.ratio),
                                sgfem::format_sci(r.ratio_over_log)});
            sgfem::write_text_table(std::cout,
                                    {"n", "||f/rho||", "||grad f||", "ratio", "ratio/log"}, rows);
            std::cout << "fitted exponents: weighted " << sgfem::format_fixed2(res.radial.p_hardy)
                      << " (expected 1.50), gradient " << sgfem::format_fixed2(res.radial.p_grad)
                      << " (expected 0.50), ratio " << sgfem::format_fixed2(res.radial.ratio_exponent)
                      << " (expected 1.00)\n";
            std::cout << "\ncorner seminorm ratio on the unit square\n";
            rows.clear();
            for (const auto& [n, r] : res.seminorm)
                rows.push_back({std::to_string(n), sgfem::format_sci(r.ratio),
                                sgfem::format_sci(r.ratio / std::log(n / std::sqrt(2.0))),
                                r.converged ? "yes" : "NO"});
            sgfem::write_text_table(std::cout, {"n", "ratio", "ratio/log", "converged"}, rows);
            std::cout << "band spread (max/min of ratio/log) = "
                      << sgfem::format_fixed2(res.band_spread)
                      << (res.seminorm_band_ok ? " (within factor 3)\n" : " (outside factor 3)\n");
            return 0;
        }
        if (solve->parsed()) {
            const auto cfg = merge(solve, o, "solve");
            const auto res = sgfem::cmd_solve(cfg);
            std::cout << "case " << cfg.case_id << ", n = " << cfg.levels.front()
                      << ": " << res.run.dofs << " DoFs, residual "
                      << sgfem::format_sci(res.run.solve.residual) << ", relative error "
                      << sgfem::format_sci(res.run.reported_rel) << "\n";
            std::cout << "wrote " << res.vtk_path << "\n";
            return res.run.solve.contract_met ? 0 : 2;
        }
        if (infsup->parsed()) {
            const auto cfg = merge(infsup, o, "infsup");
            const auto res = sgfem::cmd_infsup(cfg);
            std::vector<std::vector<std::string>> rows;
            for (const auto& r : res.rows)
                rows.push_back({sgfem::format_sci(r.iota), std::to_string(r.n),
                                sgfem::format_sci(r.beta), sgfem::format_sci(r.beta_logweighted),
                                r.converged ? "yes" : "NO"});
            sgfem::write_text_table(std::cout, {"iota", "n", "beta", "beta*log^1.5", "converged"},
                                    rows);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
