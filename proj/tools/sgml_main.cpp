/// @file sgml_main.cpp
/// @brief Command-line driver: convergence, deform, trifoil, capacitor, bench.
///
/// Every run writes its machine-readable report before the process decides
/// its exit code, so non-converged runs still leave a full record behind.
/// Exit codes: 0 success, 2 reported non-convergence, 1 input errors.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "sgml/cycle.hpp"
#include "sgml/io.hpp"
#include "sgml/problems.hpp"

namespace {

struct RunConfig {
    int n = 7;
    int n_r = 2;
    double tol = 1e-12;
    int max_cycles = 50;
    double safety = 0.9;
    double a = 0.1;
    double r = 0.14;
    std::string mode = "high";
    std::string curve_path;
    std::string seeds_path;
    double t = 0.0;   // 0 = per-command default
    int steps = 0;    // 0 = per-command default
    std::string out = ".";
    int threads = 0;
};

sgml::SolverConfig solver_config(const RunConfig& cfg) {
    sgml::SolverConfig sc;
    sc.n_r = cfg.n_r;
    sc.tol = cfg.tol;
    sc.max_cycles = cfg.max_cycles;
    sc.safety = cfg.safety;
    return sc;
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void prepare_out(const RunConfig& cfg) {
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    std::filesystem::create_directories(cfg.out);
}

int exit_code(const sgml::SolveReport& report) {
    return report.converged ? 0 : 2;
}

void print_summary(const char* label, const sgml::SolveReport& rep) {
    if (rep.rows.empty()) {
        std::cout << label << ": no cycles recorded\n";
        return;
    }
    const sgml::CycleRecord& last = rep.rows.back();
    std::cout << label << ": " << (rep.converged ? "converged" : "NOT converged")
              << " after " << rep.rows.size() << " cycle(s), residual "
              << sgml::format_double(last.residual) << ", work units "
              << last.work_units;
    if (last.l1_error)
        std::cout << ", l1 error " << sgml::format_double(*last.l1_error);
    std::cout << '\n';
    if (rep.nan_detected) std::cout << label << ": non-finite values detected\n";
    if (rep.stagnated) std::cout << label << ": residual stagnated\n";
}

// ============================================================================
// convergence
// ============================================================================

int cmd_convergence(const RunConfig& cfg) {
    prepare_out(cfg);
    const sgml::ProblemSpec prob = sgml::poisson2d_problem(cfg.n);
    const sgml::SolveResult res = sgml::solve(prob, solver_config(cfg));
    sgml::write_report_csv(res.report, join(cfg.out, "report.csv"));
    sgml::write_trace_csv(res.report, join(cfg.out, "trace.csv"));
    sgml::write_field_vtk(res.u, join(cfg.out, "u.vtk"), "u");
    print_summary("convergence", res.report);
    return exit_code(res.report);
}

// ============================================================================
// deform
// ============================================================================

int cmd_deform(const RunConfig& cfg) {
    if (cfg.curve_path.empty())
        throw std::invalid_argument("deform: --curve PATH is required");
    prepare_out(cfg);

    sgml::Curve curve;
    curve.points = sgml::read_points_csv(cfg.curve_path);
    curve.closed = true;

    const sgml::DeformationSetup setup =
        sgml::deformation_problem(curve, cfg.a, cfg.n);
    const sgml::SolveResult res = sgml::solve(setup.problem, solver_config(cfg));
    sgml::write_report_csv(res.report, join(cfg.out, "report.csv"));
    sgml::write_trace_csv(res.report, join(cfg.out, "trace.csv"));
    sgml::write_field_vtk(res.u, join(cfg.out, "u.vtk"), "u");

    const double horizon = cfg.t > 0.0 ? cfg.t : 1.0;
    const int steps = cfg.steps > 0 ? cfg.steps : 50;
    const std::vector<sgml::Point> nodes =
        sgml::move_nodes(res.u, setup.f_raw, setup.raw_integral, horizon, steps);
    sgml::write_points_csv(nodes, setup.problem.grid.dim, join(cfg.out, "nodes.csv"));

    print_summary("deform", res.report);
    return exit_code(res.report);
}

// ============================================================================
// trifoil
// ============================================================================

int cmd_trifoil(const RunConfig& cfg) {
    prepare_out(cfg);
    const sgml::TrifoilSetup setup = sgml::trifoil_problem(cfg.n, cfg.r);
    const sgml::SolverConfig sc = solver_config(cfg);

    sgml::VectorField psi(setup.psi[0].grid);
    bool converged = true;
    const char* report_names[3] = {"report.csv", "report_psi_y.csv", "report_psi_z.csv"};
    const char* trace_names[3] = {"trace.csv", "trace_psi_y.csv", "trace_psi_z.csv"};
    for (int c = 0; c < 3; ++c) {
        const sgml::SolveResult res = sgml::solve(setup.psi[c], sc);
        sgml::write_report_csv(res.report, join(cfg.out, report_names[c]));
        sgml::write_trace_csv(res.report, join(cfg.out, trace_names[c]));
        const char* labels[3] = {"psi_x", "psi_y", "psi_z"};
        print_summary(labels[c], res.report);
        converged = converged && res.report.converged;
        psi.comp[static_cast<std::size_t>(c)] = res.u;
    }
    sgml::write_vector_vtk(psi, join(cfg.out, "psi.vtk"), "psi");

    const sgml::VectorField v = sgml::curl(psi);
    sgml::write_vector_vtk(v, join(cfg.out, "v.vtk"), "velocity");

    std::vector<sgml::Point> seeds;
    if (!cfg.seeds_path.empty()) {
        seeds = sgml::read_points_csv(cfg.seeds_path);
    } else {
        seeds = {{0.5, 0.5, 0.5}, {0.35, 0.5, 0.5}};
    }
    const double step = cfg.t > 0.0 ? cfg.t : 0.01;
    const int max_steps = cfg.steps > 0 ? cfg.steps : 2000;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const sgml::Streamline line =
            sgml::integrate_streamline(v, seeds[s], step, max_steps);
        sgml::write_points_csv(line.points, 3,
                               join(cfg.out, "streamline_" + std::to_string(s) + ".csv"));
    }
    return converged ? 0 : 2;
}

// ============================================================================
// capacitor
// ============================================================================

int cmd_capacitor(const RunConfig& cfg) {
    prepare_out(cfg);
    const sgml::ProblemSpec prob = sgml::capacitor_problem(cfg.n, cfg.mode);
    const sgml::SolveResult res = sgml::solve(prob, solver_config(cfg));
    sgml::write_report_csv(res.report, join(cfg.out, "report.csv"));
    sgml::write_trace_csv(res.report, join(cfg.out, "trace.csv"));
    sgml::write_field_vtk(res.u, join(cfg.out, "u.vtk"), "u");
    const sgml::VectorField force = sgml::gradient(res.u);
    sgml::write_vector_vtk(force, join(cfg.out, "F.vtk"), "F");
    print_summary("capacitor", res.report);
    return exit_code(res.report);
}

// ============================================================================
// bench
// ============================================================================

int cmd_bench(const RunConfig& cfg) {
    prepare_out(cfg);
    const int n_hi = cfg.n;
    const int n_lo = std::max(2, n_hi - 4);

    std::FILE* out = std::fopen(join(cfg.out, "bench.csv").c_str(), "w");
    if (!out) throw sgml::io_error("cannot open bench.csv for writing");
    std::fputs("n,nodes,work_units_per_cycle,seconds_per_cycle,node_updates_per_second\n", out);

    for (int n = n_lo; n <= n_hi; ++n) {
        const sgml::ProblemSpec prob = sgml::poisson2d_problem(n);
        const sgml::CycleSchedule schedule = sgml::build_schedule(n, cfg.n_r);
        const std::uint64_t units = sgml::schedule_work_units(schedule);

        sgml::SolveState state(prob.grid);
        sgml::SolveReport scratch_report;
        std::uint64_t work = 0;
        const auto t0 = std::chrono::steady_clock::now();
        sgml::single_cycle(state, prob.f, {}, prob.a, prob.bc,
                           /*homogeneous=*/false, schedule, cfg.safety,
                           /*cycle_index=*/0, /*normalization=*/1.0,
                           scratch_report, work);
        const auto t1 = std::chrono::steady_clock::now();
        if (work != units)
            throw std::logic_error("bench: pass counter disagrees with the schedule");

        const double secs = std::chrono::duration<double>(t1 - t0).count();
        const double updates =
            static_cast<double>(units) * static_cast<double>(prob.grid.total);
        std::fprintf(out, "%d,%zu,%llu,%s,%s\n", n, prob.grid.total,
                     static_cast<unsigned long long>(units),
                     sgml::format_double(secs).c_str(),
                     sgml::format_double(secs > 0.0 ? updates / secs : 0.0).c_str());
        std::cout << "bench n=" << n << ": " << units << " units, "
                  << sgml::format_double(secs) << " s/cycle\n";
    }
    std::fclose(out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-grid multi-level solver for heterogeneous elliptic problems"};
    app.require_subcommand(1);

    RunConfig cfg;

    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "grid exponent, N = 2^n + 1 nodes per axis");
        sub->add_option("--nr", cfg.n_r, "max relaxation passes per level")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol", cfg.tol, "normalized residual target")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-cycles", cfg.max_cycles, "cycle budget")
            ->check(CLI::PositiveNumber);
        sub->add_option("--safety", cfg.safety, "stable-step safety factor in (0,1]");
        sub->add_option("--out", cfg.out, "output directory (created if missing)");
        sub->add_option("--threads", cfg.threads, "OpenMP thread count (0 = default)");
    };

    CLI::App* conv = app.add_subcommand(
        "convergence", "Manufactured 2D Poisson convergence study");
    add_common(conv);

    CLI::App* deform = app.add_subcommand(
        "deform", "Node attraction toward a closed curve (all-Neumann potential)");
    add_common(deform);
    deform->add_option("--curve", cfg.curve_path, "curve CSV, one x,y[,z] per line");
    deform->add_option("--a", cfg.a, "zeroth-order coefficient of the potential");
    deform->add_option("--t", cfg.t, "pseudo-time horizon of the node motion");
    deform->add_option("--steps", cfg.steps, "Euler steps over the horizon");

    CLI::App* trifoil = app.add_subcommand(
        "trifoil", "Velocity field of a knotted vortex filament plus streamlines");
    add_common(trifoil);
    trifoil->add_option("--r", cfg.r, "knot radius scale (max extent 3r from center)");
    trifoil->add_option("--seeds", cfg.seeds_path, "seed CSV, one x,y,z per line");
    trifoil->add_option("--t", cfg.t, "streamline RK4 step size");
    trifoil->add_option("--steps", cfg.steps, "max RK4 steps per streamline");

    CLI::App* capacitor = app.add_subcommand(
        "capacitor", "Heterogeneous conductivity between plate electrodes");
    add_common(capacitor);
    capacitor->add_option("--mode", cfg.mode, "sphere conductivity: high or low")
        ->check(CLI::IsMember({"high", "low"}));

    CLI::App* bench = app.add_subcommand(
        "bench", "Single-cycle timing sweep over grid sizes up to --n");
    add_common(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (conv->parsed()) return cmd_convergence(cfg);
        if (deform->parsed()) return cmd_deform(cfg);
        if (trifoil->parsed()) return cmd_trifoil(cfg);
        if (capacitor->parsed()) return cmd_capacitor(cfg);
        if (bench->parsed()) return cmd_bench(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
