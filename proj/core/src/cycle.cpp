/// @file cycle.cpp
/// @brief Schedule enumeration and the residual-recurrence driver.

#include "sgml/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgml/problems.hpp"

namespace sgml {

// ============================================================================
// Schedule
// ============================================================================

namespace {

int relax_count(int n, int n_r, int v1) {
    const long long doubling = 1LL << (n - v1);
    return static_cast<int>(std::min<long long>(n_r, doubling));
}

}  // namespace

CycleSchedule build_schedule(int n, int n_r) {
    if (n < 1) throw std::invalid_argument("build_schedule: n must be >= 1");
    if (n_r < 1) throw std::invalid_argument("build_schedule: n_r must be >= 1");
    CycleSchedule s;
    s.n = n;
    s.n_r = n_r;
    for (int v1 = n - 1; v1 >= 0; --v1) {
        const int c = relax_count(n, n_r, v1);
        for (int v = v1; v >= 0; --v) {
            s.steps.push_back({ScheduleStep::Kind::restrict_source, v, 1});
            s.steps.push_back({ScheduleStep::Kind::relax, v, c});
        }
    }
    const long long tail_cap = n < 62 ? (1LL << n) : std::numeric_limits<long long>::max();
    s.steps.push_back({ScheduleStep::Kind::relax, 0,
                       static_cast<int>(std::min<long long>(n_r, tail_cap))});
    return s;
}

std::uint64_t closed_form_work_units(int n, int n_r) {
    std::uint64_t total = 0;
    for (int v1 = 0; v1 <= n - 1; ++v1) {
        const std::uint64_t restricts =
            static_cast<std::uint64_t>(v1) * (v1 + 1) / 2;  // sum of v over the tooth
        const std::uint64_t relaxes =
            static_cast<std::uint64_t>(v1 + 1) * relax_count(n, n_r, v1);
        total += restricts + relaxes;
    }
    const long long tail_cap = n < 62 ? (1LL << n) : std::numeric_limits<long long>::max();
    total += static_cast<std::uint64_t>(std::min<long long>(n_r, tail_cap));
    return total;
}

std::uint64_t schedule_work_units(const CycleSchedule& schedule) {
    std::uint64_t total = 0;
    for (const ScheduleStep& st : schedule.steps) {
        if (st.kind == ScheduleStep::Kind::restrict_source)
            total += static_cast<std::uint64_t>(st.level);  // v averaging passes
        else
            total += static_cast<std::uint64_t>(st.count);
    }
    return total;
}

// ============================================================================
// Cycle execution
// ============================================================================

void single_cycle(SolveState& state, const Field& source,
                  const std::vector<Field>& sigma_levels, double a,
                  const BoundarySpec& bc, bool homogeneous,
                  const CycleSchedule& schedule, double safety,
                  int cycle_index, double normalization,
                  SolveReport& report, std::uint64_t& work_units) {
    const Grid& grid = state.u.grid();
    Field g(grid);
    Field scratch(grid);
    int pass_index = 0;
    int current_level = -1;
    const double inv_norm = normalization > 0.0 ? 1.0 / normalization : 1.0;

    for (const ScheduleStep& st : schedule.steps) {
        if (st.kind == ScheduleStep::Kind::restrict_source) {
            const std::uint64_t before = work_units;
            restriction_into(source, st.level, bc, g, scratch, &work_units);
            pass_index += static_cast<int>(work_units - before);
        } else {
            if (st.level != current_level) {
                state.reset_level(st.level);
                current_level = st.level;
            }
            const Field* sig =
                sigma_levels.empty() ? nullptr : &sigma_levels[static_cast<std::size_t>(st.level)];
            for (int c = 0; c < st.count; ++c) {
                state.swap_buffers();
                const double diag = relaxation_interpolation(
                    state, g, sig, a, safety, bc, homogeneous, &work_units);
                report.trace.push_back(
                    {cycle_index, pass_index, st.level, diag * inv_norm});
                ++pass_index;
            }
        }
    }
}

// ============================================================================
// Solver
// ============================================================================

std::vector<Field> restrict_sigma_levels(const Field& sigma, int n) {
    std::vector<Field> levels;
    if (!sigma.size()) return levels;
    const BoundarySpec even = BoundarySpec::all_neumann();
    levels.reserve(static_cast<std::size_t>(n));
    Field scratch(sigma.grid());
    for (int v = 0; v < n; ++v) {
        Field lv(sigma.grid());
        restriction_into(sigma, v, even, lv, scratch, nullptr);
        for (std::size_t p = 0; p < lv.size(); ++p)
            if (!(lv[p] > 0.0))
                throw std::invalid_argument(
                    "restrict_sigma_levels: coefficient must stay positive");
        levels.push_back(std::move(lv));
    }
    return levels;
}

void pure_neumann_pin(Field& u) {
    const double mean = trapezoid_mean(u);
    for (std::size_t p = 0; p < u.size(); ++p) u[p] -= mean;
}

SolveResult solve(const ProblemSpec& problem, const SolverConfig& config) {
    const Grid& grid = problem.grid;
    if (problem.f.grid() != grid)
        throw std::invalid_argument("solve: source grid mismatch");
    if (problem.sigma.size() && problem.sigma.grid() != grid)
        throw std::invalid_argument("solve: sigma grid mismatch");
    if (!(config.tol > 0.0))
        throw std::invalid_argument("solve: tol must be positive");
    if (config.n_r < 1)
        throw std::invalid_argument("solve: n_r must be >= 1");
    for (std::size_t p = 0; p < problem.f.size(); ++p)
        if (!std::isfinite(problem.f[p]))
            throw std::invalid_argument("solve: source contains non-finite values");

    const bool all_neumann = problem.bc.all_faces_neumann(grid.dim);
    const CycleSchedule schedule = build_schedule(grid.n, config.n_r);
    const std::vector<Field> sigma_levels =
        restrict_sigma_levels(problem.sigma, grid.n);
    const OperatorCoefficients fine_coeff{problem.sigma_or_null(), problem.a};

    SolveResult result{Field(grid), {}};
    SolveReport& rep = result.report;
    Field& u_total = result.u;

    Field r = problem.f;
    if (all_neumann) zero_mean_projection(r);

    double norm = max_abs(r);  // D = max|f|; 0 falls back to the cycle-0 residual
    bool norm_pending = norm == 0.0;

    SolveState state(grid);
    std::uint64_t work = 0;
    double prev_res = std::numeric_limits<double>::infinity();
    int non_decreasing = 0;

    for (int cycle = 0; cycle < config.max_cycles; ++cycle) {
        const bool homogeneous = cycle > 0;
        if (all_neumann && cycle > 0) zero_mean_projection(r);

        state.u.fill(0.0);
        state.u_prev.fill(0.0);
        const std::size_t trace_mark = rep.trace.size();
        try {
            single_cycle(state, r, sigma_levels, problem.a, problem.bc,
                         homogeneous, schedule, config.safety, cycle,
                         norm_pending ? 0.0 : norm, rep, work);
        } catch (const kernel_error&) {
            rep.nan_detected = true;
            rep.converged = false;
            break;
        }
        rep.node_updates += (work - (rep.rows.empty() ? 0 : rep.rows.back().work_units)) *
                            static_cast<std::uint64_t>(grid.total);

        const Field& e = state.u;
        for (std::size_t p = 0; p < u_total.size(); ++p) u_total[p] += e[p];

        residual_update(r, e, fine_coeff, problem.bc);
        const double r_max = max_abs(r);
        if (norm_pending) {
            norm = r_max;
            norm_pending = false;
            if (norm == 0.0) {  // f = 0 and the cycle produced the exact answer
                rep.rows.push_back({cycle, work, 0.0, 0.0, std::nullopt});
                rep.converged = true;
                break;
            }
            // normalize the samples recorded before D was known
            for (std::size_t t = trace_mark; t < rep.trace.size(); ++t)
                rep.trace[t].value /= norm;
        }
        const double res = r_max / norm;

        double diag_min = std::numeric_limits<double>::infinity();
        for (std::size_t t = trace_mark; t < rep.trace.size(); ++t)
            diag_min = std::min(diag_min, rep.trace[t].value);

        CycleRecord row;
        row.cycle = cycle;
        row.work_units = work;
        row.residual = res;
        row.diag_min = diag_min;
        if (problem.exact) row.l1_error = l1_error(u_total, problem.exact);
        rep.rows.push_back(row);

        if (!std::isfinite(res)) {
            rep.nan_detected = true;
            break;
        }
        if (res <= config.tol) {
            rep.converged = true;
            break;
        }
        if (res >= prev_res) {
            if (++non_decreasing >= 3) {
                rep.stagnated = true;
                break;
            }
        } else {
            non_decreasing = 0;
        }
        prev_res = res;
    }

    rep.normalization = norm_pending ? 0.0 : norm;
    if (all_neumann && problem.a == 0.0) pure_neumann_pin(u_total);
    return result;
}

}  // namespace sgml
