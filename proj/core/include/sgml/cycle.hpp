/// @file cycle.hpp
/// @brief The saw-like cycle schedule, the residual recurrence driver, and
///        convergence reporting.
///
/// One cycle sweeps teeth v1 = n-1 down to 0; each tooth descends from its
/// top level v1 to the finest level 0, emitting Restrict(v) then
/// Relax(v, min(n_r, 2^(n-v1))) per level, and the cycle ends with one extra
/// Relax(0, min(n_r, 2^n)) block. Coarse corrections are thus re-smoothed on
/// the fine subset inside every tooth, which keeps the end-of-cycle residual
/// strictly decreasing at roughly one decade per cycle for n_r = 2.
///
/// The solver accumulates u = sum of per-cycle corrections e_i, feeding each
/// cycle the recurrence source r_i = r_{i-1} - (A(e_{i-1}) + a*e_{i-1}).
/// Cycle 0 uses the true source and true Dirichlet data; every later cycle
/// starts from the null state with homogeneous Dirichlet data.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sgml/grid.hpp"
#include "sgml/kernels.hpp"

namespace sgml {

// ============================================================================
// Schedule
// ============================================================================

struct ScheduleStep {
    enum class Kind : std::uint8_t { restrict_source, relax };
    Kind kind = Kind::relax;
    int level = 0;
    int count = 1;  ///< relaxation passes; 1 for restrict steps
};

struct CycleSchedule {
    int n = 0;
    int n_r = 1;
    std::vector<ScheduleStep> steps;
};

/// Enumerates one cycle. Relax counts follow min(n_r, 2^(n-v1)) for the
/// tooth topped at v1, so with the cap removed the counts double tooth by
/// tooth (2, 4, 8, ...).
CycleSchedule build_schedule(int n, int n_r);

/// Work units of one cycle without enumerating steps:
///   U(n, n_r) = sum_{v1=0}^{n-1} [ v1(v1+1)/2 + (v1+1)*min(n_r, 2^(n-v1)) ]
///               + min(n_r, 2^n)
/// (a Restrict(v) step is v full-grid passes, a Relax(v,c) step is c).
/// The kernel-level pass counter must match this exactly.
std::uint64_t closed_form_work_units(int n, int n_r);

/// Same total obtained by pricing the enumerated steps; used to cross-check
/// the closed form in tests.
std::uint64_t schedule_work_units(const CycleSchedule& schedule);

// ============================================================================
// Config / report
// ============================================================================

struct SolverConfig {
    int n_r = 2;           ///< max relaxations per level
    double tol = 1e-12;    ///< normalized max-norm residual target
    int max_cycles = 50;
    double safety = 0.9;   ///< stable-step safety factor in (0,1]
};

/// One diagnostic-residual sample per relaxation pass.
struct DiagSample {
    int cycle = 0;
    int pass = 0;   ///< pass index within the cycle (work-unit order)
    int level = 0;
    double value = 0.0;  ///< normalized |A(u1) + a*u1 - g| max on the subset
};

struct CycleRecord {
    int cycle = 0;
    std::uint64_t work_units = 0;  ///< cumulative schedule passes so far
    double residual = 0.0;         ///< normalized end-of-cycle recurrence residual
    double diag_min = 0.0;         ///< min diagnostic sample of the cycle
    std::optional<double> l1_error;  ///< vs exact solution when available
};

struct SolveReport {
    std::vector<CycleRecord> rows;
    std::vector<DiagSample> trace;
    bool converged = false;
    bool nan_detected = false;
    bool stagnated = false;
    double normalization = 0.0;  ///< the D in max|r|/D
    std::uint64_t node_updates = 0;  ///< nodes written by counted passes
};

// ============================================================================
// Problem description consumed by the driver
// ============================================================================

/// Evaluated at node positions; z is 0 in 2D.
using ExactSolution = std::function<double(double x, double y, double z)>;

struct ProblemSpec {
    Grid grid;
    Field sigma;          ///< empty means sigma = 1 everywhere
    double a = 0.0;
    Field f;
    BoundarySpec bc;
    ExactSolution exact;  ///< optional, enables the l1_error column

    const Field* sigma_or_null() const { return sigma.size() ? &sigma : nullptr; }
};

struct SolveResult {
    Field u;
    SolveReport report;
};

// ============================================================================
// Driver
// ============================================================================

/// Runs one cycle over `source` with the given boundary regime, accumulating
/// the correction into state (which must enter zeroed). sigma_levels holds
/// the per-level restricted coefficient (entry v for level v), or empty for
/// sigma = 1. Appends diagnostic samples (normalized by `normalization`, or
/// raw if it is 0) and returns the correction's final buffer in state.u.
void single_cycle(SolveState& state, const Field& source,
                  const std::vector<Field>& sigma_levels, double a,
                  const BoundarySpec& bc, bool homogeneous,
                  const CycleSchedule& schedule, double safety,
                  int cycle_index, double normalization,
                  SolveReport& report, std::uint64_t& work_units);

/// Full residual-recurrence solve. Normalization D = max|f|, falling back to
/// the first end-of-cycle residual when f = 0 identically. All-Neumann
/// problems re-project the recurrence source every cycle (removes the
/// roundoff drift along the operator's left null direction; for a > 0 that
/// direction is anti-damped and would otherwise stall the recurrence around
/// 1e-8). Stops on tol, max_cycles, three consecutive non-decreasing
/// residuals (reported, not thrown), or NaN (flagged immediately).
/// For all-Neumann a = 0 problems the returned u is the zero-mean
/// representative.
SolveResult solve(const ProblemSpec& problem, const SolverConfig& config);

/// Subtracts the trapezoid-weighted mean of u: the zero-mean representative
/// of an all-Neumann solution family.
void pure_neumann_pin(Field& u);

/// Restriction cache for the coefficient field: entry v is sigma collected
/// to level v with even-mirror ghosts on every face (odd reflection could
/// break positivity). Validates positivity of every level.
std::vector<Field> restrict_sigma_levels(const Field& sigma, int n);

}  // namespace sgml
