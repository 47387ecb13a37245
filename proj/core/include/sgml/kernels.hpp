/// @file kernels.hpp
/// @brief The two barrier-separated full-grid passes (restriction and
///        relaxation-interpolation) plus residual and source utilities.
///
/// Kernel execution contract (mirrors a GPU dispatch): a pass reads only
/// immutable snapshot buffers and writes every node of a disjoint output
/// buffer exactly once; a full barrier separates passes. Node visit order is
/// irrelevant to the result, so single- and multi-threaded runs produce
/// bit-identical fields.
///
/// One "work unit" is one full-grid pass. restriction(v) performs v nested
/// averaging passes with lam = 1, 2, ..., 2^(v-1) (the identity for v = 0),
/// widening the collected source to the level-v hat support 2^v * h.
/// relaxation_interpolation is always exactly one pass.
///
/// Per-pass branch partition (each node written by exactly one):
///   - Dirichlet-face nodes take their boundary value (or 0 on homogeneous
///     recurrence cycles) and record the jump in du so the first pass of a
///     level propagates boundary data inward through interpolation.
///   - level-v subset nodes relax: an explicit Euler step in pseudo-time of
///     du/dtau = A(u) - g with the a-term folded in implicitly,
///       u <- (u1 + dtau*(A(u1) - g)) / (1 - dtau*a),
///     dtau from the local stable-step bound. Each records du = u - u1.
///   - all other nodes add the multilinear interpolation of the PREVIOUS
///     pass's du from the <= 2^dim surrounding level-v nodes: u = u1 + I(du).

#pragma once

#include <cstdint>
#include <vector>

#include "sgml/grid.hpp"
#include "sgml/stencil.hpp"

namespace sgml {

/// Raised when a kernel meets a non-finite value or a non-positive step.
struct kernel_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ============================================================================
// Solve state
// ============================================================================

/// Double-buffered state threaded through relaxation-interpolation passes.
/// u/u_prev and du/du_prev swap roles every pass; du buffers are meaningful
/// at level-subset and Dirichlet-face nodes and zero elsewhere.
struct SolveState {
    Field u;        ///< pass output
    Field u_prev;   ///< snapshot u1 read by the pass
    Field du;       ///< variation written this pass
    Field du_prev;  ///< variation read by the interpolation branch
    int level = 0;  ///< active level v (spacing 2^v * h)

    explicit SolveState(const Grid& g)
        : u(g), u_prev(g), du(g), du_prev(g) {}

    /// Prepares the next pass: the latest output becomes the snapshot.
    void swap_buffers() {
        std::swap(u, u_prev);
        std::swap(du, du_prev);
    }

    /// Call when the active level changes; the previous level's variation
    /// must not leak into the next level's interpolation.
    void reset_level(int v) {
        level = v;
        du.fill(0.0);
        du_prev.fill(0.0);
    }
};

// ============================================================================
// Kernels
// ============================================================================

/// Collects f onto the level-v representation: v full-grid averaging passes
/// with lam = 1, 2, ..., 2^(v-1). v = 0 returns f unchanged. Constants are
/// preserved exactly (weights sum to 1). Adds v to *work if given.
Field restriction(const Field& f, int v, const BoundarySpec& bc,
                  std::uint64_t* work = nullptr);

/// In-place variant reusing caller scratch; out receives the result.
/// out and scratch must be distinct fields on f's grid.
void restriction_into(const Field& f, int v, const BoundarySpec& bc,
                      Field& out, Field& scratch, std::uint64_t* work = nullptr);

/// One relaxation-interpolation pass at state.level. Reads state.u_prev /
/// state.du_prev plus g (restricted source) and sigma_level (restricted
/// coefficient for this level, or nullptr for sigma = 1); writes state.u and
/// state.du. Call state.swap_buffers() before each pass.
///
/// homogeneous selects the Dirichlet face values: stored bc values for the
/// first cycle, 0 for residual-recurrence cycles.
///
/// Returns the diagnostic residual max over relax-branch nodes of
/// |A(u1) + a*u1 - g| (unnormalized), read off at zero extra cost.
/// Adds 1 to *work. Throws kernel_error on non-finite output or dtau <= 0.
double relaxation_interpolation(SolveState& state, const Field& g,
                                const Field* sigma_level, double a,
                                double safety, const BoundarySpec& bc,
                                bool homogeneous,
                                std::uint64_t* work = nullptr);

/// r = f - (A(u) + a*u) at interior and Neumann-face nodes with the lam = 1
/// operator; r = 0 at Dirichlet-face nodes. Ghosts of u resolve against its
/// stored face values.
Field residual(const Field& u, const Field& f, const OperatorCoefficients& coeff,
               const BoundarySpec& bc);

/// In-place recurrence update r <- r - (A(e) + a*e), then r = 0 on Dirichlet
/// faces. Evaluating against e (the latest correction, not the accumulated
/// sum) keeps the committed rounding proportional to |e|, which is what lets
/// the reported residual reach machine precision.
void residual_update(Field& r, const Field& e, const OperatorCoefficients& coeff,
                     const BoundarySpec& bc);

/// Subtracts the trapezoid-rule mean so the discrete integral of f is 0 to
/// roundoff. Required for solvability of all-Neumann problems; the trapezoid
/// weight vector is the left null vector of the assembled all-Neumann
/// operator (a = 0), so the recurrence preserves the projection.
void zero_mean_projection(Field& f);

/// Trapezoid-weighted mean over the unit domain (weight 1/2 per face axis).
double trapezoid_mean(const Field& f);

/// Writes Dirichlet face values into u (0 when homogeneous); Neumann faces
/// are untouched, their condition lives in the ghost reads.
void apply_boundary(Field& u, const BoundarySpec& bc, bool homogeneous);

/// Max of |f| over all nodes. Deterministic under any thread count.
double max_abs(const Field& f);

}  // namespace sgml
