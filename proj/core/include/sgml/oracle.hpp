/// @file oracle.hpp
/// @brief Brute-force reference solvers certifying the multi-level machinery.
///
/// The assembled matrix realizes apply_operator at lam = 1 row by row, with
/// the SAME radial stencil and ghost rules the kernels use, so agreement
/// between solve() and reference_solve() isolates the cycle/recurrence logic
/// from the discretization choice. Dirichlet-face nodes are eliminated into
/// the right-hand side; interior and Neumann-face nodes are unknowns.
///
/// All-Neumann a = 0 systems are singular with the constant vector in the
/// null space and the trapezoid weight vector in the left null space; they
/// are solved in the zero-mean subspace through a bordered system that
/// appends the trapezoid weights as an extra row and column.

#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "sgml/cycle.hpp"
#include "sgml/grid.hpp"

namespace sgml {

struct AssembledSystem {
    Eigen::SparseMatrix<double> A;  ///< one row per unknown
    Eigen::VectorXd b;
    std::vector<std::ptrdiff_t> unknown_of_node;  ///< -1 for eliminated nodes
    std::vector<std::size_t> node_of_unknown;
    Grid grid;
    BoundarySpec bc;
    bool singular_neumann = false;  ///< all-Neumann with a = 0
};

/// Size guard: dense-scale assembly only.
inline constexpr std::size_t oracle_max_unknowns = 40000;

/// Builds the sparse system for the problem at lam = 1. Throws
/// std::length_error past the unknown-count guard.
AssembledSystem assemble(const ProblemSpec& problem);

/// Direct sparse-LU factorization solve; bordered solve for singular
/// all-Neumann systems (returns the trapezoid-zero-mean representative).
/// The returned field carries Dirichlet values on eliminated nodes.
Field reference_solve(const AssembledSystem& system);

/// Second, independent oracle: damped Jacobi u += omega D^-1 (b - A u).
/// Slow; intended for tiny grids as a cross-check of the factorization.
Field damped_jacobi_solve(const AssembledSystem& system, double omega,
                          long iterations);

/// Matrix action on a full-grid field restricted to unknowns; used by the
/// matvec-vs-kernel identity tests.
Field oracle_apply(const AssembledSystem& system, const Field& x);

}  // namespace sgml
