/// @file grid.hpp
/// @brief Cartesian node lattice, level-subset membership, and field storage.
///
/// Everything in the solver lives on ONE grid: a unit square/cube with
/// N = 2^n + 1 nodes per dimension, spacing h = 1/(N-1). Coarser "levels"
/// are not separate grids but strided subsets of this one: level v is the
/// set of nodes whose indices are all multiples of 2^v.
///
/// Storage convention (fixed, shared with file writers and the reference
/// assembler): row-major with x fastest,
///   linear(i,j,k) = i + N*(j + N*k),  k = 0 in 2D.
///
/// Index arithmetic is signed so stencil offsets and boundary reflections
/// never wrap.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sgml {

// ============================================================================
// Grid
// ============================================================================

/// Immutable description of the node lattice. Value type, freely shareable.
struct Grid {
    int dim = 2;            ///< 2 or 3
    int n = 1;              ///< level exponent, N = 2^n + 1
    int N = 3;              ///< nodes per dimension
    double h = 0.5;         ///< node spacing, h*(N-1) = 1
    std::size_t total = 9;  ///< N^dim

    bool operator==(const Grid&) const = default;
};

/// Integer node coordinates, 0 <= i,j,k <= N-1. k stays 0 in 2D.
struct NodeIndex {
    int i = 0;
    int j = 0;
    int k = 0;
};

/// Builds the lattice for a unit domain. n is capped at 13 as a memory guard.
/// Throws std::invalid_argument for dim outside {2,3} or n outside [1,13].
Grid make_grid(int dim, int n);

/// True iff every coordinate of idx is divisible by 2^v, i.e. the node
/// belongs to the level-v subset. Level 0 contains every node; subsets nest.
inline bool in_level_subset(const NodeIndex& idx, int v) {
    const int mask = (1 << v) - 1;
    return ((idx.i | idx.j | idx.k) & mask) == 0;
}

/// Reflects an out-of-range index about the nearest boundary:
///   -s maps to s, (N-1)+s maps to (N-1)-s.
/// Valid for -(N-1) <= i <= 2(N-1); throws std::out_of_range beyond that
/// band (a second reflection would be ambiguous).
inline int mirror_index(int i, int N) {
    if (i < 0) i = -i;
    else if (i > N - 1) i = 2 * (N - 1) - i;
    if (i < 0 || i > N - 1)
        throw std::out_of_range("mirror_index: reflection still out of range");
    return i;
}

// ============================================================================
// Field
// ============================================================================

/// One double per node in the documented linear order. Carries its grid by
/// value (the Grid struct is 5 machine words). Kernels read one field while
/// writing a disjoint one; no kernel reads and writes the same buffer.
class Field {
public:
    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0)
        : grid_(g), v_(g.total, fill) {}

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    double& operator[](std::size_t p) { return v_[p]; }
    double operator[](std::size_t p) const { return v_[p]; }

    /// linear(i,j,k) = i + N*(j + N*k); bijective with NodeIndex.
    std::size_t linear(int i, int j, int k = 0) const {
        const std::size_t N = static_cast<std::size_t>(grid_.N);
        return static_cast<std::size_t>(i) + N * (static_cast<std::size_t>(j) + N * static_cast<std::size_t>(k));
    }
    std::size_t linear(const NodeIndex& idx) const { return linear(idx.i, idx.j, idx.k); }

    double& at(int i, int j, int k = 0) { return v_[linear(i, j, k)]; }
    double at(int i, int j, int k = 0) const { return v_[linear(i, j, k)]; }

    NodeIndex node_of(std::size_t p) const {
        const int N = grid_.N;
        NodeIndex idx;
        idx.i = static_cast<int>(p % N);
        idx.j = static_cast<int>((p / N) % N);
        idx.k = static_cast<int>(p / (static_cast<std::size_t>(N) * N));
        return idx;
    }

    void fill(double x) { std::fill(v_.begin(), v_.end(), x); }

    bool operator==(const Field&) const = default;

private:
    Grid grid_;
    std::vector<double> v_;
};

// ============================================================================
// Boundary conditions
// ============================================================================

enum class BcKind : std::uint8_t {
    dirichlet,  ///< face nodes pinned to a value; ghosts odd about that value
    neumann     ///< zero normal derivative; ghosts are even mirror images
};

/// One condition per face. Faces are indexed axis*2 + side with side 0 at
/// coordinate 0 and side 1 at coordinate 1 of the unit domain.
struct FaceBc {
    BcKind kind = BcKind::dirichlet;
    double value = 0.0;  ///< Dirichlet face value; ignored for Neumann
};

struct BoundarySpec {
    std::array<FaceBc, 6> faces{};  ///< 2D uses entries 0..3

    static constexpr int face_id(int axis, int side) { return axis * 2 + side; }

    const FaceBc& face(int axis, int side) const { return faces[face_id(axis, side)]; }
    FaceBc& face(int axis, int side) { return faces[face_id(axis, side)]; }

    static BoundarySpec all_dirichlet(double value = 0.0);
    static BoundarySpec all_neumann();

    bool any_dirichlet(int dim) const;
    bool all_faces_neumann(int dim) const { return !any_dirichlet(dim); }

    /// True if the node lies on at least one Dirichlet face.
    bool on_dirichlet(const NodeIndex& idx, int dim, int N) const;

    /// Dirichlet value at a boundary node. When several Dirichlet faces meet
    /// at an edge/corner the lowest face id wins (deterministic tie-break).
    double dirichlet_value(const NodeIndex& idx, int dim, int N) const;
};

}  // namespace sgml
