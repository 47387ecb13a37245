/// @file stencil.cpp
/// @brief Offset tables, ghost resolution, and pointwise operator evaluation.

#include "sgml/stencil.hpp"

#include <algorithm>
#include <vector>

namespace sgml {

namespace {

std::vector<StencilOffset> build_offsets(int dim) {
    std::vector<StencilOffset> offs;
    const int rlo = dim == 3 ? -1 : 0;
    const int rhi = dim == 3 ? 1 : 0;
    for (int r = rlo; r <= rhi; ++r)
        for (int q = -1; q <= 1; ++q)
            for (int p = -1; p <= 1; ++p) {
                if (p == 0 && q == 0 && r == 0) continue;
                const double l2 = static_cast<double>(p * p + q * q + r * r);
                offs.push_back({p, q, r, 1.0 / l2});
            }
    return offs;
}

const std::vector<StencilOffset>& offsets2() {
    static const std::vector<StencilOffset> t = build_offsets(2);
    return t;
}
const std::vector<StencilOffset>& offsets3() {
    static const std::vector<StencilOffset> t = build_offsets(3);
    return t;
}

}  // namespace

std::span<const StencilOffset> stencil_offsets(int dim) {
    return dim == 2 ? std::span<const StencilOffset>(offsets2())
                    : std::span<const StencilOffset>(offsets3());
}

// ============================================================================
// Ghost resolution
// ============================================================================

namespace detail {

// Resolves axes one at a time (x, then y, then z). Odd reflections expand
// into 2*u(face) - u(mirror); the recursion depth is bounded by dim and the
// expansion only happens within one layer of a face.
double ghost_value(const Field& u, const BoundarySpec& bc, int i, int j, int k) {
    const int N = u.grid().N;
    if (i < 0) {
        const double m = ghost_value(u, bc, -i, j, k);
        if (bc.face(0, 0).kind == BcKind::neumann) return m;
        return 2.0 * ghost_value(u, bc, 0, j, k) - m;
    }
    if (i > N - 1) {
        const double m = ghost_value(u, bc, 2 * (N - 1) - i, j, k);
        if (bc.face(0, 1).kind == BcKind::neumann) return m;
        return 2.0 * ghost_value(u, bc, N - 1, j, k) - m;
    }
    if (j < 0) {
        const double m = ghost_value(u, bc, i, -j, k);
        if (bc.face(1, 0).kind == BcKind::neumann) return m;
        return 2.0 * ghost_value(u, bc, i, 0, k) - m;
    }
    if (j > N - 1) {
        const double m = ghost_value(u, bc, i, 2 * (N - 1) - j, k);
        if (bc.face(1, 1).kind == BcKind::neumann) return m;
        return 2.0 * ghost_value(u, bc, i, N - 1, k) - m;
    }
    if (k < 0) {
        const double m = ghost_value(u, bc, i, j, -k);
        if (bc.face(2, 0).kind == BcKind::neumann) return m;
        return 2.0 * ghost_value(u, bc, i, j, 0) - m;
    }
    if (k > N - 1) {
        const double m = ghost_value(u, bc, i, j, 2 * (N - 1) - k);
        if (bc.face(2, 1).kind == BcKind::neumann) return m;
        return 2.0 * ghost_value(u, bc, i, j, N - 1) - m;
    }
    return u.at(i, j, k);
}

double mirror_value(const Field& u, int i, int j, int k) {
    const int N = u.grid().N;
    return u.at(mirror_index(i, N), mirror_index(j, N), mirror_index(k, N));
}

}  // namespace detail

// ============================================================================
// Pointwise operations
// ============================================================================

double restrict_at(const Field& f, const NodeIndex& idx, int lam,
                   const BoundarySpec& bc) {
    const Grid& g = f.grid();
    double acc = 0.0;
    if (g.dim == 2) {
        for (int q = -1; q <= 1; ++q)
            for (int p = -1; p <= 1; ++p) {
                const double w = restrict_axis_weight(p) * restrict_axis_weight(q);
                acc += w * detail::ghost_value(f, bc, idx.i + p * lam, idx.j + q * lam, 0);
            }
    } else {
        for (int r = -1; r <= 1; ++r)
            for (int q = -1; q <= 1; ++q)
                for (int p = -1; p <= 1; ++p) {
                    const double w = restrict_axis_weight(p) * restrict_axis_weight(q) *
                                     restrict_axis_weight(r);
                    acc += w * detail::ghost_value(f, bc, idx.i + p * lam,
                                                   idx.j + q * lam, idx.k + r * lam);
                }
    }
    return acc;
}

double apply_operator(const Field& u, const OperatorCoefficients& coeff,
                      const NodeIndex& idx, int lam, const BoundarySpec& bc) {
    const Grid& g = u.grid();
    const double s = lam * g.h;
    const double uc = u.at(idx.i, idx.j, idx.k);
    const double sc = coeff.sigma ? coeff.sigma->at(idx.i, idx.j, idx.k) : 1.0;
    double acc = 0.0;
    for (const StencilOffset& off : stencil_offsets(g.dim)) {
        const int ni = idx.i + off.p * lam;
        const int nj = idx.j + off.q * lam;
        const int nk = idx.k + off.r * lam;
        const double un = detail::ghost_value(u, bc, ni, nj, nk);
        const double sn = coeff.sigma ? detail::mirror_value(*coeff.sigma, ni, nj, nk) : 1.0;
        acc += 0.5 * (sn + sc) * (un - uc) * off.inv_l2;
    }
    return acc * stencil_prefactor(g.dim) / (s * s) + coeff.a * uc;
}

double stable_step(const OperatorCoefficients& coeff, const Grid& grid,
                   int lam, double safety) {
    if (!(safety > 0.0) || safety > 1.0)
        throw std::invalid_argument("stable_step: safety must lie in (0, 1]");
    double smax = 1.0;
    if (coeff.sigma) {
        smax = 0.0;
        const std::size_t total = coeff.sigma->size();
        for (std::size_t p = 0; p < total; ++p)
            smax = std::max(smax, (*coeff.sigma)[p]);
        if (!(smax > 0.0))
            throw std::invalid_argument("stable_step: sigma must be positive");
    }
    const double s = lam * grid.h;
    return safety * step_constant(grid.dim) * s * s / smax;
}

}  // namespace sgml
