/// @file kernels.cpp
/// @brief Full-grid passes. Hot loops run a ghost-free fast path on nodes
///        whose whole stencil footprint is in range and fall back to the
///        pointwise ghost-resolving evaluators within lam of a face; both
///        paths accumulate in the same order, so they agree bitwise with
///        the pointwise operations used by the reference assembler.

#include "sgml/kernels.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sgml {

namespace {

constexpr double kAxisW[3] = {0.25, 0.5, 0.25};  // restriction weights per offset -1,0,1

// ----------------------------------------------------------------------------
// restriction: one averaging pass at spacing lam
// ----------------------------------------------------------------------------

template <int DIM>
void restrict_pass(const Field& in, Field& out, int lam, const BoundarySpec& bc) {
    const Grid& g = in.grid();
    const int N = g.N;
    const double* v = in.data();
    double* o = out.data();
    const std::ptrdiff_t sx = lam;
    const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(N) * lam;
    const std::ptrdiff_t sz = static_cast<std::ptrdiff_t>(N) * N * lam;
    const int lo = lam, hi = N - 1 - lam;

    if constexpr (DIM == 2) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j < N; ++j) {
            const bool yin = j >= lo && j <= hi;
            const std::size_t row = static_cast<std::size_t>(j) * N;
            for (int i = 0; i < N; ++i) {
                if (yin && i >= lo && i <= hi) {
                    const double* c = v + row + i;
                    double acc = 0.0;
                    for (int q = -1; q <= 1; ++q)
                        for (int p = -1; p <= 1; ++p)
                            acc += kAxisW[p + 1] * kAxisW[q + 1] * c[q * sy + p * sx];
                    o[row + i] = acc;
                } else {
                    o[row + i] = restrict_at(in, {i, j, 0}, lam, bc);
                }
            }
        }
    } else {
#pragma omp parallel for collapse(2) schedule(static)
        for (int k = 0; k < N; ++k)
            for (int j = 0; j < N; ++j) {
                const bool zin = k >= lo && k <= hi;
                const bool yin = j >= lo && j <= hi;
                const std::size_t row =
                    (static_cast<std::size_t>(k) * N + j) * N;
                for (int i = 0; i < N; ++i) {
                    if (zin && yin && i >= lo && i <= hi) {
                        const double* c = v + row + i;
                        double acc = 0.0;
                        for (int r = -1; r <= 1; ++r)
                            for (int q = -1; q <= 1; ++q)
                                for (int p = -1; p <= 1; ++p)
                                    acc += kAxisW[p + 1] * kAxisW[q + 1] * kAxisW[r + 1] *
                                           c[r * sz + q * sy + p * sx];
                        o[row + i] = acc;
                    } else {
                        o[row + i] = restrict_at(in, {i, j, k}, lam, bc);
                    }
                }
            }
    }
}

// ----------------------------------------------------------------------------
// relaxation-interpolation: branch helpers
// ----------------------------------------------------------------------------

struct PassFlags {
    int nonfinite = 0;
    int badstep = 0;
};

// Relax update at one lattice node. Returns the new value and the
// unnormalized diagnostic residual |A(u1) + a*u1 - g| through diag.
template <int DIM>
inline double relax_node(const Field& up, const Field* sig, const Field& g,
                         const BoundarySpec& bc, int i, int j, int k, int lam,
                         double inv_s2, double pref, double kdim, double a,
                         double safety, double& diag) {
    const Grid& gr = up.grid();
    const int N = gr.N;
    const std::size_t pos = up.linear(i, j, k);
    const double uc = up[pos];
    const double sc = sig ? (*sig)[pos] : 1.0;
    const bool fast = i >= lam && i <= N - 1 - lam && j >= lam && j <= N - 1 - lam &&
                      (DIM == 2 || (k >= lam && k <= N - 1 - lam));
    double acc = 0.0;
    double smax = 0.0;
    if (fast) {
        const double* uv = up.data() + pos;
        const double* sv = sig ? sig->data() + pos : nullptr;
        for (const StencilOffset& off : stencil_offsets(DIM)) {
            const std::ptrdiff_t d =
                (static_cast<std::ptrdiff_t>(off.r) * N + off.q) * N + off.p;
            const std::ptrdiff_t dd = d * lam;
            const double sbar = sv ? 0.5 * (sv[dd] + sc) : 1.0;
            acc += sbar * (uv[dd] - uc) * off.inv_l2;
            smax = std::max(smax, sbar);
        }
    } else {
        for (const StencilOffset& off : stencil_offsets(DIM)) {
            const int ni = i + off.p * lam, nj = j + off.q * lam, nk = k + off.r * lam;
            const double un = detail::ghost_value(up, bc, ni, nj, nk);
            const double sbar =
                sig ? 0.5 * (detail::mirror_value(*sig, ni, nj, nk) + sc) : 1.0;
            acc += sbar * (un - uc) * off.inv_l2;
            smax = std::max(smax, sbar);
        }
    }
    const double op = acc * pref * inv_s2;  // A(u1) at this node
    const double gc = g[pos];
    diag = std::abs(op + a * uc - gc);
    const double dtau = safety * kdim / (inv_s2 * smax);
    if (!(dtau > 0.0))  // sigma <= 0 slipped past validation
        return std::numeric_limits<double>::quiet_NaN();
    // implicit a-term: fixed point is A(u) + a*u = g
    return (uc + dtau * (op - gc)) / (1.0 - dtau * a);
}

// Multilinear gather of du_prev from the surrounding level-lam cell corners.
template <int DIM>
inline double interp_node(const Field& dup, int i, int j, int k, int lam,
                          double inv_lam) {
    const int m = lam - 1;
    const int i0 = i & ~m, j0 = j & ~m, k0 = k & ~m;
    const double fx = (i - i0) * inv_lam;
    const double fy = (j - j0) * inv_lam;
    const double wx[2] = {1.0 - fx, fx};
    const double wy[2] = {1.0 - fy, fy};
    const int N = dup.grid().N;
    const double* v = dup.data();
    if constexpr (DIM == 2) {
        const std::size_t b = dup.linear(i0, j0, 0);
        double acc = 0.0;
        for (int q = 0; q < 2; ++q)
            for (int p = 0; p < 2; ++p)
                acc += wy[q] * wx[p] *
                       v[b + static_cast<std::size_t>(q) * lam * N + static_cast<std::size_t>(p) * lam];
        return acc;
    } else {
        const double fz = (k - k0) * inv_lam;
        const double wz[2] = {1.0 - fz, fz};
        const std::size_t b = dup.linear(i0, j0, k0);
        const std::size_t NN = static_cast<std::size_t>(N) * N;
        double acc = 0.0;
        for (int r = 0; r < 2; ++r)
            for (int q = 0; q < 2; ++q)
                for (int p = 0; p < 2; ++p)
                    acc += wz[r] * wy[q] * wx[p] *
                           v[b + static_cast<std::size_t>(r) * lam * NN +
                             static_cast<std::size_t>(q) * lam * N +
                             static_cast<std::size_t>(p) * lam];
        return acc;
    }
}

template <int DIM>
double relax_pass(SolveState& st, const Field& g, const Field* sig, double a,
                  double safety, const BoundarySpec& bc, bool homogeneous,
                  PassFlags& flags) {
    const Grid& gr = st.u_prev.grid();
    const int N = gr.N;
    const int lam = 1 << st.level;
    const int mask = lam - 1;
    const double s = lam * gr.h;
    const double inv_s2 = 1.0 / (s * s);
    const double inv_lam = 1.0 / lam;
    const double pref = stencil_prefactor(DIM);
    const double kdim = step_constant(DIM);

    const Field& up = st.u_prev;
    const Field& dup = st.du_prev;
    Field& un = st.u;
    Field& dun = st.du;

    double diag_max = 0.0;
    int nonfinite = 0, badstep = 0;
    if (!(safety > 0.0)) badstep = 1;

    const int KMAX = DIM == 2 ? 1 : N;
#pragma omp parallel for collapse(2) schedule(static) \
    reduction(max : diag_max) reduction(| : nonfinite) reduction(| : badstep)
    for (int k = 0; k < KMAX; ++k)
        for (int j = 0; j < N; ++j) {
            const std::size_t row =
                (static_cast<std::size_t>(k) * (DIM == 2 ? 0 : N) + j) * static_cast<std::size_t>(N);
            const bool jk_face =
                j == 0 || j == N - 1 || (DIM == 3 && (k == 0 || k == N - 1));
            const int jk_bits = j | (DIM == 3 ? k : 0);
            for (int i = 0; i < N; ++i) {
                const std::size_t pos = row + i;
                double value;
                double du_value = 0.0;
                const bool on_face = jk_face || i == 0 || i == N - 1;
                if (on_face && bc.on_dirichlet({i, j, k}, DIM, N)) {
                    // boundary data enters du so the first pass of a level
                    // spreads it to neighbors through interpolation
                    value = homogeneous ? 0.0 : bc.dirichlet_value({i, j, k}, DIM, N);
                    du_value = value - up[pos];
                } else if (((i | jk_bits) & mask) == 0) {
                    double diag;
                    value = relax_node<DIM>(up, sig, g, bc, i, j, k, lam, inv_s2,
                                            pref, kdim, a, safety, diag);
                    diag_max = std::max(diag_max, diag);
                    du_value = value - up[pos];
                } else {
                    value = up[pos] + interp_node<DIM>(dup, i, j, k, lam, inv_lam);
                }
                nonfinite |= !std::isfinite(value);
                un[pos] = value;
                dun[pos] = du_value;
            }
        }

    flags.nonfinite = nonfinite;
    flags.badstep = badstep;
    return diag_max;
}

// ----------------------------------------------------------------------------
// residual update at lam = 1
// ----------------------------------------------------------------------------

template <int DIM>
void subtract_operator(Field& r, const Field& e, const OperatorCoefficients& coeff,
                       const BoundarySpec& bc) {
    const Grid& g = e.grid();
    const int N = g.N;
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double pref = stencil_prefactor(DIM);
    const Field* sig = coeff.sigma;
    const double a = coeff.a;

    const int KMAX = DIM == 2 ? 1 : N;
#pragma omp parallel for collapse(2) schedule(static)
    for (int k = 0; k < KMAX; ++k)
        for (int j = 0; j < N; ++j) {
            const std::size_t row =
                (static_cast<std::size_t>(k) * (DIM == 2 ? 0 : N) + j) * static_cast<std::size_t>(N);
            const bool jk_in = j >= 1 && j <= N - 2 && (DIM == 2 || (k >= 1 && k <= N - 2));
            for (int i = 0; i < N; ++i) {
                const std::size_t pos = row + i;
                const double ec = e[pos];
                const double sc = sig ? (*sig)[pos] : 1.0;
                double acc = 0.0;
                if (jk_in && i >= 1 && i <= N - 2) {
                    const double* ev = e.data() + pos;
                    const double* sv = sig ? sig->data() + pos : nullptr;
                    for (const StencilOffset& off : stencil_offsets(DIM)) {
                        const std::ptrdiff_t d =
                            (static_cast<std::ptrdiff_t>(off.r) * N + off.q) * N + off.p;
                        const double sbar = sv ? 0.5 * (sv[d] + sc) : 1.0;
                        acc += sbar * (ev[d] - ec) * off.inv_l2;
                    }
                } else {
                    for (const StencilOffset& off : stencil_offsets(DIM)) {
                        const int ni = i + off.p, nj = j + off.q, nk = k + off.r;
                        const double en = detail::ghost_value(e, bc, ni, nj, nk);
                        const double sbar =
                            sig ? 0.5 * (detail::mirror_value(*sig, ni, nj, nk) + sc) : 1.0;
                        acc += sbar * (en - ec) * off.inv_l2;
                    }
                }
                r[pos] -= acc * pref * inv_h2 + a * ec;
            }
        }
}

void zero_dirichlet_faces(Field& r, const BoundarySpec& bc) {
    const Grid& g = r.grid();
    const int N = g.N;
    const std::size_t total = g.total;
    if (!bc.any_dirichlet(g.dim)) return;
    for (std::size_t pos = 0; pos < total; ++pos) {
        const NodeIndex idx = r.node_of(pos);
        if (bc.on_dirichlet(idx, g.dim, N)) r[pos] = 0.0;
    }
}

}  // namespace

// ============================================================================
// Public kernels
// ============================================================================

void restriction_into(const Field& f, int v, const BoundarySpec& bc,
                      Field& out, Field& scratch, std::uint64_t* work) {
    if (v == 0) {
        out = f;
        return;
    }
    const int dim = f.grid().dim;
    const Field* src = &f;
    // ping-pong between scratch and out; arrange to finish in out
    Field* dst = (v % 2 == 1) ? &out : &scratch;
    for (int m = 0; m < v; ++m) {
        const int lam = 1 << m;
        if (dim == 2)
            restrict_pass<2>(*src, *dst, lam, bc);
        else
            restrict_pass<3>(*src, *dst, lam, bc);
        src = dst;
        dst = (dst == &out) ? &scratch : &out;
    }
    if (work) *work += static_cast<std::uint64_t>(v);
}

Field restriction(const Field& f, int v, const BoundarySpec& bc, std::uint64_t* work) {
    Field out(f.grid());
    Field scratch(f.grid());
    restriction_into(f, v, bc, out, scratch, work);
    return out;
}

double relaxation_interpolation(SolveState& state, const Field& g,
                                const Field* sigma_level, double a,
                                double safety, const BoundarySpec& bc,
                                bool homogeneous, std::uint64_t* work) {
    PassFlags flags;
    const int dim = state.u.grid().dim;
    const double diag =
        dim == 2 ? relax_pass<2>(state, g, sigma_level, a, safety, bc, homogeneous, flags)
                 : relax_pass<3>(state, g, sigma_level, a, safety, bc, homogeneous, flags);
    if (flags.badstep)
        throw kernel_error("relaxation_interpolation: non-positive pseudo-time step");
    if (flags.nonfinite)
        throw kernel_error("relaxation_interpolation: non-finite value produced");
    if (work) *work += 1;
    return diag;
}

void residual_update(Field& r, const Field& e, const OperatorCoefficients& coeff,
                     const BoundarySpec& bc) {
    if (e.grid().dim == 2)
        subtract_operator<2>(r, e, coeff, bc);
    else
        subtract_operator<3>(r, e, coeff, bc);
    zero_dirichlet_faces(r, bc);
}

Field residual(const Field& u, const Field& f, const OperatorCoefficients& coeff,
               const BoundarySpec& bc) {
    Field r = f;
    residual_update(r, u, coeff, bc);
    return r;
}

double trapezoid_mean(const Field& f) {
    const Grid& g = f.grid();
    const int N = g.N;
    // serial Kahan sum: fixed order regardless of thread count
    double sum = 0.0, comp = 0.0;
    for (std::size_t pos = 0; pos < g.total; ++pos) {
        const NodeIndex idx = f.node_of(pos);
        double w = 1.0;
        if (idx.i == 0 || idx.i == N - 1) w *= 0.5;
        if (idx.j == 0 || idx.j == N - 1) w *= 0.5;
        if (g.dim == 3 && (idx.k == 0 || idx.k == N - 1)) w *= 0.5;
        const double y = w * f[pos] - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double wsum = 1.0;
    for (int d = 0; d < g.dim; ++d) wsum *= static_cast<double>(N - 1);
    return sum / wsum;
}

void zero_mean_projection(Field& f) {
    const double mean = trapezoid_mean(f);
    const std::size_t total = f.size();
    double* v = f.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(total); ++p)
        v[p] -= mean;
}

void apply_boundary(Field& u, const BoundarySpec& bc, bool homogeneous) {
    const Grid& g = u.grid();
    const int N = g.N;
    for (std::size_t pos = 0; pos < g.total; ++pos) {
        const NodeIndex idx = u.node_of(pos);
        if (bc.on_dirichlet(idx, g.dim, N))
            u[pos] = homogeneous ? 0.0 : bc.dirichlet_value(idx, g.dim, N);
    }
}

double max_abs(const Field& f) {
    const std::size_t total = f.size();
    const double* v = f.data();
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(total); ++p)
        m = std::max(m, std::abs(v[p]));
    return m;
}

}  // namespace sgml
