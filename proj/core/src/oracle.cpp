/// @file oracle.cpp
/// @brief Sparse assembly of the lam = 1 operator and direct/Jacobi solves.

#include "sgml/oracle.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/SparseLU>

#include "sgml/stencil.hpp"

namespace sgml {

namespace {

/// Trapezoid quadrature weight of a node (1/2 per axis on a face); the left
/// null vector of the assembled all-Neumann a = 0 operator.
double trapezoid_weight(const NodeIndex& idx, int dim, int N) {
    double w = (idx.i == 0 || idx.i == N - 1) ? 0.5 : 1.0;
    w *= (idx.j == 0 || idx.j == N - 1) ? 0.5 : 1.0;
    if (dim == 3) w *= (idx.k == 0 || idx.k == N - 1) ? 0.5 : 1.0;
    return w;
}

/// Distributes one ghost read over stored nodes, mirroring the runtime ghost
/// resolution axis by axis: even reflection for Neumann, odd reflection about
/// the face node for Dirichlet (the face node later moves to the RHS).
void ghost_weights(const Grid& g, const BoundarySpec& bc, int i, int j, int k,
                   double w, std::map<std::size_t, double>& out) {
    const int N = g.N;
    if (i < 0 || i > N - 1) {
        const int side = i < 0 ? 0 : 1;
        const int mi = mirror_index(i, N);
        if (bc.face(0, side).kind == BcKind::neumann) {
            ghost_weights(g, bc, mi, j, k, w, out);
        } else {
            ghost_weights(g, bc, side == 0 ? 0 : N - 1, j, k, 2.0 * w, out);
            ghost_weights(g, bc, mi, j, k, -w, out);
        }
        return;
    }
    if (j < 0 || j > N - 1) {
        const int side = j < 0 ? 0 : 1;
        const int mj = mirror_index(j, N);
        if (bc.face(1, side).kind == BcKind::neumann) {
            ghost_weights(g, bc, i, mj, k, w, out);
        } else {
            ghost_weights(g, bc, i, side == 0 ? 0 : N - 1, k, 2.0 * w, out);
            ghost_weights(g, bc, i, mj, k, -w, out);
        }
        return;
    }
    if (k < 0 || k > N - 1) {
        const int side = k < 0 ? 0 : 1;
        const int mk = mirror_index(k, N);
        if (bc.face(2, side).kind == BcKind::neumann) {
            ghost_weights(g, bc, i, j, mk, w, out);
        } else {
            ghost_weights(g, bc, i, j, side == 0 ? 0 : N - 1, 2.0 * w, out);
            ghost_weights(g, bc, i, j, mk, -w, out);
        }
        return;
    }
    out[static_cast<std::size_t>(i) +
        static_cast<std::size_t>(N) *
            (static_cast<std::size_t>(j) + static_cast<std::size_t>(N) * k)] += w;
}

double mirrored_sigma(const Field& sigma, int i, int j, int k) {
    const int N = sigma.grid().N;
    return sigma.at(mirror_index(i, N), mirror_index(j, N),
                    sigma.grid().dim == 3 ? mirror_index(k, N) : 0);
}

}  // namespace

AssembledSystem assemble(const ProblemSpec& problem) {
    const Grid& g = problem.grid;
    if (problem.f.grid() != g)
        throw std::invalid_argument("assemble: source grid mismatch");
    if (problem.sigma.size() && problem.sigma.grid() != g)
        throw std::invalid_argument("assemble: sigma grid mismatch");

    AssembledSystem sys;
    sys.grid = g;
    sys.bc = problem.bc;
    sys.singular_neumann = problem.bc.all_faces_neumann(g.dim) && problem.a == 0.0;

    sys.unknown_of_node.assign(g.total, -1);
    for (std::size_t p = 0; p < g.total; ++p) {
        const NodeIndex idx = problem.f.node_of(p);
        if (!problem.bc.on_dirichlet(idx, g.dim, g.N)) {
            sys.unknown_of_node[p] = static_cast<std::ptrdiff_t>(sys.node_of_unknown.size());
            sys.node_of_unknown.push_back(p);
        }
    }
    const std::size_t m = sys.node_of_unknown.size();
    if (m > oracle_max_unknowns)
        throw std::length_error("assemble: grid too large for the reference solver");

    const auto offsets = stencil_offsets(g.dim);
    const double pref = stencil_prefactor(g.dim);
    const double inv_s2 = 1.0 / (g.h * g.h);
    const Field* sig = problem.sigma_or_null();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(m * (offsets.size() + 1));
    sys.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));

    for (std::size_t row = 0; row < m; ++row) {
        const std::size_t pc = sys.node_of_unknown[row];
        const NodeIndex c = problem.f.node_of(pc);
        const double sc = sig ? (*sig)[pc] : 1.0;

        std::map<std::size_t, double> coeffs;
        double diag = problem.a;
        for (const StencilOffset& off : offsets) {
            const int ni = c.i + off.p, nj = c.j + off.q, nk = c.k + off.r;
            const double sn = sig ? mirrored_sigma(*sig, ni, nj, nk) : 1.0;
            const double w = 0.5 * (sn + sc) * off.inv_l2 * pref * inv_s2;
            ghost_weights(g, problem.bc, ni, nj, nk, w, coeffs);
            diag -= w;
        }
        coeffs[pc] += diag;

        sys.b(static_cast<Eigen::Index>(row)) = problem.f[pc];
        for (const auto& [node, w] : coeffs) {
            const std::ptrdiff_t col = sys.unknown_of_node[node];
            if (col >= 0) {
                trip.emplace_back(static_cast<int>(row), static_cast<int>(col), w);
            } else {
                const NodeIndex idx = problem.f.node_of(node);
                sys.b(static_cast<Eigen::Index>(row)) -=
                    w * problem.bc.dirichlet_value(idx, g.dim, g.N);
            }
        }
    }

    sys.A.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    sys.A.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

namespace {

/// Writes the unknown vector back onto the grid; eliminated nodes take their
/// Dirichlet values.
Field expand(const AssembledSystem& sys, const Eigen::VectorXd& x) {
    Field u(sys.grid);
    for (std::size_t p = 0; p < sys.grid.total; ++p) {
        const std::ptrdiff_t col = sys.unknown_of_node[p];
        if (col >= 0) {
            u[p] = x(static_cast<Eigen::Index>(col));
        } else {
            const NodeIndex idx = u.node_of(p);
            u[p] = sys.bc.dirichlet_value(idx, sys.grid.dim, sys.grid.N);
        }
    }
    return u;
}

Eigen::VectorXd unknown_trapezoid_weights(const AssembledSystem& sys) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(sys.node_of_unknown.size()));
    Field probe(sys.grid);
    for (std::size_t row = 0; row < sys.node_of_unknown.size(); ++row) {
        const NodeIndex idx = probe.node_of(sys.node_of_unknown[row]);
        w(static_cast<Eigen::Index>(row)) =
            trapezoid_weight(idx, sys.grid.dim, sys.grid.N);
    }
    return w;
}

}  // namespace

Field reference_solve(const AssembledSystem& sys) {
    const Eigen::Index m = sys.A.rows();
    if (!sys.singular_neumann) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(sys.A);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("reference_solve: factorization failed");
        const Eigen::VectorXd x = lu.solve(sys.b);
        return expand(sys, x);
    }

    // Bordered system: append the trapezoid weights as an extra row (pins the
    // weighted mean to 0) and column (absorbs any incompatible component).
    const Eigen::VectorXd w = unknown_trapezoid_weights(sys);
    Eigen::SparseMatrix<double> B(m + 1, m + 1);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(sys.A.nonZeros()) + 2 * static_cast<std::size_t>(m));
    for (int k = 0; k < sys.A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                              it.value());
    for (Eigen::Index r = 0; r < m; ++r) {
        trip.emplace_back(static_cast<int>(r), static_cast<int>(m), w(r));
        trip.emplace_back(static_cast<int>(m), static_cast<int>(r), w(r));
    }
    B.setFromTriplets(trip.begin(), trip.end());

    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = sys.b;
    rhs(m) = 0.0;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(B);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("reference_solve: bordered factorization failed");
    const Eigen::VectorXd x = lu.solve(rhs);
    return expand(sys, x.head(m));
}

Field damped_jacobi_solve(const AssembledSystem& sys, double omega,
                          long iterations) {
    const Eigen::Index m = sys.A.rows();
    Eigen::VectorXd diag(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const double d = sys.A.coeff(r, r);
        if (d == 0.0) throw std::runtime_error("damped_jacobi_solve: zero diagonal");
        diag(r) = d;
    }
    Eigen::VectorXd w;
    double wsum = 0.0;
    if (sys.singular_neumann) {
        w = unknown_trapezoid_weights(sys);
        wsum = w.sum();
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    for (long it = 0; it < iterations; ++it) {
        x += omega * (sys.b - sys.A * x).cwiseQuotient(diag);
        if (sys.singular_neumann) x -= (w.dot(x) / wsum) * Eigen::VectorXd::Ones(m);
    }
    return expand(sys, x);
}

Field oracle_apply(const AssembledSystem& sys, const Field& x) {
    if (x.grid() != sys.grid)
        throw std::invalid_argument("oracle_apply: grid mismatch");
    const Eigen::Index m = sys.A.rows();
    Eigen::VectorXd xs(m);
    for (Eigen::Index r = 0; r < m; ++r)
        xs(r) = x[sys.node_of_unknown[static_cast<std::size_t>(r)]];
    const Eigen::VectorXd ys = sys.A * xs;
    Field y(sys.grid);
    for (Eigen::Index r = 0; r < m; ++r)
        y[sys.node_of_unknown[static_cast<std::size_t>(r)]] = ys(r);
    return y;
}

}  // namespace sgml
