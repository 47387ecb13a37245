/// @file grid.cpp
/// @brief Lattice construction and boundary-face bookkeeping.

#include "sgml/grid.hpp"

#include <cmath>

namespace sgml {

Grid make_grid(int dim, int n) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("make_grid: dim must be 2 or 3");
    if (n < 1 || n > 13)
        throw std::invalid_argument("make_grid: n must lie in [1, 13]");
    Grid g;
    g.dim = dim;
    g.n = n;
    g.N = (1 << n) + 1;
    g.h = 1.0 / (g.N - 1);
    g.total = 1;
    for (int d = 0; d < dim; ++d) g.total *= static_cast<std::size_t>(g.N);
    return g;
}

BoundarySpec BoundarySpec::all_dirichlet(double value) {
    BoundarySpec bc;
    for (auto& f : bc.faces) f = {BcKind::dirichlet, value};
    return bc;
}

BoundarySpec BoundarySpec::all_neumann() {
    BoundarySpec bc;
    for (auto& f : bc.faces) f = {BcKind::neumann, 0.0};
    return bc;
}

bool BoundarySpec::any_dirichlet(int dim) const {
    for (int a = 0; a < dim; ++a)
        for (int s = 0; s < 2; ++s)
            if (face(a, s).kind == BcKind::dirichlet) return true;
    return false;
}

bool BoundarySpec::on_dirichlet(const NodeIndex& idx, int dim, int N) const {
    const int c[3] = {idx.i, idx.j, idx.k};
    for (int a = 0; a < dim; ++a) {
        if (c[a] == 0 && face(a, 0).kind == BcKind::dirichlet) return true;
        if (c[a] == N - 1 && face(a, 1).kind == BcKind::dirichlet) return true;
    }
    return false;
}

double BoundarySpec::dirichlet_value(const NodeIndex& idx, int dim, int N) const {
    const int c[3] = {idx.i, idx.j, idx.k};
    for (int a = 0; a < dim; ++a) {
        if (c[a] == 0 && face(a, 0).kind == BcKind::dirichlet)
            return face(a, 0).value;
        if (c[a] == N - 1 && face(a, 1).kind == BcKind::dirichlet)
            return face(a, 1).value;
    }
    throw std::logic_error("dirichlet_value: node is not on a Dirichlet face");
}

}  // namespace sgml
