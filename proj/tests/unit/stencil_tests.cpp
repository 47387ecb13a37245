/// @file stencil_tests.cpp
/// @brief Radial operator identities, ghost reads, restriction weights,
///        and the stable-step bound.

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sgml/stencil.hpp"

using namespace sgml;

namespace {

Field coordinate_quadratic(const Grid& g) {
    Field u(g);
    for (std::size_t p = 0; p < u.size(); ++p) {
        const NodeIndex idx = u.node_of(p);
        const double x = idx.i * g.h, y = idx.j * g.h, z = idx.k * g.h;
        u[p] = x * x + y * y + (g.dim == 3 ? z * z : 0.0);
    }
    return u;
}

}  // namespace

TEST_SUITE("stencil") {

TEST_CASE("offset tables cover all nonzero neighbors") {
    CHECK(stencil_offsets(2).size() == 8);
    CHECK(stencil_offsets(3).size() == 26);
    for (const StencilOffset& o : stencil_offsets(3)) {
        const int l2 = o.p * o.p + o.q * o.q + o.r * o.r;
        CHECK(l2 >= 1);
        CHECK(l2 <= 3);
        CHECK(o.inv_l2 == doctest::Approx(1.0 / l2).epsilon(1e-16));
    }
}

TEST_CASE("hat function and restriction axis weights") {
    CHECK(hat(0.0) == 1.0);
    CHECK(hat(0.5) == 0.5);
    CHECK(hat(1.0) == 0.0);
    CHECK(hat(-0.25) == 0.75);
    CHECK(hat(2.0) == 0.0);
    CHECK(restrict_axis_weight(0) == 0.5);
    CHECK(restrict_axis_weight(-1) == 0.25);
    CHECK(restrict_axis_weight(1) == 0.25);
}

TEST_CASE("operator is exact on quadratics away from faces") {
    // laplacian(x^2 + y^2) = 4 in 2D; laplacian(x^2 + y^2 + z^2) = 6 in 3D.
    for (int dim : {2, 3}) {
        const Grid g = make_grid(dim, 3);
        const Field u = coordinate_quadratic(g);
        const OperatorCoefficients coeff{nullptr, 0.0};
        const BoundarySpec bc = BoundarySpec::all_dirichlet();
        const double expected = dim == 2 ? 4.0 : 6.0;
        for (int lam : {1, 2}) {
            for (int i = lam; i <= g.N - 1 - lam; ++i)
                for (int j = lam; j <= g.N - 1 - lam; ++j) {
                    const int kmax = g.dim == 3 ? g.N - 1 - lam : 0;
                    for (int k = g.dim == 3 ? lam : 0; k <= kmax; ++k) {
                        const double v = apply_operator(u, coeff, {i, j, k}, lam, bc);
                        CHECK(std::abs(v - expected) <= 1e-12);
                    }
                }
        }
    }
}

TEST_CASE("operator adds the Helmholtz term at the node") {
    const Grid g = make_grid(2, 3);
    const Field u = coordinate_quadratic(g);
    const BoundarySpec bc = BoundarySpec::all_dirichlet();
    const double base = apply_operator(u, {nullptr, 0.0}, {4, 4, 0}, 1, bc);
    const double shifted = apply_operator(u, {nullptr, 2.5}, {4, 4, 0}, 1, bc);
    CHECK(shifted == doctest::Approx(base + 2.5 * u.at(4, 4)).epsilon(1e-14));
}

TEST_CASE("constant sigma scales the operator linearly") {
    const Grid g = make_grid(2, 3);
    const Field u = coordinate_quadratic(g);
    Field sigma(g, 3.0);
    const BoundarySpec bc = BoundarySpec::all_dirichlet();
    const double base = apply_operator(u, {nullptr, 0.0}, {3, 5, 0}, 1, bc);
    const double scaled = apply_operator(u, {&sigma, 0.0}, {3, 5, 0}, 1, bc);
    CHECK(scaled == doctest::Approx(3.0 * base).epsilon(1e-13));
}

TEST_CASE("operator annihilates constants under any boundary regime") {
    for (int dim : {2, 3}) {
        const Grid g = make_grid(dim, 2);
        Field u(g, 7.25);
        // Dirichlet ghosts fold the stored face value, which here equals the
        // constant, so corners and faces stay exact too.
        for (const BoundarySpec& bc :
             {BoundarySpec::all_dirichlet(7.25), BoundarySpec::all_neumann()}) {
            for (std::size_t p = 0; p < u.size(); ++p) {
                const double v = apply_operator(u, {nullptr, 0.0}, u.node_of(p), 1, bc);
                CHECK(std::abs(v) <= 1e-10);
            }
        }
    }
}

TEST_CASE("ghost reads: even mirror for Neumann, odd about face for Dirichlet") {
    const Grid g = make_grid(2, 2);  // N = 5
    Field u(g);
    for (std::size_t p = 0; p < u.size(); ++p) {
        const NodeIndex idx = u.node_of(p);
        u[p] = 1.0 + idx.i * g.h;  // linear in x
    }
    BoundarySpec neumann = BoundarySpec::all_neumann();
    CHECK(detail::ghost_value(u, neumann, -1, 2, 0) ==
          doctest::Approx(u.at(1, 2)).epsilon(1e-15));

    BoundarySpec dir = BoundarySpec::all_dirichlet(0.0);
    // stored face value u(0,2) participates, not the bc constant
    CHECK(detail::ghost_value(u, dir, -1, 2, 0) ==
          doctest::Approx(2.0 * u.at(0, 2) - u.at(1, 2)).epsilon(1e-15));

    // composition: corner ghost resolves x then y
    CHECK(detail::ghost_value(u, neumann, -1, -2, 0) ==
          doctest::Approx(u.at(1, 2)).epsilon(1e-15));

    CHECK(detail::mirror_value(u, -1, 7, 0) == doctest::Approx(u.at(1, 1)).epsilon(1e-15));
}

TEST_CASE("restriction point average preserves constants and linears") {
    const Grid g = make_grid(2, 4);
    Field c(g, 2.5);
    const BoundarySpec bc = BoundarySpec::all_neumann();
    CHECK(restrict_at(c, {0, 0, 0}, 2, bc) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(restrict_at(c, {8, 8, 0}, 4, bc) == doctest::Approx(2.5).epsilon(1e-15));

    Field lin(g);
    for (std::size_t p = 0; p < lin.size(); ++p)
        lin[p] = 3.0 * lin.node_of(p).i * g.h - 1.0;
    // odd offsets cancel pairwise at interior nodes
    CHECK(restrict_at(lin, {8, 8, 0}, 2, bc) ==
          doctest::Approx(lin.at(8, 8)).epsilon(1e-14));
}

TEST_CASE("stable step scales with the squared spacing and sigma max") {
    const Grid g = make_grid(2, 4);
    const OperatorCoefficients unit{nullptr, 0.0};
    const double d1 = stable_step(unit, g, 1, 1.0);
    const double d2 = stable_step(unit, g, 2, 1.0);
    CHECK(d1 == doctest::Approx(step_constant(2) * g.h * g.h).epsilon(1e-15));
    CHECK(d2 == doctest::Approx(4.0 * d1).epsilon(1e-15));
    CHECK(stable_step(unit, g, 1, 0.5) == doctest::Approx(0.5 * d1).epsilon(1e-15));

    Field sigma(g, 4.0);
    const OperatorCoefficients het{&sigma, 0.0};
    CHECK(stable_step(het, g, 1, 1.0) == doctest::Approx(d1 / 4.0).epsilon(1e-15));

    CHECK_THROWS_AS(stable_step(unit, g, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(stable_step(unit, g, 1, 1.5), std::invalid_argument);
}

TEST_CASE("step constants match the dimension-specific bounds") {
    CHECK(step_constant(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
    CHECK(step_constant(3) == doctest::Approx(13.0 / 44.0).epsilon(1e-16));
    CHECK(stencil_prefactor(2) == doctest::Approx(0.5).epsilon(1e-16));
    CHECK(stencil_prefactor(3) == doctest::Approx(3.0 / 13.0).epsilon(1e-16));
}

}  // TEST_SUITE
