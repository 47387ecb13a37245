/// @file kernels_tests.cpp
/// @brief Full-grid pass semantics: restriction cascades, relaxation branch
///        arithmetic, interpolation spreading, residual updates, projections,
///        and thread-count determinism.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <omp.h>

#include "sgml/kernels.hpp"

using namespace sgml;

namespace {

/// Deterministic pseudo-random fill in [-1, 1] (64-bit LCG).
void lcg_fill(Field& f, std::uint64_t seed) {
    std::uint64_t x = seed * 6364136223846793005ull + 1442695040888963407ull;
    for (std::size_t p = 0; p < f.size(); ++p) {
        x = x * 6364136223846793005ull + 1442695040888963407ull;
        f[p] = static_cast<double>(x >> 11) / static_cast<double>(1ull << 53) * 2.0 - 1.0;
    }
}

Field manual_restrict_pass(const Field& in, int lam, const BoundarySpec& bc) {
    Field out(in.grid());
    for (std::size_t p = 0; p < in.size(); ++p)
        out[p] = restrict_at(in, in.node_of(p), lam, bc);
    return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("restriction at level 0 is the identity and costs nothing") {
    const Grid g = make_grid(2, 3);
    Field f(g);
    lcg_fill(f, 7);
    std::uint64_t work = 0;
    const Field r = restriction(f, 0, BoundarySpec::all_neumann(), &work);
    CHECK(r == f);
    CHECK(work == 0);
}

TEST_CASE("restriction(v) equals v nested averaging passes with doubling spans") {
    const Grid g = make_grid(2, 4);
    Field f(g);
    lcg_fill(f, 11);
    const BoundarySpec bc = BoundarySpec::all_dirichlet(0.0);

    std::uint64_t work = 0;
    const Field r3 = restriction(f, 3, bc, &work);
    CHECK(work == 3);

    Field manual = manual_restrict_pass(f, 1, bc);
    manual = manual_restrict_pass(manual, 2, bc);
    manual = manual_restrict_pass(manual, 4, bc);
    for (std::size_t p = 0; p < r3.size(); ++p)
        CHECK(r3[p] == doctest::Approx(manual[p]).epsilon(1e-15));
}

TEST_CASE("restriction preserves constants exactly under both boundary kinds") {
    for (int dim : {2, 3}) {
        const Grid g = make_grid(dim, 3);
        Field c(g, -4.75);
        for (const BoundarySpec& bc :
             {BoundarySpec::all_dirichlet(-4.75), BoundarySpec::all_neumann()}) {
            const Field r = restriction(c, 3, bc);
            for (std::size_t p = 0; p < r.size(); ++p)
                CHECK(r[p] == doctest::Approx(-4.75).epsilon(1e-14));
        }
    }
}

TEST_CASE("relaxation branch applies the implicit-a Euler step") {
    const Grid g = make_grid(2, 2);  // N = 5
    const BoundarySpec bc = BoundarySpec::all_dirichlet(0.0);
    const double a = 0.7, safety = 0.9;

    SolveState state(g);
    state.reset_level(0);
    lcg_fill(state.u_prev, 3);
    for (std::size_t p = 0; p < state.u_prev.size(); ++p) {
        const NodeIndex idx = state.u_prev.node_of(p);
        if (bc.on_dirichlet(idx, g.dim, g.N)) state.u_prev[p] = 0.0;
    }
    Field gsrc(g);
    lcg_fill(gsrc, 5);

    const double diag = relaxation_interpolation(state, gsrc, nullptr, a, safety,
                                                 bc, /*homogeneous=*/false);

    const OperatorCoefficients coeff{nullptr, a};
    const double dtau = stable_step(coeff, g, 1, safety);
    double expected_diag = 0.0;
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i <= 4; ++i) {
            if (bc.on_dirichlet({i, j, 0}, 2, g.N)) {
                CHECK(state.u.at(i, j) == 0.0);
                continue;
            }
            const double op = apply_operator(state.u_prev, coeff, {i, j, 0}, 1, bc);
            const double u1 = state.u_prev.at(i, j);
            const double want = (u1 + dtau * (op - a * u1 - gsrc.at(i, j))) / (1.0 - dtau * a);
            // apply_operator already contains a*u1; relax feeds A(u1) - g
            CHECK(state.u.at(i, j) == doctest::Approx(want).epsilon(1e-13));
            expected_diag = std::max(expected_diag, std::abs(op - gsrc.at(i, j)));
            CHECK(state.du.at(i, j) == doctest::Approx(want - u1).epsilon(1e-13));
        }
    CHECK(diag == doctest::Approx(expected_diag).epsilon(1e-13));
}

TEST_CASE("dirichlet faces take the stored value or zero on homogeneous cycles") {
    const Grid g = make_grid(2, 2);
    BoundarySpec bc = BoundarySpec::all_dirichlet(3.0);
    SolveState state(g);
    state.reset_level(0);
    lcg_fill(state.u_prev, 9);
    Field gsrc(g);

    relaxation_interpolation(state, gsrc, nullptr, 0.0, 0.9, bc, false);
    CHECK(state.u.at(0, 2) == 3.0);
    CHECK(state.u.at(4, 4) == 3.0);
    CHECK(state.du.at(0, 2) == doctest::Approx(3.0 - state.u_prev.at(0, 2)).epsilon(1e-15));

    state.reset_level(0);
    relaxation_interpolation(state, gsrc, nullptr, 0.0, 0.9, bc, true);
    CHECK(state.u.at(0, 2) == 0.0);
}

TEST_CASE("non-subset nodes add the interpolated previous variation") {
    const Grid g = make_grid(2, 2);  // N = 5, level 1 lattice = even indices
    const BoundarySpec bc = BoundarySpec::all_neumann();
    SolveState state(g);
    state.reset_level(1);
    lcg_fill(state.u_prev, 13);
    lcg_fill(state.du_prev, 17);
    Field gsrc(g);

    relaxation_interpolation(state, gsrc, nullptr, 0.0, 0.9, bc, true);

    // (1,2): between lattice nodes (0,2) and (2,2)
    CHECK(state.u.at(1, 2) ==
          doctest::Approx(state.u_prev.at(1, 2) +
                          0.5 * (state.du_prev.at(0, 2) + state.du_prev.at(2, 2)))
              .epsilon(1e-14));
    // (1,1): cell corners (0,0), (2,0), (0,2), (2,2), weight 1/4 each
    CHECK(state.u.at(1, 1) ==
          doctest::Approx(state.u_prev.at(1, 1) +
                          0.25 * (state.du_prev.at(0, 0) + state.du_prev.at(2, 0) +
                                  state.du_prev.at(0, 2) + state.du_prev.at(2, 2)))
              .epsilon(1e-14));
    // interpolated nodes record no variation of their own
    CHECK(state.du.at(1, 1) == 0.0);
}

TEST_CASE("relaxation throws kernel_error on non-finite input") {
    const Grid g = make_grid(2, 2);
    SolveState state(g);
    state.reset_level(0);
    state.u_prev.at(2, 2) = std::nan("");
    Field gsrc(g);
    CHECK_THROWS_AS(relaxation_interpolation(state, gsrc, nullptr, 0.0, 0.9,
                                             BoundarySpec::all_dirichlet(0.0), true),
                    kernel_error);
}

TEST_CASE("residual matches update form and vanishes on dirichlet faces") {
    const Grid g = make_grid(2, 3);
    const BoundarySpec bc = BoundarySpec::all_dirichlet(0.0);
    Field u(g), f(g);
    lcg_fill(u, 23);
    lcg_fill(f, 29);
    const OperatorCoefficients coeff{nullptr, 0.3};

    const Field r1 = residual(u, f, coeff, bc);
    Field r2 = f;
    residual_update(r2, u, coeff, bc);
    CHECK(r1 == r2);

    for (int i = 0; i <= g.N - 1; ++i) CHECK(r1.at(i, 0) == 0.0);

    // interior agreement with the pointwise operator
    const double expect = f.at(3, 5) - apply_operator(u, coeff, {3, 5, 0}, 1, bc);
    CHECK(r1.at(3, 5) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("zero-mean projection kills the trapezoid mean") {
    const Grid g = make_grid(3, 3);
    Field f(g);
    lcg_fill(f, 31);
    for (std::size_t p = 0; p < f.size(); ++p) f[p] += 2.0;
    zero_mean_projection(f);
    CHECK(std::abs(trapezoid_mean(f)) <= 1e-14);
}

TEST_CASE("trapezoid mean halves face weights") {
    const Grid g = make_grid(2, 1);  // N = 3
    Field f(g);
    f.at(1, 1) = 4.0;  // the only full-weight node
    CHECK(trapezoid_mean(f) == doctest::Approx(1.0).epsilon(1e-15));
    Field c(g, 5.0);
    CHECK(trapezoid_mean(c) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("apply_boundary writes dirichlet values only") {
    const Grid g = make_grid(2, 2);
    BoundarySpec bc = BoundarySpec::all_neumann();
    bc.face(0, 0) = {BcKind::dirichlet, 2.0};
    Field u(g, 1.0);
    apply_boundary(u, bc, false);
    CHECK(u.at(0, 3) == 2.0);
    CHECK(u.at(4, 3) == 1.0);  // Neumann face untouched
    apply_boundary(u, bc, true);
    CHECK(u.at(0, 3) == 0.0);
}

TEST_CASE("max_abs finds the extreme value") {
    const Grid g = make_grid(2, 2);
    Field f(g);
    f.at(3, 1) = -7.5;
    f.at(1, 3) = 6.0;
    CHECK(max_abs(f) == 7.5);
}

TEST_CASE("relaxation respects the max principle with zero source") {
    const Grid g = make_grid(2, 3);
    const BoundarySpec bc = BoundarySpec::all_dirichlet(0.0);
    SolveState state(g);
    state.reset_level(0);
    lcg_fill(state.u_prev, 41);
    Field gsrc(g);
    double prev = max_abs(state.u_prev);
    for (int pass = 0; pass < 30; ++pass) {
        relaxation_interpolation(state, gsrc, nullptr, 0.0, 0.9, bc, true);
        const double now = max_abs(state.u);
        CHECK(now <= prev + 1e-15);
        prev = now;
        state.swap_buffers();
    }
}

TEST_CASE("passes are bit-identical across thread counts") {
    const Grid g = make_grid(2, 4);
    const BoundarySpec bc = BoundarySpec::all_dirichlet(0.25);
    Field f(g), sigma(g);
    lcg_fill(f, 51);
    lcg_fill(sigma, 53);
    for (std::size_t p = 0; p < sigma.size(); ++p) sigma[p] = 1.0 + 0.4 * sigma[p];

    const int saved = omp_get_max_threads();

    omp_set_num_threads(1);
    const Field r1 = restriction(f, 2, bc);
    SolveState s1(g);
    s1.reset_level(1);
    lcg_fill(s1.u_prev, 57);
    lcg_fill(s1.du_prev, 59);
    relaxation_interpolation(s1, f, &sigma, 0.1, 0.9, bc, false);

    omp_set_num_threads(4);
    const Field r4 = restriction(f, 2, bc);
    SolveState s4(g);
    s4.reset_level(1);
    lcg_fill(s4.u_prev, 57);
    lcg_fill(s4.du_prev, 59);
    relaxation_interpolation(s4, f, &sigma, 0.1, 0.9, bc, false);

    omp_set_num_threads(saved);

    CHECK(std::memcmp(r1.data(), r4.data(), r1.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(s1.u.data(), s4.u.data(), s1.u.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(s1.du.data(), s4.du.data(), s1.du.size() * sizeof(double)) == 0);
}

}  // TEST_SUITE
