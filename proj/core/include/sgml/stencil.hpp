/// @file stencil.hpp
/// @brief Pointwise numerical operators: hat weights, restriction averages,
///        the radial divergence stencil, and stable pseudo-time steps.
///
/// The discrete operator is the all-neighbors ("radial") form of
/// div(sigma grad u) + a*u at level spacing s = lam*h:
///
///   A(u)_c = pref/s^2 * sum_off  sbar * (u_nb - u_c) / l^2,
///   sbar   = (sigma_nb + sigma_c) / 2,     l^2 = p^2 + q^2 (+ r^2),
///   pref   = 1/2 in 2D (8 offsets),  3/13 in 3D (26 offsets).
///
/// These constants make quadratics exact: applying A with sigma = 1 to
/// x^2 + y^2 + z^2 gives 6 at interior nodes up to roundoff.
///
/// Out-of-range neighbor reads resolve per face condition, one axis at a
/// time (the rules compose at corners and the composition order cancels):
///   Neumann   u(-s) = u(+s)            even mirror
///   Dirichlet u(-s) = 2*u(0) - u(+s)   odd about the stored face value
///
/// Explicit pseudo-time stability (Gershgorin on the assembled rows):
///   dtau <= K_dim * s^2 / sbar_max,  K_2 = 1/3,  K_3 = 13/44,
/// where sbar_max is the largest face-averaged sigma over the footprint.
/// With dtau = safety * that bound (safety in (0,1]) the relaxation update is
/// a convex combination of neighbor values, so the discrete max principle
/// holds pass by pass.

#pragma once

#include <cmath>
#include <span>

#include "sgml/grid.hpp"

namespace sgml {

// ============================================================================
// Offset tables
// ============================================================================

struct StencilOffset {
    int p = 0, q = 0, r = 0;
    double inv_l2 = 0.0;  ///< 1 / (p^2 + q^2 + r^2)
};

/// The 8 (2D) or 26 (3D) nonzero offsets of {-1,0,1}^dim.
std::span<const StencilOffset> stencil_offsets(int dim);

/// Consistency prefactor of the radial stencil: 1/2 in 2D, 3/13 in 3D.
constexpr double stencil_prefactor(int dim) { return dim == 2 ? 0.5 : 3.0 / 13.0; }

/// Stability constant K_dim: dtau <= K_dim * (lam*h)^2 / sbar_max.
constexpr double step_constant(int dim) { return dim == 2 ? 1.0 / 3.0 : 13.0 / 44.0; }

// ============================================================================
// Interpolation / restriction weights
// ============================================================================

/// Linear interpolation kernel: max(0, 1 - |x|).
inline double hat(double x) { return std::max(0.0, 1.0 - std::abs(x)); }

/// Per-axis restriction weight for offset component o in {-1,0,1}:
/// 1/2 at the center, 1/4 at each neighbor. Tensor products give the
/// 2D weights {1/4, 1/8, 1/16} and 3D weights {1/8, 1/16, 1/32, 1/64};
/// they sum to 1 exactly in either dimension.
inline double restrict_axis_weight(int o) { return o == 0 ? 0.5 : 0.25; }

// ============================================================================
// Ghost-aware reads
// ============================================================================

struct OperatorCoefficients {
    const Field* sigma = nullptr;  ///< positive everywhere; nullptr means sigma = 1
    double a = 0.0;                ///< Helmholtz constant
};

namespace detail {

/// Reads u at possibly out-of-range signed coordinates, resolving one axis
/// at a time. Neumann faces mirror; Dirichlet faces reflect oddly about the
/// stored face-node value, so boundary data enters through the field itself.
double ghost_value(const Field& u, const BoundarySpec& bc, int i, int j, int k);

/// Even-mirror read regardless of bc; used for sigma (odd reflection could
/// make a positive coefficient negative).
double mirror_value(const Field& u, int i, int j, int k);

}  // namespace detail

// ============================================================================
// Pointwise operations
// ============================================================================

/// Weighted 9/27-point average of f around idx at spacing lam*h
/// (center 1/4, edge 1/8, corner 1/16 in 2D; 1/8, 1/16, 1/32, 1/64 in 3D).
/// Out-of-range neighbors resolve per bc.
double restrict_at(const Field& f, const NodeIndex& idx, int lam, const BoundarySpec& bc);

/// The radial discrete div(sigma grad u) + a*u at idx, spacing lam*h.
/// sigma is taken from coeff.sigma (1 if null) with face averaging; the
/// sigma field must already be the restriction for this level when lam > 1.
double apply_operator(const Field& u, const OperatorCoefficients& coeff,
                      const NodeIndex& idx, int lam, const BoundarySpec& bc);

/// Largest stable pseudo-time step at spacing lam*h times safety:
///   dtau = safety * K_dim * (lam*h)^2 / sbar_max
/// with sbar_max the global max of face-averaged sigma (equals max sigma).
/// The relaxation kernel applies the same formula per node with the local
/// footprint max, which coincides with this for constant sigma.
/// Throws std::invalid_argument for safety outside (0,1].
double stable_step(const OperatorCoefficients& coeff, const Grid& grid,
                   int lam, double safety);

}  // namespace sgml
