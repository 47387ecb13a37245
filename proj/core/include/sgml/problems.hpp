/// @file problems.hpp
/// @brief Experiment definitions: manufactured Poisson problems, singular
///        curve sources, grid deformation, the knotted-vortex flow, and the
///        heterogeneous capacitor, plus derivative fields and streamlines.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "sgml/cycle.hpp"
#include "sgml/grid.hpp"

namespace sgml {

// ============================================================================
// Geometry helpers
// ============================================================================

using Point = std::array<double, 3>;  ///< z = 0 in 2D

/// Ordered polyline in the unit domain. Samples may carry a vector payload
/// (the unit tangent scaled by circulation for vortex deposition).
struct Curve {
    std::vector<Point> points;
    std::vector<Point> payload;  ///< empty or one vector per point
    bool closed = false;
};

struct VectorField {
    std::array<Field, 3> comp;  ///< comp[2] unused in 2D
    int dim = 2;

    VectorField() = default;
    explicit VectorField(const Grid& g)
        : comp{Field(g), Field(g), Field(g)}, dim(g.dim) {}
    const Grid& grid() const { return comp[0].grid(); }
};

// ============================================================================
// Manufactured Poisson problems
// ============================================================================

/// 2D Dirichlet Poisson on the unit square with exact solution
///   u(x,y) = -x^2 y^2 (1 - x^2)(1 - y^2),    u = 0 on the boundary,
/// and source f = laplacian(u); f(0.5,0.5) = 0.375, u(0.5,0.5) = -9/256.
ProblemSpec poisson2d_problem(int n);

/// 3D Dirichlet Poisson with u = sin(pi x) sin(pi y) sin(pi z),
/// f = -3 pi^2 u; smooth manufactured case for oracle equivalence.
ProblemSpec poisson3d_problem(int n);

/// Relative L1 error against the problem's exact solution by trapezoid
/// quadrature: integral|u - v| / integral|u|. Throws on zero denominator.
double l1_error(const Field& v_h, const ExactSolution& exact);

// ============================================================================
// Curves and singular sources
// ============================================================================

/// Resamples a polyline to uniform arc spacing: the count of intervals is
/// total length / h rounded to the nearest integer (>= 1), so the spacing
/// divides the length evenly and stays closest to h. Linear interpolation
/// along segments; the first point is preserved. Closed curves wrap.
/// Payload vectors, if present, are replaced by unit tangents of the
/// resampled polyline. Throws on curves of zero length or < 2 points.
Curve resample_curve(const Curve& curve, double h);

/// Scatters a finite delta source supported on the curve: sample strength
/// s * ds (ds = uniform arc element) lands on the <= 2^dim surrounding nodes
/// with tensor-hat weights, scaled by 1/h^dim, so the trapezoid integral of
/// the field equals the total deposited mass to roundoff. `strength` is the
/// scalar line density s. Throws if a sample leaves the unit domain.
Field deposit_delta(const Curve& curve, const Grid& grid, double strength);

/// Vector variant: deposits payload[i] * ds per sample into 3 components.
VectorField deposit_delta_vector(const Curve& curve, const Grid& grid);

// ============================================================================
// Grid deformation
// ============================================================================

/// Potential problem for node attraction toward a curve:
///   div grad u + a*u = f_raw - mean(f_raw),  all-Neumann, sigma = 1,
/// with f_raw the deposited unit-density curve delta. Keeps the raw source
/// and its raw integral (the curve length) for the velocity formula.
struct DeformationSetup {
    ProblemSpec problem;
    Field f_raw;
    double raw_integral = 0.0;  ///< trapezoid integral of f_raw (pre-projection)
};

DeformationSetup deformation_problem(const Curve& curve, double a, int n);

/// Node velocity at pseudo-time t:
///   v = -grad(u) / (t * f_raw + raw_integral).
/// The denominator uses the RAW deposited source; far from the curve it is
/// the constant raw_integral. Throws if the denominator vanishes at a node.
VectorField deformation_velocity(const Field& u, const Field& f_raw,
                                 double raw_integral, double t);

/// Forward-Euler node motion dx/dt = v(x, tau) from tau = 0 to t in `steps`
/// increments; grad(u) and f_raw are sampled multilinearly at the moving
/// positions. Returns one position per grid node (initially the lattice).
std::vector<Point> move_nodes(const Field& u, const Field& f_raw,
                              double raw_integral, double t, int steps);

// ============================================================================
// Knotted vortex flow
// ============================================================================

/// Overhand-knot curve scaled by r, translated to the domain center:
///   x(t) = r (sin t + 2 sin 2t),  y(t) = r (cos t - 2 cos 2t),
///   z(t) = -r sin 3t,             t in [0, 2pi).
/// Verifies the translated curve stays inside (0,1)^3 (max |y| = 3r).
struct TrifoilSetup {
    std::array<ProblemSpec, 3> psi;  ///< laplacian(psi_c) = -omega_c, Dirichlet 0
    Curve curve;                     ///< resampled, unit-tangent payload
    VectorField omega;               ///< unit-circulation tangential vorticity
};

TrifoilSetup trifoil_problem(int n, double r);

/// curl by central differences inside, second-order one-sided at faces
/// (3D only). Discrete div(curl(.)) vanishes to roundoff at interior nodes
/// because the difference operators commute.
VectorField curl(const VectorField& psi);

/// Gradient with the same differencing; defined on the full grid.
VectorField gradient(const Field& u);

/// Divergence with the same differencing; used by identity checks.
Field divergence(const VectorField& v);

/// Multilinear sample of a vector field at a physical point.
Point sample_vector(const VectorField& v, const Point& p);

enum class StreamlineStop { max_steps, left_domain, stagnation };

struct Streamline {
    std::vector<Point> points;
    StreamlineStop stop = StreamlineStop::max_steps;
};

/// Classical RK4 with multilinear velocity sampling. Terminates when a stage
/// leaves the unit domain, after max_steps, or when |v| < 1e-12.
Streamline integrate_streamline(const VectorField& v, const Point& seed,
                                double step, int max_steps);

// ============================================================================
// Heterogeneous capacitor
// ============================================================================

/// div(sigma grad u) = 0 on the unit cube with
///   sigma(x) = 0.55 +/- 0.45 tanh((r - 0.2)/0.1),  r = |x - center|:
/// mode "low"  -> + sign, conductivity ~0.1 inside the sphere, ~1 outside;
/// mode "high" -> - sign, the opposite. Plates: z = 1 Dirichlet +1,
/// z = 0 Dirichlet -1; lateral faces Neumann. The relaxation kernel's local
/// step bound absorbs the coefficient contrast.
ProblemSpec capacitor_problem(int n, const std::string& mode);

}  // namespace sgml
