/// @file problems.cpp
/// @brief Experiment definitions and the geometry/derivative utilities they
///        share: curve resampling, hat-weight delta deposition, second-order
///        difference fields, multilinear sampling, and RK4 streamlines.

#include "sgml/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgml {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

double sq(double x) { return x * x; }

Point sub(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
Point add_scaled(const Point& a, double s, const Point& b) {
    return {a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
}
double norm(const Point& a) {
    return std::sqrt(sq(a[0]) + sq(a[1]) + sq(a[2]));
}

/// Trapezoid quadrature weight of a node: 1/2 per axis on a face.
double trapezoid_weight(const NodeIndex& idx, int dim, int N) {
    double w = (idx.i == 0 || idx.i == N - 1) ? 0.5 : 1.0;
    w *= (idx.j == 0 || idx.j == N - 1) ? 0.5 : 1.0;
    if (dim == 3) w *= (idx.k == 0 || idx.k == N - 1) ? 0.5 : 1.0;
    return w;
}

/// Multilinear scalar sample; coordinates are clamped into the unit domain
/// so sub-roundoff excursions of moving nodes never read out of range.
double sample_scalar(const Field& f, const Point& p) {
    const Grid& g = f.grid();
    int idx[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int c = 0; c < g.dim; ++c) {
        const double x = std::clamp(p[static_cast<std::size_t>(c)], 0.0, 1.0) / g.h;
        int i0 = static_cast<int>(std::floor(x));
        i0 = std::clamp(i0, 0, g.N - 2);
        idx[c] = i0;
        frac[c] = x - i0;
    }
    const double wx[2] = {1.0 - frac[0], frac[0]};
    const double wy[2] = {1.0 - frac[1], frac[1]};
    double acc = 0.0;
    if (g.dim == 2) {
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a)
                acc += wx[a] * wy[b] * f.at(idx[0] + a, idx[1] + b);
    } else {
        const double wz[2] = {1.0 - frac[2], frac[2]};
        for (int c = 0; c < 2; ++c)
            for (int b = 0; b < 2; ++b)
                for (int a = 0; a < 2; ++a)
                    acc += wx[a] * wy[b] * wz[c] *
                           f.at(idx[0] + a, idx[1] + b, idx[2] + c);
    }
    return acc;
}

/// Second-order first derivative along one axis: central differences inside,
/// one-sided three-point stencils on the two faces. The stencil choice
/// depends only on the node's coordinate along `axis`, so derivative
/// operators along different axes commute exactly; that commutation is what
/// makes the discrete div(curl(.)) vanish to roundoff at every node.
Field axis_derivative(const Field& u, int axis) {
    const Grid& g = u.grid();
    Field d(g);
    const std::ptrdiff_t strides[3] = {1, g.N, static_cast<std::ptrdiff_t>(g.N) * g.N};
    const std::ptrdiff_t s = strides[axis];
    const double inv2h = 1.0 / (2.0 * g.h);
    const double* up = u.data();
    double* dp = d.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(g.total); ++p) {
        const NodeIndex idx = u.node_of(static_cast<std::size_t>(p));
        const int c = axis == 0 ? idx.i : (axis == 1 ? idx.j : idx.k);
        double v;
        if (c == 0)
            v = (-3.0 * up[p] + 4.0 * up[p + s] - up[p + 2 * s]) * inv2h;
        else if (c == g.N - 1)
            v = (3.0 * up[p] - 4.0 * up[p - s] + up[p - 2 * s]) * inv2h;
        else
            v = (up[p + s] - up[p - s]) * inv2h;
        dp[p] = v;
    }
    return d;
}

/// Per-sample arc element of a uniformly resampled curve: half the two
/// adjacent chord lengths (wrapping when closed, half-interval at open ends).
std::vector<double> arc_elements(const Curve& curve) {
    const std::size_t m = curve.points.size();
    std::vector<double> ds(m, 0.0);
    const std::size_t segs = curve.closed ? m : m - 1;
    for (std::size_t s = 0; s < segs; ++s) {
        const double len = norm(sub(curve.points[(s + 1) % m], curve.points[s]));
        ds[s] += 0.5 * len;
        ds[(s + 1) % m] += 0.5 * len;
    }
    return ds;
}

/// Scatters one point mass onto the surrounding cell corners with tensor-hat
/// weights scaled by 1/h^dim. `mass` may be a scalar spread over up to three
/// component fields through `into`.
template <typename Deposit>
void scatter_mass(const Point& p, const Grid& g, Deposit&& into) {
    int idx[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int c = 0; c < g.dim; ++c) {
        const double x = p[static_cast<std::size_t>(c)];
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("deposit_delta: curve sample outside the unit domain");
        int i0 = static_cast<int>(std::floor(x / g.h));
        i0 = std::clamp(i0, 0, g.N - 2);
        idx[c] = i0;
        frac[c] = x / g.h - i0;
    }
    const double inv_hd = g.dim == 2 ? 1.0 / (g.h * g.h) : 1.0 / (g.h * g.h * g.h);
    const double wx[2] = {1.0 - frac[0], frac[0]};
    const double wy[2] = {1.0 - frac[1], frac[1]};
    if (g.dim == 2) {
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a)
                into(idx[0] + a, idx[1] + b, 0, wx[a] * wy[b] * inv_hd);
    } else {
        const double wz[2] = {1.0 - frac[2], frac[2]};
        for (int c = 0; c < 2; ++c)
            for (int b = 0; b < 2; ++b)
                for (int a = 0; a < 2; ++a)
                    into(idx[0] + a, idx[1] + b, idx[2] + c,
                         wx[a] * wy[b] * wz[c] * inv_hd);
    }
}

bool inside_unit(const Point& p, int dim) {
    for (int c = 0; c < dim; ++c)
        if (!(p[static_cast<std::size_t>(c)] >= 0.0 &&
              p[static_cast<std::size_t>(c)] <= 1.0))
            return false;
    return true;
}

}  // namespace

// ============================================================================
// Manufactured Poisson problems
// ============================================================================

ProblemSpec poisson2d_problem(int n) {
    ProblemSpec prob;
    prob.grid = make_grid(2, n);
    prob.f = Field(prob.grid);
    prob.bc = BoundarySpec::all_dirichlet(0.0);
    // u = -P(x) P(y) with P(t) = t^2 - t^4; P vanishes at 0 and 1.
    auto P = [](double t) { return t * t - t * t * t * t; };
    auto Pdd = [](double t) { return 2.0 - 12.0 * t * t; };
    prob.exact = [P](double x, double y, double) { return -P(x) * P(y); };
    const Grid g = prob.grid;
    for (std::size_t p = 0; p < prob.f.size(); ++p) {
        const NodeIndex idx = prob.f.node_of(p);
        const double x = idx.i * g.h, y = idx.j * g.h;
        prob.f[p] = -(Pdd(x) * P(y) + P(x) * Pdd(y));
    }
    return prob;
}

ProblemSpec poisson3d_problem(int n) {
    ProblemSpec prob;
    prob.grid = make_grid(3, n);
    prob.f = Field(prob.grid);
    prob.bc = BoundarySpec::all_dirichlet(0.0);
    prob.exact = [](double x, double y, double z) {
        return std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * z);
    };
    const Grid g = prob.grid;
    for (std::size_t p = 0; p < prob.f.size(); ++p) {
        const NodeIndex idx = prob.f.node_of(p);
        prob.f[p] = -3.0 * kPi * kPi *
                    prob.exact(idx.i * g.h, idx.j * g.h, idx.k * g.h);
    }
    return prob;
}

double l1_error(const Field& v_h, const ExactSolution& exact) {
    if (!exact) throw std::invalid_argument("l1_error: no exact solution");
    const Grid& g = v_h.grid();
    double num = 0.0, cnum = 0.0;
    double den = 0.0, cden = 0.0;
    for (std::size_t p = 0; p < v_h.size(); ++p) {  // serial Kahan, deterministic
        const NodeIndex idx = v_h.node_of(p);
        const double w = trapezoid_weight(idx, g.dim, g.N);
        const double ue = exact(idx.i * g.h, idx.j * g.h, idx.k * g.h);
        double y = w * std::abs(v_h[p] - ue) - cnum;
        double t = num + y;
        cnum = (t - num) - y;
        num = t;
        y = w * std::abs(ue) - cden;
        t = den + y;
        cden = (t - den) - y;
        den = t;
    }
    if (den == 0.0) throw std::invalid_argument("l1_error: exact solution is identically zero");
    return num / den;
}

// ============================================================================
// Curves and singular sources
// ============================================================================

Curve resample_curve(const Curve& curve, double h) {
    const std::size_t m_in = curve.points.size();
    if (m_in < 2) throw std::invalid_argument("resample_curve: need at least 2 points");
    if (!(h > 0.0)) throw std::invalid_argument("resample_curve: spacing must be positive");

    const std::size_t segs = curve.closed ? m_in : m_in - 1;
    std::vector<double> cum(segs + 1, 0.0);
    for (std::size_t s = 0; s < segs; ++s)
        cum[s + 1] = cum[s] + norm(sub(curve.points[(s + 1) % m_in], curve.points[s]));
    const double length = cum[segs];
    if (!(length > 0.0)) throw std::invalid_argument("resample_curve: curve has zero length");

    const std::size_t m = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(length / h)));
    const double ds = length / static_cast<double>(m);
    const std::size_t count = curve.closed ? m : m + 1;

    Curve out;
    out.closed = curve.closed;
    out.points.reserve(count);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const double s = std::min(static_cast<double>(i) * ds, length);
        while (seg + 1 < segs && cum[seg + 1] < s) ++seg;
        const double seg_len = cum[seg + 1] - cum[seg];
        const double t = seg_len > 0.0 ? (s - cum[seg]) / seg_len : 0.0;
        const Point& a = curve.points[seg % m_in];
        const Point& b = curve.points[(seg + 1) % m_in];
        out.points.push_back(add_scaled(a, t, sub(b, a)));
    }

    if (!curve.payload.empty()) {
        const std::size_t mo = out.points.size();
        out.payload.resize(mo);
        for (std::size_t i = 0; i < mo; ++i) {
            Point d;
            if (curve.closed) {
                d = sub(out.points[(i + 1) % mo], out.points[(i + mo - 1) % mo]);
            } else if (i == 0) {
                d = sub(out.points[1], out.points[0]);
            } else if (i == mo - 1) {
                d = sub(out.points[mo - 1], out.points[mo - 2]);
            } else {
                d = sub(out.points[i + 1], out.points[i - 1]);
            }
            const double len = norm(d);
            if (!(len > 0.0))
                throw std::invalid_argument("resample_curve: degenerate tangent");
            out.payload[i] = {d[0] / len, d[1] / len, d[2] / len};
        }
    }
    return out;
}

Field deposit_delta(const Curve& curve, const Grid& grid, double strength) {
    if (curve.points.size() < 2)
        throw std::invalid_argument("deposit_delta: need at least 2 points");
    Field f(grid);
    const std::vector<double> ds = arc_elements(curve);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const double mass = strength * ds[i];
        scatter_mass(curve.points[i], grid,
                     [&](int a, int b, int c, double w) { f.at(a, b, c) += mass * w; });
    }
    return f;
}

VectorField deposit_delta_vector(const Curve& curve, const Grid& grid) {
    if (curve.payload.size() != curve.points.size())
        throw std::invalid_argument("deposit_delta_vector: curve carries no payload");
    VectorField f(grid);
    const std::vector<double> ds = arc_elements(curve);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const Point& pay = curve.payload[i];
        scatter_mass(curve.points[i], grid, [&](int a, int b, int c, double w) {
            for (int comp = 0; comp < 3; ++comp)
                f.comp[static_cast<std::size_t>(comp)].at(a, b, c) +=
                    pay[static_cast<std::size_t>(comp)] * ds[i] * w;
        });
    }
    return f;
}

// ============================================================================
// Grid deformation
// ============================================================================

DeformationSetup deformation_problem(const Curve& curve, double a, int n) {
    int dim = 2;
    for (const Point& p : curve.points)
        if (p[2] != 0.0) dim = 3;
    const Grid grid = make_grid(dim, n);

    DeformationSetup setup;
    const Curve rs = resample_curve(curve, grid.h);
    setup.f_raw = deposit_delta(rs, grid, 1.0);
    setup.raw_integral = trapezoid_mean(setup.f_raw);  // unit domain volume

    setup.problem.grid = grid;
    setup.problem.a = a;
    setup.problem.bc = BoundarySpec::all_neumann();
    setup.problem.f = setup.f_raw;
    zero_mean_projection(setup.problem.f);
    return setup;
}

VectorField deformation_velocity(const Field& u, const Field& f_raw,
                                 double raw_integral, double t) {
    const Grid& g = u.grid();
    VectorField v = gradient(u);
    for (int c = 0; c < g.dim; ++c) {
        Field& comp = v.comp[static_cast<std::size_t>(c)];
        for (std::size_t p = 0; p < comp.size(); ++p) {
            const double den = t * f_raw[p] + raw_integral;
            if (den == 0.0)
                throw std::invalid_argument("deformation_velocity: zero denominator");
            comp[p] = -comp[p] / den;
        }
    }
    return v;
}

std::vector<Point> move_nodes(const Field& u, const Field& f_raw,
                              double raw_integral, double t, int steps) {
    if (steps < 1) throw std::invalid_argument("move_nodes: steps must be >= 1");
    const Grid& g = u.grid();
    const VectorField grad_u = gradient(u);

    std::vector<Point> pos(g.total);
    for (std::size_t p = 0; p < g.total; ++p) {
        const NodeIndex idx = f_raw.node_of(p);
        pos[p] = {idx.i * g.h, idx.j * g.h, g.dim == 3 ? idx.k * g.h : 0.0};
    }

    const double dt = t / steps;
    for (int s = 0; s < steps; ++s) {
        const double tau = s * dt;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(g.total); ++p) {
            Point& x = pos[static_cast<std::size_t>(p)];
            const double den = tau * sample_scalar(f_raw, x) + raw_integral;
            if (den == 0.0) continue;  // stationary where the density is singular
            for (int c = 0; c < g.dim; ++c) {
                const double gc =
                    sample_scalar(grad_u.comp[static_cast<std::size_t>(c)], x);
                x[static_cast<std::size_t>(c)] = std::clamp(
                    x[static_cast<std::size_t>(c)] - dt * gc / den, 0.0, 1.0);
            }
        }
    }
    return pos;
}

// ============================================================================
// Knotted vortex flow
// ============================================================================

TrifoilSetup trifoil_problem(int n, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("trifoil_problem: r must be positive");
    const Grid grid = make_grid(3, n);

    Curve raw;
    raw.closed = true;
    const int samples = 512;
    raw.points.reserve(samples);
    raw.payload.resize(samples);  // request unit tangents from the resampler
    for (int s = 0; s < samples; ++s) {
        const double t = 2.0 * kPi * s / samples;
        raw.points.push_back({0.5 + r * (std::sin(t) + 2.0 * std::sin(2.0 * t)),
                              0.5 + r * (std::cos(t) - 2.0 * std::cos(2.0 * t)),
                              0.5 - r * std::sin(3.0 * t)});
    }
    for (const Point& p : raw.points)
        if (!inside_unit(p, 3))
            throw std::invalid_argument(
                "trifoil_problem: curve leaves the unit domain (max extent 3r)");

    TrifoilSetup setup;
    setup.curve = resample_curve(raw, grid.h);
    setup.omega = deposit_delta_vector(setup.curve, grid);

    for (int c = 0; c < 3; ++c) {
        ProblemSpec& prob = setup.psi[static_cast<std::size_t>(c)];
        prob.grid = grid;
        prob.bc = BoundarySpec::all_dirichlet(0.0);
        prob.f = setup.omega.comp[static_cast<std::size_t>(c)];
        for (std::size_t p = 0; p < prob.f.size(); ++p) prob.f[p] = -prob.f[p];
    }
    return setup;
}

VectorField curl(const VectorField& psi) {
    if (psi.dim != 3) throw std::invalid_argument("curl: defined for 3D fields");
    VectorField v(psi.grid());
    const Field dzy = axis_derivative(psi.comp[2], 1);  // d psi_z / dy
    const Field dyz = axis_derivative(psi.comp[1], 2);
    const Field dxz = axis_derivative(psi.comp[0], 2);
    const Field dzx = axis_derivative(psi.comp[2], 0);
    const Field dyx = axis_derivative(psi.comp[1], 0);
    const Field dxy = axis_derivative(psi.comp[0], 1);
    for (std::size_t p = 0; p < v.comp[0].size(); ++p) {
        v.comp[0][p] = dzy[p] - dyz[p];
        v.comp[1][p] = dxz[p] - dzx[p];
        v.comp[2][p] = dyx[p] - dxy[p];
    }
    return v;
}

VectorField gradient(const Field& u) {
    VectorField g(u.grid());
    for (int c = 0; c < u.grid().dim; ++c)
        g.comp[static_cast<std::size_t>(c)] = axis_derivative(u, c);
    return g;
}

Field divergence(const VectorField& v) {
    Field d(v.grid());
    for (int c = 0; c < v.dim; ++c) {
        const Field dc = axis_derivative(v.comp[static_cast<std::size_t>(c)], c);
        for (std::size_t p = 0; p < d.size(); ++p) d[p] += dc[p];
    }
    return d;
}

Point sample_vector(const VectorField& v, const Point& p) {
    Point out{0.0, 0.0, 0.0};
    for (int c = 0; c < v.dim; ++c)
        out[static_cast<std::size_t>(c)] =
            sample_scalar(v.comp[static_cast<std::size_t>(c)], p);
    return out;
}

Streamline integrate_streamline(const VectorField& v, const Point& seed,
                                double step, int max_steps) {
    if (!(step > 0.0)) throw std::invalid_argument("integrate_streamline: step must be positive");
    Streamline line;
    line.points.push_back(seed);
    if (!inside_unit(seed, v.dim)) {
        line.stop = StreamlineStop::left_domain;
        return line;
    }
    Point p = seed;
    for (int s = 0; s < max_steps; ++s) {
        const Point k1 = sample_vector(v, p);
        if (norm(k1) < 1e-12) {
            line.stop = StreamlineStop::stagnation;
            return line;
        }
        const Point p2 = add_scaled(p, 0.5 * step, k1);
        if (!inside_unit(p2, v.dim)) { line.stop = StreamlineStop::left_domain; return line; }
        const Point k2 = sample_vector(v, p2);
        const Point p3 = add_scaled(p, 0.5 * step, k2);
        if (!inside_unit(p3, v.dim)) { line.stop = StreamlineStop::left_domain; return line; }
        const Point k3 = sample_vector(v, p3);
        const Point p4 = add_scaled(p, step, k3);
        if (!inside_unit(p4, v.dim)) { line.stop = StreamlineStop::left_domain; return line; }
        const Point k4 = sample_vector(v, p4);
        Point next = p;
        for (int c = 0; c < 3; ++c)
            next[static_cast<std::size_t>(c)] +=
                step / 6.0 * (k1[static_cast<std::size_t>(c)] +
                              2.0 * k2[static_cast<std::size_t>(c)] +
                              2.0 * k3[static_cast<std::size_t>(c)] +
                              k4[static_cast<std::size_t>(c)]);
        if (!inside_unit(next, v.dim)) {
            line.stop = StreamlineStop::left_domain;
            return line;
        }
        p = next;
        line.points.push_back(p);
    }
    line.stop = StreamlineStop::max_steps;
    return line;
}

// ============================================================================
// Heterogeneous capacitor
// ============================================================================

ProblemSpec capacitor_problem(int n, const std::string& mode) {
    double sign;
    if (mode == "low") sign = 1.0;        // weakly conducting sphere
    else if (mode == "high") sign = -1.0; // strongly conducting sphere
    else throw std::invalid_argument("capacitor_problem: mode must be \"high\" or \"low\"");

    ProblemSpec prob;
    prob.grid = make_grid(3, n);
    prob.f = Field(prob.grid);
    prob.sigma = Field(prob.grid);
    const Grid g = prob.grid;
    for (std::size_t p = 0; p < prob.sigma.size(); ++p) {
        const NodeIndex idx = prob.sigma.node_of(p);
        const double r = std::sqrt(sq(idx.i * g.h - 0.5) + sq(idx.j * g.h - 0.5) +
                                   sq(idx.k * g.h - 0.5));
        prob.sigma[p] = 0.55 + sign * 0.45 * std::tanh((r - 0.2) / 0.1);
    }
    prob.bc = BoundarySpec::all_neumann();
    prob.bc.face(2, 0) = {BcKind::dirichlet, -1.0};
    prob.bc.face(2, 1) = {BcKind::dirichlet, +1.0};
    return prob;
}

}  // namespace sgml
