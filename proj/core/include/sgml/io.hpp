/// @file io.hpp
/// @brief Plain-text artifacts: legacy ASCII VTK structured-points fields,
///        CSV convergence reports, curve/seed CSV input, polyline output.
///
/// All floating-point output goes through %.17g so files round-trip to the
/// exact double and reruns are byte-identical.

#pragma once

#include <string>
#include <vector>

#include "sgml/cycle.hpp"
#include "sgml/grid.hpp"
#include "sgml/problems.hpp"

namespace sgml {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ============================================================================
// VTK structured points (legacy ASCII)
// ============================================================================

/// SCALARS file: DIMENSIONS N N [N|1], ORIGIN 0 0 0, SPACING h h [h|1],
/// POINT_DATA in the documented x-fastest order (VTK's native order).
void write_field_vtk(const Field& f, const std::string& path,
                     const std::string& name = "field");

/// VECTORS variant; always writes 3 components per node (z = 0 in 2D).
void write_vector_vtk(const VectorField& v, const std::string& path,
                      const std::string& name = "field");

/// Parses back a SCALARS file written by write_field_vtk (round-trip tests).
Field read_field_vtk(const std::string& path);

// ============================================================================
// Reports
// ============================================================================

/// One row per cycle: cycle, work_units, residual, diag_residual_min,
/// l1_error (blank when no exact solution is attached).
void write_report_csv(const SolveReport& report, const std::string& path);

/// Per-pass diagnostic residual trace: cycle, pass, level, diag_residual.
void write_trace_csv(const SolveReport& report, const std::string& path);

// ============================================================================
// Curves, seeds, polylines
// ============================================================================

/// Plain CSV points, one `x,y[,z]` per line; a non-numeric first line is
/// treated as a header. Throws io_error on missing files or malformed rows.
std::vector<Point> read_points_csv(const std::string& path);

void write_points_csv(const std::vector<Point>& pts, int dim,
                      const std::string& path);

/// Full round-trip double formatting used by every writer.
std::string format_double(double x);

}  // namespace sgml
