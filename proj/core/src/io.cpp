/// @file io.cpp
/// @brief Legacy ASCII VTK writers/readers and CSV report/point files.

#include "sgml/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sgml {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    return out;
}

void vtk_header(std::ofstream& out, const Grid& g, const std::string& name) {
    out << "# vtk DataFile Version 3.0\n"
        << name << "\n"
        << "ASCII\n"
        << "DATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << g.N << ' ' << g.N << ' ' << (g.dim == 3 ? g.N : 1) << '\n'
        << "ORIGIN 0 0 0\n"
        << "SPACING " << format_double(g.h) << ' ' << format_double(g.h) << ' '
        << (g.dim == 3 ? format_double(g.h) : std::string("1")) << '\n'
        << "POINT_DATA " << g.total << '\n';
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ============================================================================
// VTK
// ============================================================================

void write_field_vtk(const Field& f, const std::string& path,
                     const std::string& name) {
    std::ofstream out = open_out(path);
    vtk_header(out, f.grid(), name);
    out << "SCALARS " << name << " double 1\n"
        << "LOOKUP_TABLE default\n";
    for (std::size_t p = 0; p < f.size(); ++p) out << format_double(f[p]) << '\n';
    if (!out) throw io_error("write failed: " + path);
}

void write_vector_vtk(const VectorField& v, const std::string& path,
                      const std::string& name) {
    std::ofstream out = open_out(path);
    vtk_header(out, v.grid(), name);
    out << "VECTORS " << name << " double\n";
    for (std::size_t p = 0; p < v.comp[0].size(); ++p)
        out << format_double(v.comp[0][p]) << ' ' << format_double(v.comp[1][p])
            << ' ' << format_double(v.comp[2][p]) << '\n';
    if (!out) throw io_error("write failed: " + path);
}

Field read_field_vtk(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    std::string tok;
    int nx = 0, ny = 0, nz = 0;
    std::size_t count = 0;
    while (in >> tok) {
        if (tok == "DIMENSIONS") {
            if (!(in >> nx >> ny >> nz)) throw io_error("bad DIMENSIONS: " + path);
        } else if (tok == "POINT_DATA") {
            if (!(in >> count)) throw io_error("bad POINT_DATA: " + path);
        } else if (tok == "LOOKUP_TABLE") {
            in >> tok;  // table name
            break;
        }
    }
    if (nx < 3 || nx != ny || (nz != 1 && nz != nx))
        throw io_error("unsupported grid dimensions: " + path);
    const int dim = nz == 1 ? 2 : 3;
    int n = 0;
    while ((1 << (n + 1)) + 1 <= nx) ++n;
    const Grid g = make_grid(dim, n);
    if (g.N != nx || g.total != count)
        throw io_error("dimensions are not 2^n + 1 points: " + path);
    Field f(g);
    for (std::size_t p = 0; p < g.total; ++p)
        if (!(in >> f[p])) throw io_error("truncated point data: " + path);
    return f;
}

// ============================================================================
// Reports
// ============================================================================

void write_report_csv(const SolveReport& report, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "cycle,work_units,residual,diag_residual_min,l1_error\n";
    for (const CycleRecord& row : report.rows) {
        out << row.cycle << ',' << row.work_units << ','
            << format_double(row.residual) << ',' << format_double(row.diag_min)
            << ',';
        if (row.l1_error) out << format_double(*row.l1_error);
        out << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

void write_trace_csv(const SolveReport& report, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "cycle,pass,level,diag_residual\n";
    for (const DiagSample& s : report.trace)
        out << s.cycle << ',' << s.pass << ',' << s.level << ','
            << format_double(s.value) << '\n';
    if (!out) throw io_error("write failed: " + path);
}

// ============================================================================
// Point CSV
// ============================================================================

std::vector<Point> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    std::vector<Point> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        Point p{0.0, 0.0, 0.0};
        std::string cell;
        std::size_t col = 0;
        bool numeric = true;
        bool first_cell_numeric = true;
        while (std::getline(row, cell, ',')) {
            if (col >= 3) { numeric = false; break; }
            try {
                std::size_t used = 0;
                p[col] = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
                if (used != cell.size()) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
            if (!numeric) {
                if (col == 0) first_cell_numeric = false;
                break;
            }
            ++col;
        }
        // Only a line whose first cell is not a number counts as a header;
        // numeric-but-short rows are data errors even on line 1.
        if (lineno == 1 && !first_cell_numeric) continue;
        if (!numeric || col < 2)
            throw io_error(path + ": malformed row " + std::to_string(lineno));
        pts.push_back(p);
    }
    return pts;
}

void write_points_csv(const std::vector<Point>& pts, int dim,
                      const std::string& path) {
    std::ofstream out = open_out(path);
    out << (dim == 3 ? "x,y,z\n" : "x,y\n");
    for (const Point& p : pts) {
        out << format_double(p[0]) << ',' << format_double(p[1]);
        if (dim == 3) out << ',' << format_double(p[2]);
        out << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

}  // namespace sgml
