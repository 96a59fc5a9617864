#include "xdiff/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xdiff {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "# xdiff diagnostics schema v1\n";
    const auto& cols = DiagnosticsRecord::csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
    for (const auto& r : records) {
        const auto vals = r.values();
        for (std::size_t i = 0; i < vals.size(); ++i)
            out << (i ? "," : "") << format_double(vals[i]);
        out << "\n";
    }
}

void write_snapshot(const Field& f, double t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "XDIFF1\n";
    out << "dim " << f.grid.dim << "\n";
    out << "nx " << f.grid.nx << "\n";
    if (f.grid.dim == 2) out << "ny " << f.grid.ny << "\n";
    out << "lx " << format_double(f.grid.lx) << "\n";
    if (f.grid.dim == 2) out << "ly " << format_double(f.grid.ly) << "\n";
    out << "t " << format_double(t) << "\n";
    for (double x : f.v) out << format_double(x) << "\n";
}

namespace {

std::string expect_key(std::istream& in, const std::string& key) {
    std::string k, v;
    if (!(in >> k >> v) || k != key)
        throw StructuralError("snapshot: expected key '" + key + "'");
    return v;
}

}  // namespace

std::pair<Field, double> read_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "XDIFF1") throw StructuralError("snapshot: bad magic in " + path);
    const int dim = std::stoi(expect_key(in, "dim"));
    if (dim != 1 && dim != 2) throw StructuralError("snapshot: dim must be 1 or 2");
    const int nx = std::stoi(expect_key(in, "nx"));
    int ny = 1;
    if (dim == 2) ny = std::stoi(expect_key(in, "ny"));
    const double lx = std::stod(expect_key(in, "lx"));
    if (dim == 2) expect_key(in, "ly");  // redundant with nx*h, validated by Grid
    const double t = std::stod(expect_key(in, "t"));
    const Grid g = dim == 1 ? Grid::line(lx, nx) : Grid::rect(lx, nx, ny);
    Field f(g);
    for (int i = 0; i < g.cells(); ++i)
        if (!(in >> f.v[i])) throw StructuralError("snapshot: truncated values in " + path);
    return {std::move(f), t};
}

void write_pgm(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    const double lo = min_of(f), hi = max_of(f);
    const int w = f.grid.nx, h = f.grid.dim == 2 ? f.grid.ny : 1;
    out << "P2\n# min " << format_double(lo) << " max " << format_double(hi) << "\n";
    out << w << " " << h << "\n255\n";
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    for (int j = h - 1; j >= 0; --j) {  // top image row = largest y
        for (int i = 0; i < w; ++i) {
            const double val = f.grid.dim == 2 ? f(i, j) : f(i);
            const int g = static_cast<int>(std::lround((val - lo) * scale));
            out << g << (i + 1 < w ? ' ' : '\n');
        }
    }
}

}  // namespace xdiff
