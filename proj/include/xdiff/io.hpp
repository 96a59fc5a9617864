#pragma once
#include <string>
#include <utility>
#include <vector>

#include "xdiff/diagnostics.hpp"
#include "xdiff/grid.hpp"

namespace xdiff {

// Diagnostics CSV, schema v1: fixed header, one row per record, %.17g floats.
// Identical inputs produce identical bytes.
void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::string& path);

// Text snapshot: XDIFF1 magic, dim/cells/extents/time header, then row-major
// cell values one per line.
void write_snapshot(const Field& f, double t, const std::string& path);
std::pair<Field, double> read_snapshot(const std::string& path);

// 8-bit ASCII PGM (P2) heatmap, linearly scaled; the data min/max land in a
// header comment.
void write_pgm(const Field& f, const std::string& path);

std::string format_double(double x);

}  // namespace xdiff
