#pragma once

#include <filesystem>
#include <string>

#include "gld/geometric.hpp"
#include "gld/phase_maps.hpp"
#include "gld/temporal.hpp"

namespace gld {

/// 17 significant digits in scientific notation, which reads back to the same
/// double.
std::string format_double(double v);
double parse_double(std::string_view text);

void write_landscape_csv(const Landscape& land, const std::filesystem::path& path);
void write_grid_csv(const GridMap& grid, const std::filesystem::path& path);
void write_line_csv(const std::vector<LinePoint>& line, const std::filesystem::path& path);

/// Reads a file written by write_grid_csv. The grid bounds and counts are
/// recovered from the node coordinates.
GridMap read_grid_csv(const std::filesystem::path& path, GridQuantity quantity);

/// Binary 16-bit PGM, min-max scaled over valid nodes, masked nodes at 0.
/// Row k of the image is row k of the grid (p = p_lo first).
void write_pgm(const GridMap& grid, const std::filesystem::path& path);

} // namespace gld
