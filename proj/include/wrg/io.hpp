#pragma once

#include <string>

#include "wrg/continuum.hpp"

namespace wrg {

// Shortest round-trip decimal form, C locale, for stable file bytes.
std::string format_double(double v);

// All writers emit LF line endings and '.' decimal separators and throw
// std::runtime_error when the file cannot be written.

void write_nodes_csv(const std::string& path, const NodeSet& nodes);

// Row-major n x n values, one matrix row per line, no header.
void write_matrix_csv(const std::string& path, const WeightMatrix& xi);

// Plain-text PGM (P2), linear gray scale from 0 to the largest entry.
void write_matrix_pgm(const std::string& path, const WeightMatrix& xi);

// Mean kernel wbar on a grid x grid mid-cell lattice, row-major CSV.
void write_mean_kernel_csv(const std::string& path, const GraphLaw& law, int grid);

// Header t,u_1,...,u_N, one stored step per row.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// Same layout, preceded by a comment line with the mid-cell coordinates.
void write_grid_trajectory_csv(const std::string& path, const GridTrajectory& sol);

// Two columns x,u with one row per cell midpoint.
void write_snapshot_csv(const std::string& path, const GridFunction& u);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace wrg
