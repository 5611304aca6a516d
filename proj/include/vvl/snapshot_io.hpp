#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vvl/solver.hpp"

namespace vvl {

/// Raw content of a "VVL1" file: header plus a number of nx*ny row-major planes.
struct PlaneFile {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  double time = 0.0;
  double epsilon = 0.0;
  std::vector<std::vector<double>> planes;
};

/// Throws Error(kIo) on any stream failure.
void write_planes(const std::string& path, const PlaneFile& file);
/// Reads exactly `expected_planes` planes; throws Error(kIo) on bad magic, truncation or trailing bytes.
PlaneFile read_planes(const std::string& path, std::size_t expected_planes);

/// Snapshot layout: rho, m_x, m_y.
void write_snapshot(const std::string& path, const FluidState& state, const Grid& grid, double epsilon);
FluidState read_snapshot(const std::string& path, const Grid& grid, double* epsilon = nullptr);

struct IndexEntry {
  int member = 0;
  double epsilon = 0.0;
  double time = 0.0;
  std::string path;
};

/// CSV with header "member,epsilon,time,path".
void write_index(const std::string& path, std::span<const IndexEntry> entries);
std::vector<IndexEntry> read_index(const std::string& path);

/// Full-precision decimal used in every CSV output.
std::string format_double(double v);

}  // namespace vvl
