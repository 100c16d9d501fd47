#pragma once

#include <string>
#include <vector>

#include "oldroyd/diagnostics.hpp"
#include "oldroyd/oldroyd_system.hpp"

namespace oldroyd {

// Checkpoint layout (little-endian):
//   "OLD1" | u32 version | u32 n | f64 box_length | f64 mu | f64 nu | f64 time
//   then u1, u2, u3, F11, F12, ..., F33, each the full n^3 lattice of
//   (re, im) f64 pairs in FFT index order, axis 0 slowest.
inline constexpr std::uint32_t checkpoint_version = 1;

struct Checkpoint {
  State state;
  PhysParams params;
};

void checkpoint_write(const State& state, const PhysParams& params, const std::string& path);

/// Throws IoError on a missing file, bad magic or version, truncation or
/// trailing bytes, and SymmetryError when the stored lattice departs from
/// Hermitian symmetry by more than 1e-8 relative.
Checkpoint checkpoint_read(const std::string& path);

std::vector<std::string> csv_header(int m_order);

/// One row, numbers printed with 17 significant digits.
std::string csv_row(const TimeSeriesRecord& r);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws IoError naming the column and listing those available.
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace oldroyd
