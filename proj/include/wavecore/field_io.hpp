#pragma once
// Field export: little-endian binary grid files and CSV slices.

#include <cstdint>
#include <string>
#include <vector>

#include "wavecore/grid.hpp"

namespace wavecore {

struct GridHeader {
  int dims = 1;
  std::vector<std::uint64_t> n;
  std::vector<double> len;
};

// Header (dims, N_i, L_i as 64-bit little-endian values) then row-major doubles.
void write_field_binary(const std::string& path, const Grid& g, const RField& f);
void write_table_binary(const std::string& path, const GridHeader& h, const RField& values);
RField read_field_binary(const std::string& path, GridHeader* header = nullptr);

// Two-column (x, value) or multi-column CSV of a 1D field set.
void write_csv_columns(const std::string& path, const std::vector<std::string>& names,
                       const std::vector<const RField*>& cols);

struct Checkpoint {
  double t = 0.0;
  double dt = 0.0;
  std::uint64_t scenario_hash = 0;
  RField eta, phi;
};

void write_checkpoint(const std::string& path, const Grid& g, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path, GridHeader* header = nullptr);

// 64-bit FNV-1a, used for scenario parameter hashes.
std::uint64_t fnv1a64(const std::string& s);

}  // namespace wavecore
