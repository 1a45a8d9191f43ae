#pragma once

#include <string>

#include "mlin/grid.hpp"

namespace mlin {

// Flat binary format: 32-byte header then little-endian complex payload.
//   bytes 0..3   magic "MLF1"
//   byte  4      dims
//   byte  5      space (0 physical, 1 spectral)
//   byte  6      precision (0 = complex64, 1 = complex128)
//   byte  7      reserved
//   bytes 8..11  points_per_axis (uint32)
//   bytes 12..15 reserved
//   bytes 16..23 box_length (float64)
//   bytes 24..31 reserved
void write_field(const Field& f, const std::string& path, bool single_precision = false);
Field read_field(const std::string& path);

// CSV export: one row per sample, "i0,...,i{d-1},re,im".
void write_field_csv(const Field& f, const std::string& path);

}  // namespace mlin
