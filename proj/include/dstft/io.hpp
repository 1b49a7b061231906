#pragma once

// File formats.
//
// Signal file (little-endian):
//   "DSTF", version u32 = 1, dim u32, per axis (origin f64, spacing f64, count u64),
//   then (re, im) f64 pairs in row-major index order.
// Field file:
//   "DSTF", version u32 = 2, y-grid header (dim + axes as above), xi-grid header,
//   frame block (n u32, k u32, k*n f64 rows of u), source origin (n f64),
//   window description (u32 length + bytes), then (re, im) pairs indexed (y, xi).
// Spectrum values are stored in centred order: index m on an axis is the
// frequency (m - floor(N/2)) * spacing.

#include <string>

#include "dstft/transform.hpp"

namespace dstft::io {

void write_signal(const std::string& path, const Signal& f);
Signal read_signal(const std::string& path);

void write_field(const std::string& path, const DstftField& F);
DstftField read_field(const std::string& path);

/// One sample per line: index tuple, then re, im.
void write_signal_csv(const std::string& path, const Signal& f);
Signal read_signal_csv(const std::string& path, const Grid& grid);

/// |F(y, .)| for one y index as a CSV matrix (2-D xi grids) or column (1-D).
void write_magnitude_slice_csv(const std::string& path, const DstftField& F, std::size_t y_index);

}  // namespace dstft::io
