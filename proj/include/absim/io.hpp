#pragma once

#include <string>
#include <vector>

#include "absim/grid.hpp"

namespace absim {

// ABSF field dump: magic "ABSF", version u32=1, dims 3*u32, extents 3*f64,
// origin 3*f64, then dims[0]*dims[1]*dims[2] complex values as little-endian
// f64 (re, im) pairs, row-major with axis 3 fastest.  Round-trips bit-exactly.
void write_field(const std::string& path, const WaveField& field);
WaveField read_field(const std::string& path);

// full-precision scientific CSV; one header row, then one row per record
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_full_precision(double v);

}  // namespace absim
