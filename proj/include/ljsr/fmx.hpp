#pragma once

#include <filesystem>
#include <string>

#include "ljsr/core.hpp"

namespace ljsr {

// FMX v1 matrix container.
//
// One ASCII header line
//     fmx 1 <dtype> <rows> <cols>\n
// with dtype in {f64, c64}, followed by the row-major little-endian
// IEEE-754 payload; c64 entries are interleaved (re, im) doubles.

void write_fmx(const std::filesystem::path& file, const MatR& m);
void write_fmx(const std::filesystem::path& file, const MatC& m);

/// Reads either dtype; f64 payloads are promoted to complex.
MatC read_fmx_complex(const std::filesystem::path& file);

/// Reads an f64 file; rejects c64.
MatR read_fmx_real(const std::filesystem::path& file);

}  // namespace ljsr
