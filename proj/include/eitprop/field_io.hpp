#pragma once

#include <array>
#include <filesystem>

#include "eitprop/grid.hpp"

namespace eitprop {

// Binary field dump, all little-endian:
//   8 bytes  magic "EITFLD01"
//   uint64   nx, ny
//   float64  dx, dy   (meters)
//   ny*nx x (float64 re, float64 im), row-major, x fastest
inline constexpr std::array<char, 8> kFieldMagic = {'E', 'I', 'T', 'F', 'L', 'D', '0', '1'};

void write_field(const std::filesystem::path& path, const ComplexField& field);
ComplexField read_field(const std::filesystem::path& path);

/// 16-bit binary PGM of |E|^2 scaled so the peak maps to 65535. Row 0 is iy = 0.
void write_intensity_pgm(const std::filesystem::path& path, const ComplexField& field);

}  // namespace eitprop
