#pragma once

#include <cstddef>
#include <span>

#include "eitprop/grid.hpp"

namespace eitprop::detail {

enum class FftDirection { kForward, kBackward };

// Unnormalized in-place 2D DFT of a row-major ny x nx array. Forward uses
// exp(-2 pi i ...), backward exp(+2 pi i ...).
void fft2d(std::span<Complex> data, std::size_t nx, std::size_t ny, FftDirection direction);

}  // namespace eitprop::detail
