#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bsforge::detail {

enum class FftDirection { forward, backward };

// Unnormalized multi-dimensional DFT, in place, row-major. Plans are cached per shape.
void fft_inplace(std::span<std::complex<double>> data, const std::vector<int> &sizes,
                 FftDirection direction);

} // namespace bsforge::detail
