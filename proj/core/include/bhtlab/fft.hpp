#pragma once

#include <complex>
#include <span>

namespace bhtlab::fft {

// Unnormalized in-place DFT of power-of-two length.
// forward: X_k = sum_j x_j e^{-2 pi i jk/n}; backward uses e^{+2 pi i jk/n}.
void forward(std::span<std::complex<double>> data);
void backward(std::span<std::complex<double>> data);

}  // namespace bhtlab::fft
