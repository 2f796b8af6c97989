#pragma once

#include <complex>
#include <span>

namespace qti::fft {

// Unnormalized in-place complex DFT of length n (any n, powers of two are fastest).
//   forward:  X_j = sum_k x_k exp(-2 pi i j k / n)
//   backward: x_k = sum_j X_j exp(+2 pi i j k / n)
// Plans are cached per (n, direction); execution is safe from several threads.
void forward(std::span<std::complex<double>> data);
void backward(std::span<std::complex<double>> data);

}  // namespace qti::fft
