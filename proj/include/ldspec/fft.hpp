#pragma once

#include <complex>
#include <vector>

namespace ldspec {

/// In-place radix-2 FFT; size must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

/// Discrete Fourier transform of arbitrary length (Bluestein for non
/// power-of-two sizes). Forward: X_k = sum_t x_t exp(-2 pi i k t / n).
/// No 1/n normalization is applied in either direction.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x, bool inverse = false);

} // namespace ldspec
