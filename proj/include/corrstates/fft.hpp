#pragma once

#include <complex>
#include <span>
#include <vector>

namespace corrstates {

/// Forward DFT, X[k] = sum_n x[n] exp(-2*pi*i*n*k/N). No normalization.
/// Handles any length >= 1 (radix-2 when N is a power of two, Bluestein
/// otherwise), so transforms never pad the input.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);

/// Inverse DFT with 1/N normalization; ifft(fft(x)) == x up to rounding.
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x);

}  // namespace corrstates
