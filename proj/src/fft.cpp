#include "corrstates/fft.hpp"

#include <cmath>
#include <cstdint>

namespace corrstates {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

/// Bluestein chirp-z transform for arbitrary n, via a zero-padded
/// power-of-two convolution. Chirp exponents are reduced mod 2n to keep
/// the phase argument small.
std::vector<std::complex<double>> fft_bluestein(
    std::span<const std::complex<double>> x, bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    const double ang = sign * kTwoPi * 0.5 * static_cast<double>(k2) /
                       static_cast<double>(n);
    chirp[k] = {std::cos(ang), std::sin(ang)};
  }

  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<std::complex<double>> a(m, {0.0, 0.0});
  std::vector<std::complex<double>> b(m, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    b[k] = std::conj(chirp[k]);
    b[m - k] = b[k];
  }
  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a, true);
  const double inv_m = 1.0 / static_cast<double>(m);

  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * inv_m * chirp[k];
  return out;
}

std::vector<std::complex<double>> transform(
    std::span<const std::complex<double>> x, bool inverse) {
  const std::size_t n = x.size();
  if (n <= 1) return {x.begin(), x.end()};
  if (is_pow2(n)) {
    std::vector<std::complex<double>> a(x.begin(), x.end());
    fft_pow2(a, inverse);
    return a;
  }
  return fft_bluestein(x, inverse);
}

}  // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x) {
  return transform(x, false);
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x) {
  auto out = transform(x, true);
  const double inv_n = 1.0 / static_cast<double>(x.empty() ? 1 : x.size());
  for (auto& v : out) v *= inv_n;
  return out;
}

}  // namespace corrstates
