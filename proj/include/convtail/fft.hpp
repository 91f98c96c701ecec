#ifndef CONVTAIL_FFT_HPP
#define CONVTAIL_FFT_HPP

// Iterative radix-2 FFT and the zero-padded FFT route to the scaled discrete
// linear convolution. The transform is templated on the working scalar so the
// same operation sequence runs in binary64 or binary32.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <utility>
#include <stdexcept>
#include <vector>

#include "convtail/grid.hpp"

namespace convtail {

/// Interleaved (re, im) storage; std::complex<T> guarantees the layout.
template <class T>
using ComplexVector = std::vector<std::complex<T>>;

namespace detail {

// w[k] = exp(sign * i * 2 pi k / n) for k < n/2, evaluated in binary64 and
// rounded once to T.
template <class T>
std::vector<std::complex<T>> twiddles(std::size_t n, int sign) {
  std::vector<std::complex<T>> w(n / 2);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    w[k] = {static_cast<T>(std::cos(angle)), static_cast<T>(sign * std::sin(angle))};
  }
  return w;
}

// Twiddles regrouped by butterfly stage: the stage with half-length `half`
// reads entries [half - 1, 2 half - 1), i.e. w[j * n / (2 half)] for j < half.
// Cached per thread, keyed by (n, sign).
template <class T>
const std::vector<std::complex<T>>& stage_twiddles(std::size_t n, int sign) {
  thread_local std::map<std::pair<std::size_t, int>, std::vector<std::complex<T>>> cache;
  auto [it, inserted] = cache.try_emplace({n, sign});
  if (inserted) {
    const auto w = twiddles<T>(n, sign);
    auto& staged = it->second;
    staged.resize(n - 1);
    for (std::size_t half = 1; half < n; half <<= 1) {
      const std::size_t stride = n / (2 * half);
      for (std::size_t j = 0; j < half; ++j) staged[half - 1 + j] = w[j * stride];
    }
  }
  return it->second;
}

template <class T>
void bit_reverse(std::span<std::complex<T>> v) {
  const std::size_t n = v.size();
  for (std::size_t i = 1, r = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; r & bit; bit >>= 1) r ^= bit;
    r ^= bit;
    if (i < r) std::swap(v[i], v[r]);
  }
}

inline constexpr std::size_t kFftBlock = std::size_t{1} << 11;

// (u, x) <- (u + w x, u - w x) with the complex product spelled out in T.
template <class T>
inline void butterfly(std::complex<T>& lo, std::complex<T>& hi, const std::complex<T>& w) {
  const T wr = w.real(), wi = w.imag();
  const T xr = hi.real(), xi = hi.imag();
  const T tr = wr * xr - wi * xi;
  const T ti = wr * xi + wi * xr;
  const T ur = lo.real(), ui = lo.imag();
  lo = {ur + tr, ui + ti};
  hi = {ur - tr, ui - ti};
}

template <class T>
void transform(std::span<std::complex<T>> v, int sign) {
  const std::size_t n = v.size();
  if (n == 0 || !std::has_single_bit(n)) throw std::invalid_argument("fft: length must be a power of two");
  if (n == 1) return;

  bit_reverse<T>(v);
  const auto& w = stage_twiddles<T>(n, sign);
  auto stage = [&](std::size_t half, std::size_t begin, std::size_t end) {
    const std::complex<T>* ws = w.data() + (half - 1);
    for (std::size_t start = begin; start < end; start += 2 * half) {
      std::complex<T>* lo = v.data() + start;
      for (std::size_t j = 0; j < half; ++j) butterfly(lo[j], lo[j + half], ws[j]);
    }
  };
  // Stages whose butterflies stay inside a block run block by block while the
  // block is cache resident; butterflies are independent within a stage, so
  // the result does not depend on this ordering.
  const std::size_t block = std::min(n, kFftBlock);
  for (std::size_t b = 0; b < n; b += block) {
    for (std::size_t half = 1; half < block; half <<= 1) stage(half, b, b + block);
  }
  // Remaining stages two at a time, one pass over memory per pair.
  std::size_t half = block;
  for (; 4 * half <= n; half <<= 2) {
    const std::complex<T>* w1 = w.data() + (half - 1);
    const std::complex<T>* w2 = w.data() + (2 * half - 1);
    for (std::size_t start = 0; start < n; start += 4 * half) {
      std::complex<T>* p = v.data() + start;
      for (std::size_t j = 0; j < half; ++j) {
        butterfly(p[j], p[j + half], w1[j]);
        butterfly(p[j + 2 * half], p[j + 3 * half], w1[j]);
        butterfly(p[j], p[j + 2 * half], w2[j]);
        butterfly(p[j + half], p[j + 3 * half], w2[j + half]);
      }
    }
  }
  if (half < n) stage(half, 0, n);
}

}  // namespace detail

/// Forward DFT, X_k = sum_j x_j exp(+2 pi i k j / N), unscaled.
template <class T>
ComplexVector<T> fft(ComplexVector<T> v) {
  detail::transform<T>(v, +1);
  return v;
}

/// Inverse DFT, x_j = (1/N) sum_k X_k exp(-2 pi i k j / N).
template <class T>
ComplexVector<T> ifft(ComplexVector<T> v) {
  detail::transform<T>(v, -1);
  const T scale = T(1) / static_cast<T>(v.size());
  for (auto& z : v) z = {z.real() * scale, z.imag() * scale};
  return v;
}

/// Transform length used for a grid with N intervals: the smallest power of
/// two >= 2N + 1.
inline std::size_t fft_padded_length(std::size_t n_intervals) { return std::bit_ceil(2 * n_intervals + 1); }

/// Scaled linear convolution h * sum_{j<=k} a_j b_{k-j}, k = 0..N, through
/// zero-padded transforms. When both operands are the same vector the spectrum
/// is squared after a single forward transform. Rounding artifacts are left in
/// place, including negative values.
template <class T>
BasicGridDensity<T> conv_fft(const BasicGridDensity<T>& a, const BasicGridDensity<T>& b) {
  require_same_grid(a.grid(), b.grid(), "conv_fft");
  const std::size_t len = fft_padded_length(a.grid().n_intervals());
  const bool square = (&a == &b) || a.values().data() == b.values().data() ||
                      std::equal(a.values().begin(), a.values().end(), b.values().begin());

  ComplexVector<T> fa(len);
  for (std::size_t j = 0; j < a.size(); ++j) fa[j] = {a[j], T(0)};
  fa = fft<T>(std::move(fa));
  if (square) {
    for (auto& z : fa) {
      const T re = z.real(), im = z.imag();
      z = {re * re - im * im, T(2) * re * im};
    }
  } else {
    ComplexVector<T> fb(len);
    for (std::size_t j = 0; j < b.size(); ++j) fb[j] = {b[j], T(0)};
    fb = fft<T>(std::move(fb));
    for (std::size_t k = 0; k < len; ++k) {
      const T ar = fa[k].real(), ai = fa[k].imag();
      const T br = fb[k].real(), bi = fb[k].imag();
      fa[k] = {ar * br - ai * bi, ar * bi + ai * br};
    }
  }
  fa = ifft<T>(std::move(fa));

  const T h = static_cast<T>(a.grid().step());
  BasicGridDensity<T> out(a.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fa[k].real() * h;
  return out;
}

}  // namespace convtail

#endif  // CONVTAIL_FFT_HPP
