#ifndef CONVTAIL_CONVOLUTION_HPP
#define CONVTAIL_CONVOLUTION_HPP

// The scaled discrete linear convolution
//
//   (a (*) b)_k = h * sum_{j=0}^{k} a_j b_{k-j},   k = 0..N,
//
// its endpoint-corrected variant for densities that do not vanish to second
// order at the origin, and the schedules that build n-fold convolutions.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "convtail/fft.hpp"
#include "convtail/grid.hpp"
#include "convtail/parallel.hpp"
#include "convtail/precision.hpp"

namespace convtail {

enum class ConvKind { Direct, Fft };

/// Convolution implementation plus working precision.
struct ConvBackend {
  ConvKind kind = ConvKind::Direct;
  PrecisionMode precision = PrecisionMode::Native64;

  friend constexpr bool operator==(const ConvBackend&, const ConvBackend&) = default;
};

constexpr std::string_view to_string(ConvKind k) { return k == ConvKind::Direct ? "direct" : "fft"; }

inline ConvKind parse_conv_kind(std::string_view s) {
  if (s == "direct") return ConvKind::Direct;
  if (s == "fft") return ConvKind::Fft;
  throw std::invalid_argument("unknown backend '" + std::string(s) + "' (expected direct or fft)");
}

namespace detail {

inline constexpr std::size_t kConvBlock = 64;

// out_k = sum_{j=lo}^{k-lo} a_j b_{k-j} for k in [k_begin, k_end), each sum
// accumulated left to right in T. A block of consecutive k shares the loads of
// b; the per-k accumulation order is the same as the plain double loop.
template <class T>
void sliding_sums(std::span<const T> a, std::span<const T> b, std::span<T> out, std::size_t lo, std::size_t k_begin,
                  std::size_t k_end) {
  constexpr std::size_t B = kConvBlock;
  std::size_t k0 = k_begin;
  for (; k0 < k_end && k0 < 2 * lo; ++k0) out[k0] = T(0);  // empty sums
  for (; k0 + B <= k_end; k0 += B) {
    T acc[B] = {};
    const std::size_t common_end = k0 - lo;  // inclusive upper j shared by the whole block
    for (std::size_t j = lo; j <= common_end; ++j) {
      const T aj = a[j];
      const T* bp = b.data() + (k0 - j);
      for (std::size_t i = 0; i < B; ++i) acc[i] += aj * bp[i];
    }
    for (std::size_t i = 1; i < B; ++i) {
      const std::size_t k = k0 + i;
      for (std::size_t j = common_end + 1; j <= k - lo; ++j) acc[i] += a[j] * b[k - j];
    }
    for (std::size_t i = 0; i < B; ++i) out[k0 + i] = acc[i];
  }
  for (; k0 < k_end; ++k0) {
    T s = T(0);
    for (std::size_t j = lo; j <= k0 - lo; ++j) s += a[j] * b[k0 - j];
    out[k0] = s;
  }
}

template <class T>
std::vector<T> sliding_sums_parallel(std::span<const T> a, std::span<const T> b, std::size_t lo) {
  std::vector<T> sums(a.size());
  parallel_chunks(a.size(), 16 * kConvBlock, [&](std::size_t begin, std::size_t end) {
    sliding_sums<T>(a, b, sums, lo, begin, end);
  });
  return sums;
}

}  // namespace detail

/// Direct O(N^2) scaled convolution: out_k = h * sum_{j=0}^{k} a_j b_{k-j}.
template <class T>
BasicGridDensity<T> conv_direct(const BasicGridDensity<T>& a, const BasicGridDensity<T>& b) {
  require_same_grid(a.grid(), b.grid(), "conv_direct");
  const auto sums = detail::sliding_sums_parallel<T>(a.values(), b.values(), 0);
  const T h = static_cast<T>(a.grid().step());
  BasicGridDensity<T> out(a.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = h * sums[k];
  return out;
}

/// Endpoint-corrected direct convolution:
///   out_k = h * (sum_{j=1}^{k-1} a_j b_{k-j} + (a_0 b_k + a_k b_0) / 2),  k >= 1,
///   out_0 = h * a_0 * b_0.
template <class T>
BasicGridDensity<T> conv_direct_endpoint(const BasicGridDensity<T>& a, const BasicGridDensity<T>& b) {
  require_same_grid(a.grid(), b.grid(), "conv_direct_endpoint");
  const auto sums = detail::sliding_sums_parallel<T>(a.values(), b.values(), 1);
  const T h = static_cast<T>(a.grid().step());
  const T half = T(0.5);
  BasicGridDensity<T> out(a.grid());
  out[0] = h * (a[0] * b[0]);
  for (std::size_t k = 1; k < out.size(); ++k) {
    const T ends = a[0] * b[k] + a[k] * b[0];
    out[k] = h * (sums[k] + half * ends);
  }
  return out;
}

/// FFT convolution followed by the same endpoint correction, applied by
/// subtracting h/2 (a_0 b_k + a_k b_0) for k >= 1.
template <class T>
BasicGridDensity<T> conv_fft_endpoint(const BasicGridDensity<T>& a, const BasicGridDensity<T>& b) {
  auto out = conv_fft<T>(a, b);
  if (a[0] == T(0) && b[0] == T(0)) return out;
  const T half_h = static_cast<T>(0.5 * a.grid().step());
  for (std::size_t k = 1; k < out.size(); ++k) out[k] -= half_h * (a[0] * b[k] + a[k] * b[0]);
  return out;
}

/// One scaled convolution with the chosen implementation and endpoint rule.
template <class T>
BasicGridDensity<T> convolve(const BasicGridDensity<T>& a, const BasicGridDensity<T>& b, ConvKind kind,
                             bool endpoint) {
  if (kind == ConvKind::Direct) return endpoint ? conv_direct_endpoint(a, b) : conv_direct(a, b);
  return endpoint ? conv_fft_endpoint(a, b) : conv_fft(a, b);
}

/// Number of convolutions self_conv_power performs for a given n.
inline std::size_t self_conv_count(std::size_t n) {
  if (n == 0) throw std::invalid_argument("self_conv_count: n must be >= 1");
  const auto m = static_cast<std::size_t>(std::bit_width(n) - 1);
  return m + static_cast<std::size_t>(std::popcount(n)) - 1;
}

/// n-fold convolution power by binary decomposition: the powers f^(2^l) are
/// built by repeated squaring for l <= m = floor(log2 n), and when n is not a
/// power of two the result is f^(2^m) convolved with the remainder power
/// f^(n - 2^m), itself assembled from the cached squares. Uses
/// self_conv_count(n) <= 2 floor(log2 n) convolutions.
template <class T>
BasicGridDensity<T> self_conv_power(const BasicGridDensity<T>& fbar, std::size_t n, ConvKind kind, bool endpoint) {
  if (n == 0) throw std::invalid_argument("self_conv_power: n must be >= 1");
  const auto m = static_cast<std::size_t>(std::bit_width(n) - 1);
  std::vector<BasicGridDensity<T>> squares;
  squares.reserve(m + 1);
  squares.push_back(fbar);
  for (std::size_t l = 1; l <= m; ++l) squares.push_back(convolve(squares.back(), squares.back(), kind, endpoint));

  // Peel set bits from the top: f^n = f^(2^m) (*) f^(n - 2^m).
  std::vector<std::size_t> bits;
  for (std::size_t l = m + 1; l-- > 0;) {
    if ((n >> l) & 1u) bits.push_back(l);
  }
  BasicGridDensity<T> acc = squares[bits.back()];
  for (std::size_t i = bits.size() - 1; i-- > 0;) acc = convolve(squares[bits[i]], acc, kind, endpoint);
  return acc;
}

/// Left fold of the convolution over a list of (possibly different) sampled
/// densities, in list order.
template <class T>
BasicGridDensity<T> conv_fold_heterogeneous(std::span<const BasicGridDensity<T>> densities, ConvKind kind,
                                            bool endpoint) {
  if (densities.empty()) throw std::invalid_argument("conv_fold_heterogeneous: empty list");
  for (const auto& d : densities) require_same_grid(densities.front().grid(), d.grid(), "conv_fold_heterogeneous");
  BasicGridDensity<T> acc = densities.front();
  for (std::size_t i = 1; i < densities.size(); ++i) acc = convolve(acc, densities[i], kind, endpoint);
  return acc;
}

}  // namespace convtail

#endif  // CONVTAIL_CONVOLUTION_HPP
