#ifndef CONVTAIL_PRECISION_HPP
#define CONVTAIL_PRECISION_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace convtail {

/// Working precision of a computation. Emulated32 is realised by carrying out
/// every operation in IEEE binary32, which rounds each add, subtract, multiply
/// and divide to the nearest float (the library is built with FMA contraction
/// disabled).
enum class PrecisionMode { Native64, Emulated32 };

/// Unit roundoff 2^-p of the mode's significand.
constexpr double machine_epsilon(PrecisionMode mode) {
  return mode == PrecisionMode::Native64 ? 0x1p-53 : 0x1p-24;
}

template <class T>
constexpr PrecisionMode precision_of() {
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, float>);
  return std::is_same_v<T, double> ? PrecisionMode::Native64 : PrecisionMode::Emulated32;
}

template <PrecisionMode M>
using scalar_t = std::conditional_t<M == PrecisionMode::Native64, double, float>;

/// Calls `fn(T{})` with the scalar type that realises `mode`.
template <class Fn>
decltype(auto) with_precision(PrecisionMode mode, Fn&& fn) {
  if (mode == PrecisionMode::Native64) return fn(double{});
  return fn(float{});
}

constexpr std::string_view to_string(PrecisionMode mode) {
  return mode == PrecisionMode::Native64 ? "64" : "32emu";
}

inline PrecisionMode parse_precision(std::string_view s) {
  if (s == "64" || s == "native64") return PrecisionMode::Native64;
  if (s == "32emu" || s == "32" || s == "emulated32") return PrecisionMode::Emulated32;
  throw std::invalid_argument("unknown precision '" + std::string(s) + "' (expected 64 or 32emu)");
}

}  // namespace convtail

#endif  // CONVTAIL_PRECISION_HPP
