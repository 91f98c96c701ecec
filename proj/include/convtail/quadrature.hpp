#ifndef CONVTAIL_QUADRATURE_HPP
#define CONVTAIL_QUADRATURE_HPP

// Closed composite Newton-Cotes rules on the uniform grid:
//   trapezoid  h   (1/2, 1, ..., 1, 1/2)
//   Simpson    h/3 (1, 4, 2, 4, ..., 4, 1)
//   Boole      2h/45 (7, 32, 12, 32, 14, 32, 12, ..., 32, 7)

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "convtail/grid.hpp"

namespace convtail {

enum class RuleKind { Trapezoid, Simpson, Boole };

struct NewtonCotesRule {
  RuleKind kind = RuleKind::Boole;

  /// Convergence order r for smooth integrands.
  constexpr int order() const { return kind == RuleKind::Trapezoid ? 2 : kind == RuleKind::Simpson ? 4 : 6; }

  /// N must be a multiple of this.
  constexpr std::size_t divisibility() const {
    return kind == RuleKind::Trapezoid ? 1 : kind == RuleKind::Simpson ? 2 : 4;
  }

  constexpr std::string_view name() const {
    return kind == RuleKind::Trapezoid ? "trapezoid" : kind == RuleKind::Simpson ? "simpson" : "boole";
  }

  constexpr bool admits(std::size_t n_intervals) const { return n_intervals % divisibility() == 0; }

  /// Smallest admissible N >= n_intervals.
  constexpr std::size_t round_up(std::size_t n_intervals) const {
    const std::size_t d = divisibility();
    return (n_intervals + d - 1) / d * d;
  }

  static constexpr NewtonCotesRule trapezoid() { return {RuleKind::Trapezoid}; }
  static constexpr NewtonCotesRule simpson() { return {RuleKind::Simpson}; }
  static constexpr NewtonCotesRule boole() { return {RuleKind::Boole}; }

  static NewtonCotesRule parse(std::string_view s) {
    if (s == "trapezoid" || s == "trapezoidal" || s == "trap") return trapezoid();
    if (s == "simpson") return simpson();
    if (s == "boole") return boole();
    throw std::invalid_argument("unknown rule '" + std::string(s) + "' (expected trapezoid, simpson or boole)");
  }

  friend constexpr bool operator==(const NewtonCotesRule&, const NewtonCotesRule&) = default;
};

inline void require_admissible(const NewtonCotesRule& rule, std::size_t n_intervals) {
  if (!rule.admits(n_intervals)) {
    throw std::invalid_argument(std::string(rule.name()) + " rule needs N to be a multiple of " +
                                std::to_string(rule.divisibility()) + ", got N = " + std::to_string(n_intervals));
  }
}

/// Quadrature weights w_0..w_N, computed in binary64 and rounded once to T.
template <class T = double>
std::vector<T> weights(const NewtonCotesRule& rule, const UniformGrid& grid) {
  const std::size_t n = grid.n_intervals();
  require_admissible(rule, n);
  const double h = grid.step();
  std::vector<T> w(n + 1);
  switch (rule.kind) {
    case RuleKind::Trapezoid:
      for (std::size_t j = 0; j <= n; ++j) w[j] = static_cast<T>(j == 0 || j == n ? 0.5 * h : h);
      break;
    case RuleKind::Simpson: {
      const double s = h / 3.0;
      for (std::size_t j = 0; j <= n; ++j) {
        const double c = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        w[j] = static_cast<T>(c * s);
      }
      break;
    }
    case RuleKind::Boole: {
      const double s = 2.0 * h / 45.0;
      static constexpr std::array<double, 4> interior = {14.0, 32.0, 12.0, 32.0};
      for (std::size_t j = 0; j <= n; ++j) {
        const double c = (j == 0 || j == n) ? 7.0 : interior[j % 4];
        w[j] = static_cast<T>(c * s);
      }
      break;
    }
  }
  return w;
}

/// sum_j w_j v_j, accumulated left to right in T.
template <class T>
T integrate(const NewtonCotesRule& rule, const BasicGridDensity<T>& density) {
  const auto w = weights<T>(rule, density.grid());
  T sum = T(0);
  for (std::size_t j = 0; j < w.size(); ++j) sum += w[j] * density[j];
  return sum;
}

}  // namespace convtail

#endif  // CONVTAIL_QUADRATURE_HPP
