#ifndef CONVTAIL_GRID_HPP
#define CONVTAIL_GRID_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "convtail/distributions.hpp"

namespace convtail {

/// Uniform mesh x_j = j * h, j = 0..N, on [0, gamma] with h = gamma / N.
class UniformGrid {
 public:
  UniformGrid(double gamma, std::size_t n_intervals) : gamma_(gamma), n_(n_intervals) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("grid: gamma must be positive");
    if (n_intervals < 2) throw std::invalid_argument("grid: need at least 2 intervals");
    step_ = gamma / static_cast<double>(n_intervals);
  }

  double gamma() const { return gamma_; }
  std::size_t n_intervals() const { return n_; }
  double step() const { return step_; }
  std::size_t size() const { return n_ + 1; }
  double node(std::size_t j) const { return static_cast<double>(j) * step_; }

  friend bool operator==(const UniformGrid& a, const UniformGrid& b) {
    return a.gamma_ == b.gamma_ && a.n_ == b.n_;
  }

 private:
  double gamma_;
  std::size_t n_;
  double step_;
};

/// A density sampled on a UniformGrid; values[j] approximates the density at x_j.
template <class T>
class BasicGridDensity {
 public:
  using value_type = T;

  explicit BasicGridDensity(UniformGrid grid) : grid_(grid), values_(grid.size(), T(0)) {}

  BasicGridDensity(UniformGrid grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("grid density: expected " + std::to_string(grid_.size()) + " values, got " +
                                  std::to_string(values_.size()));
    }
  }

  const UniformGrid& grid() const { return grid_; }
  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  T operator[](std::size_t j) const { return values_[j]; }
  T& operator[](std::size_t j) { return values_[j]; }

  /// Value at the right end x_N = gamma.
  T at_gamma() const { return values_.back(); }

  /// Copy with every value rounded to U.
  template <class U>
  BasicGridDensity<U> cast() const {
    std::vector<U> v(values_.begin(), values_.end());
    return BasicGridDensity<U>(grid_, std::move(v));
  }

  friend bool operator==(const BasicGridDensity& a, const BasicGridDensity& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  UniformGrid grid_;
  std::vector<T> values_;
};

using GridDensity = BasicGridDensity<double>;

/// Point samples v_j = f(x_j), with v_0 = f(0+). Densities that are unbounded
/// at the origin are rejected.
template <class T = double>
BasicGridDensity<T> sample_pdf(const Distribution& dist, const UniformGrid& grid) {
  if (!dist.boundary_class().bounded) {
    throw std::domain_error("sample_pdf: " + dist.to_string() + " is unbounded at 0 and cannot be point-sampled");
  }
  std::vector<T> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = static_cast<T>(dist.pdf(grid.node(j)));
  return BasicGridDensity<T>(grid, std::move(v));
}

inline void require_same_grid(const UniformGrid& a, const UniformGrid& b, const char* op) {
  if (!(a == b)) throw std::invalid_argument(std::string(op) + ": operands live on different grids");
}

}  // namespace convtail

#endif  // CONVTAIL_GRID_HPP
