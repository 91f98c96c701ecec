#ifndef CONVTAIL_ESTIMATOR_HPP
#define CONVTAIL_ESTIMATOR_HPP

// alpha = P(X_1 + ... + X_n < gamma) from grid-sampled densities: sample each
// distinct factor once, raise it to its multiplicity with the binary
// convolution schedule, fold the groups, and integrate with a Newton-Cotes rule.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "convtail/convolution.hpp"
#include "convtail/distributions.hpp"
#include "convtail/grid.hpp"
#include "convtail/precision.hpp"
#include "convtail/quadrature.hpp"

namespace convtail {

/// `count` independent copies of `dist`.
struct Factor {
  Distribution dist;
  std::size_t count = 1;
};

struct EstimatorConfig {
  std::vector<Factor> factors;
  double gamma = 1.0;
  std::size_t n_intervals = 1024;
  ConvBackend backend{};
  NewtonCotesRule rule = NewtonCotesRule::boole();
  std::optional<bool> endpoint_override;

  std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& f : factors) n += f.count;
    return n;
  }

  void validate() const {
    if (factors.empty() || total_count() == 0) throw std::invalid_argument("estimator: need at least one summand");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("estimator: gamma must be positive");
    require_admissible(rule, n_intervals);
  }
};

struct EstimateReport {
  double alpha_hat = 0.0;
  double density_at_gamma = 0.0;
  UniformGrid grid{1.0, 2};
  ConvBackend backend{};
  NewtonCotesRule rule{};
  bool endpoint = false;
  std::size_t total_count = 0;
  std::optional<double> reference_alpha;
  std::optional<double> relative_error;
  std::optional<std::size_t> adjusted_n;  // set by the CLI when it rounded N up
  double seconds = 0.0;
};

/// Identical factors merged (first-occurrence order); densities that are
/// unbounded at 0 are replaced through their exact sum law by groups whose
/// density is bounded, e.g. 16 x chisq(df=1) -> 8 x chisq(df=2).
inline std::vector<Factor> group_factors(const std::vector<Factor>& factors) {
  std::vector<Factor> groups;
  for (const auto& f : factors) {
    if (f.count == 0) continue;
    bool merged = false;
    for (auto& g : groups) {
      if (g.dist == f.dist) {
        g.count += f.count;
        merged = true;
        break;
      }
    }
    if (!merged) groups.push_back(f);
  }

  std::vector<Factor> out;
  for (const auto& g : groups) {
    if (g.dist.boundary_class().bounded) {
      out.push_back(g);
      continue;
    }
    std::size_t size = 2;
    std::optional<Distribution> law;
    for (; size <= g.count; ++size) {
      law = exact_sum_distribution(g.dist, size);
      if (!law || law->boundary_class().bounded) break;
    }
    if (!law || !law->boundary_class().bounded) {
      throw std::domain_error("estimator: " + g.dist.to_string() +
                              " is unbounded at 0 and cannot be combined into a bounded density");
    }
    const std::size_t copies = g.count / size;
    const std::size_t rest = g.count % size;
    if (copies > 1 || rest == 0) out.push_back({*law, rest == 0 ? copies : copies - 1});
    if (rest != 0) out.push_back({*exact_sum_distribution(g.dist, size + rest), 1});
  }
  return out;
}

/// Endpoint-corrected convolution is selected when any factor fails to vanish
/// to second order at the origin, unless the caller overrides it.
inline bool select_endpoint(const std::vector<Factor>& groups, std::optional<bool> override_value) {
  if (override_value) return *override_value;
  for (const auto& g : groups) {
    if (g.dist.boundary_class().needs_endpoint_correction()) return true;
  }
  return false;
}

/// Exact alpha for pure chi-squared or pure Levy sums.
inline std::optional<double> exact_reference(const std::vector<Factor>& factors, double gamma) {
  if (factors.empty()) return std::nullopt;
  const DistKind kind = factors.front().dist.kind();
  for (const auto& f : factors) {
    if (f.dist.kind() != kind) return std::nullopt;
  }
  if (kind == DistKind::ChiSquared) {
    double df = 0.0;
    for (const auto& f : factors) df += static_cast<double>(f.count) * f.dist.param("df");
    return special::reg_lower_gamma(0.5 * df, 0.5 * gamma);
  }
  if (kind == DistKind::Levy) {
    double root_c = 0.0;
    for (const auto& f : factors) root_c += static_cast<double>(f.count) * std::sqrt(f.dist.param("c"));
    return special::erfc(std::sqrt(root_c * root_c / (2.0 * gamma)));
  }
  return std::nullopt;
}

/// Sampled density of the sum, computed in working precision T.
template <class T>
BasicGridDensity<T> sum_density(const EstimatorConfig& cfg, bool* endpoint_used = nullptr) {
  cfg.validate();
  const UniformGrid grid(cfg.gamma, cfg.n_intervals);
  const auto groups = group_factors(cfg.factors);
  const bool endpoint = select_endpoint(groups, cfg.endpoint_override);
  if (endpoint_used) *endpoint_used = endpoint;

  std::vector<BasicGridDensity<T>> powers;
  powers.reserve(groups.size());
  for (const auto& g : groups) {
    powers.push_back(self_conv_power(sample_pdf<T>(g.dist, grid), g.count, cfg.backend.kind, endpoint));
  }
  return conv_fold_heterogeneous<T>(powers, cfg.backend.kind, endpoint);
}

/// Estimate of alpha with metadata and, for chi-squared/Levy sums, the exact
/// value and relative error.
inline EstimateReport tail_probability(const EstimatorConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  EstimateReport r;
  r.grid = UniformGrid(cfg.gamma, cfg.n_intervals);
  r.backend = cfg.backend;
  r.rule = cfg.rule;
  r.total_count = cfg.total_count();
  with_precision(cfg.backend.precision, [&](auto tag) {
    using T = decltype(tag);
    const auto density = sum_density<T>(cfg, &r.endpoint);
    r.alpha_hat = static_cast<double>(integrate<T>(cfg.rule, density));
    r.density_at_gamma = static_cast<double>(density.at_gamma());
  });
  r.reference_alpha = exact_reference(cfg.factors, cfg.gamma);
  if (r.reference_alpha && *r.reference_alpha > 0.0) {
    r.relative_error = std::abs(r.alpha_hat - *r.reference_alpha) / *r.reference_alpha;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Value of the n-fold convolution at the right end of the grid, x_N = gamma.
inline double density_at_gamma(const EstimatorConfig& cfg) {
  return with_precision(cfg.backend.precision, [&](auto tag) {
    using T = decltype(tag);
    return static_cast<double>(sum_density<T>(cfg).at_gamma());
  });
}

}  // namespace convtail

#endif  // CONVTAIL_ESTIMATOR_HPP
