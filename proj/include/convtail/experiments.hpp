#ifndef CONVTAIL_EXPERIMENTS_HPP
#define CONVTAIL_EXPERIMENTS_HPP

// Study drivers on top of the estimator: convergence-rate sweeps against a
// pseudo-reference, precision comparison tables, wall-time scaling, and a
// naive Monte Carlo cross-check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "convtail/estimator.hpp"

namespace convtail::experiments {

// ---------------------------------------------------------------------------
// CSV helpers

/// Scientific notation with 10 significant digits.
inline std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Convergence studies

struct ConvergenceRow {
  std::size_t n_intervals = 0;
  double alpha_hat = 0.0;
  double relative_error = 0.0;
  NewtonCotesRule rule{};
};

struct ConvergenceStudyConfig {
  EstimatorConfig base;  // n_intervals and rule are overridden
  std::size_t n_max = std::size_t{1} << 18;
  std::size_t n_start = std::size_t{1} << 7;
  double epsilon = 1e-8;
  std::vector<NewtonCotesRule> rules = {NewtonCotesRule::trapezoid(), NewtonCotesRule::simpson(),
                                        NewtonCotesRule::boole()};
  // Compare against the exact law instead of a pseudo-reference when one exists.
  bool prefer_exact_reference = false;
};

struct ConvergenceStudy {
  double reference_alpha = 0.0;
  std::size_t reference_n = 0;
  bool exact_reference = false;
  std::vector<ConvergenceRow> rows;          // ordered by (N, rule position)
  std::map<RuleKind, double> slopes;         // fitted order per rule (when fittable)
  std::map<RuleKind, std::size_t> fit_rows;  // rows that entered each fit
};

/// Rounding floor 4 n N eps of direct convolution in binary64.
inline double rounding_floor(std::size_t n, std::size_t n_intervals, double eps = 0x1p-53) {
  return 4.0 * static_cast<double>(n) * static_cast<double>(n_intervals) * eps;
}

/// Negative least-squares slope of log(delta) against log(N). Rows with
/// delta <= 0 are ignored; two rows give the two-point slope, fewer throw.
inline double fit_convergence_order(const std::vector<ConvergenceRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.relative_error > 0.0 && std::isfinite(r.relative_error)) {
      pts.emplace_back(std::log(static_cast<double>(r.n_intervals)), std::log(r.relative_error));
    }
  }
  if (pts.size() < 2) throw std::invalid_argument("fit_convergence_order: need at least 2 rows with delta > 0");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_convergence_order: rows must have distinct N");
  return -sxy / sxx;
}

/// Pseudo-reference at N_M with Boole, then N = N_start, 2 N_start, ... until
/// every rule's delta is below epsilon or N reaches N_M / 2. Slopes are fitted
/// per rule on rows above 100x the rounding floor.
inline ConvergenceStudy run_convergence_study(const ConvergenceStudyConfig& cfg) {
  if (cfg.rules.empty()) throw std::invalid_argument("convergence study: no rules");
  if (cfg.n_start == 0 || cfg.n_start * 2 > cfg.n_max) {
    throw std::invalid_argument("convergence study: need 0 < N_start <= N_max / 2");
  }
  for (const auto& rule : cfg.rules) require_admissible(rule, cfg.n_start);
  require_admissible(NewtonCotesRule::boole(), cfg.n_max);

  ConvergenceStudy study;
  const std::size_t n_sum = cfg.base.total_count();
  auto exact = exact_reference(cfg.base.factors, cfg.base.gamma);
  if (cfg.prefer_exact_reference && exact) {
    study.reference_alpha = *exact;
    study.exact_reference = true;
  } else {
    EstimatorConfig ref = cfg.base;
    ref.n_intervals = cfg.n_max;
    ref.rule = NewtonCotesRule::boole();
    study.reference_alpha = tail_probability(ref).alpha_hat;
    study.reference_n = cfg.n_max;
  }
  if (!(study.reference_alpha > 0.0)) throw std::runtime_error("convergence study: reference alpha is not positive");

  for (std::size_t n = cfg.n_start; n <= cfg.n_max / 2; n *= 2) {
    EstimatorConfig c = cfg.base;
    c.n_intervals = n;
    const auto density = with_precision(c.backend.precision, [&](auto tag) {
      using T = decltype(tag);
      return sum_density<T>(c).template cast<double>();
    });
    bool all_below = true;
    for (const auto& rule : cfg.rules) {
      const double a = integrate(rule, density);
      const double delta = std::abs(a - study.reference_alpha) / study.reference_alpha;
      study.rows.push_back({n, a, delta, rule});
      all_below = all_below && delta < cfg.epsilon;
    }
    if (all_below) break;
  }

  for (const auto& rule : cfg.rules) {
    std::vector<ConvergenceRow> usable;
    for (const auto& r : study.rows) {
      if (r.rule == rule && r.relative_error >= 100.0 * rounding_floor(n_sum, r.n_intervals)) usable.push_back(r);
    }
    if (usable.size() >= 2) {
      study.slopes[rule.kind] = fit_convergence_order(usable);
      study.fit_rows[rule.kind] = usable.size();
    }
  }
  return study;
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceStudy& study) {
  os << "rule,n_intervals,alpha_hat,relative_error\n";
  for (const auto& r : study.rows) {
    os << r.rule.name() << ',' << r.n_intervals << ',' << sci(r.alpha_hat) << ',' << sci(r.relative_error) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Precision comparison

struct PrecisionRow {
  double gamma = 0.0;
  double alpha_ref = 0.0;
  double delta_direct64 = 0.0;
  double delta_fft64 = 0.0;
  double delta_fft32emu = 0.0;
};

/// Relative error of direct/64, FFT/64 and FFT/32emu per gamma, against the
/// exact law when available, else a direct/64 Boole pseudo-reference at
/// `reference_n`.
inline std::vector<PrecisionRow> run_precision_comparison(const EstimatorConfig& base, const std::vector<double>& gammas,
                                                          std::size_t n_intervals,
                                                          std::size_t reference_n = std::size_t{1} << 18) {
  std::vector<PrecisionRow> rows;
  for (double g : gammas) {
    EstimatorConfig c = base;
    c.gamma = g;
    c.n_intervals = n_intervals;
    PrecisionRow row;
    row.gamma = g;
    if (auto exact = exact_reference(c.factors, g)) {
      row.alpha_ref = *exact;
    } else {
      EstimatorConfig ref = c;
      ref.n_intervals = reference_n;
      ref.rule = NewtonCotesRule::boole();
      ref.backend = {ConvKind::Direct, PrecisionMode::Native64};
      row.alpha_ref = tail_probability(ref).alpha_hat;
    }
    auto delta = [&](ConvKind kind, PrecisionMode mode) {
      EstimatorConfig e = c;
      e.backend = {kind, mode};
      return std::abs(tail_probability(e).alpha_hat - row.alpha_ref) / row.alpha_ref;
    };
    row.delta_direct64 = delta(ConvKind::Direct, PrecisionMode::Native64);
    row.delta_fft64 = delta(ConvKind::Fft, PrecisionMode::Native64);
    row.delta_fft32emu = delta(ConvKind::Fft, PrecisionMode::Emulated32);
    rows.push_back(row);
  }
  return rows;
}

inline void write_precision_csv(std::ostream& os, const std::vector<PrecisionRow>& rows) {
  os << "gamma,alpha_ref,delta_direct64,delta_fft64,delta_fft32emu\n";
  for (const auto& r : rows) {
    os << sci(r.gamma) << ',' << sci(r.alpha_ref) << ',' << sci(r.delta_direct64) << ',' << sci(r.delta_fft64) << ','
       << sci(r.delta_fft32emu) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Cost benchmark

struct BenchRow {
  ConvBackend backend{};
  std::size_t n_intervals = 0;
  double seconds = 0.0;  // median over repetitions
};

struct BenchConfig {
  std::vector<std::size_t> sizes;
  std::size_t count = 16;
  std::vector<ConvBackend> backends = {{ConvKind::Direct, PrecisionMode::Native64},
                                       {ConvKind::Fft, PrecisionMode::Native64}};
  Distribution dist = Distribution::lognormal(0.0, 0.125);
  double gamma = 16.0;
  std::size_t repetitions = 5;
};

/// Median-of-k wall time of a full estimate per (backend, N), after one
/// warm-up run.
inline std::vector<BenchRow> run_cost_benchmark(const BenchConfig& cfg) {
  for (std::size_t i = 1; i < cfg.sizes.size(); ++i) {
    if (cfg.sizes[i] <= cfg.sizes[i - 1]) throw std::invalid_argument("bench: sizes must be increasing");
  }
  if (cfg.repetitions == 0) throw std::invalid_argument("bench: need at least one repetition");
  std::vector<EstimatorConfig> configs;
  for (const auto& backend : cfg.backends) {
    for (std::size_t n : cfg.sizes) {
      EstimatorConfig c;
      c.factors = {{cfg.dist, cfg.count}};
      c.gamma = cfg.gamma;
      c.n_intervals = n;
      c.backend = backend;
      c.rule = NewtonCotesRule::trapezoid();
      configs.push_back(c);
    }
  }
  // Round-robin over the configurations, so a slow drift in machine speed
  // lands on every size alike instead of skewing the ratios between them.
  volatile double sink = 0.0;
  for (const auto& c : configs) sink = tail_probability(c).alpha_hat;
  std::vector<std::vector<double>> times(configs.size());
  for (std::size_t r = 0; r < cfg.repetitions; ++r) {
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      sink = tail_probability(configs[i]).alpha_hat;
      times[i].push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
  }
  (void)sink;
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::sort(times[i].begin(), times[i].end());
    rows.push_back({configs[i].backend, configs[i].n_intervals, times[i][times[i].size() / 2]});
  }
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "backend,precision,n_intervals,seconds\n";
  for (const auto& r : rows) {
    os << to_string(r.backend.kind) << ',' << to_string(r.backend.precision) << ',' << r.n_intervals << ','
       << sci(r.seconds) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Monte Carlo oracle

struct McEstimate {
  double alpha_hat = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

// Uniform on the open interval (0, 1) from 53 random bits.
inline double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

class Sampler {
 public:
  explicit Sampler(const Distribution& d) : dist_(d) {
    switch (d.kind()) {
      case DistKind::ChiSquared: chi_.emplace(d.param("df")); break;
      case DistKind::LogNormal: logn_.emplace(d.param("mu"), d.param("sigma")); break;
      case DistKind::Levy: break;
      default:
        throw std::invalid_argument("mc_oracle: no sampler for " + d.to_string() +
                                    " (supported: chisq, levy, lognormal)");
    }
  }

  double operator()(std::mt19937_64& rng) {
    switch (dist_.kind()) {
      case DistKind::ChiSquared: return (*chi_)(rng);
      case DistKind::LogNormal: return (*logn_)(rng);
      default: {
        // Inverse CDF of Levy(0, c): F(x) = erfc(sqrt(c / 2x)).
        const double z = special::erfc_inv(open_uniform(rng));
        return dist_.param("c") / (2.0 * z * z);
      }
    }
  }

 private:
  Distribution dist_;
  std::optional<std::chi_squared_distribution<double>> chi_;
  std::optional<std::lognormal_distribution<double>> logn_;
};

}  // namespace detail

/// Naive Monte Carlo estimate of P(sum < gamma) with its binomial standard
/// error; deterministic for a given seed.
inline McEstimate mc_oracle(const std::vector<Factor>& factors, double gamma, std::uint64_t samples,
                            std::uint64_t seed) {
  if (samples < 1000) throw std::invalid_argument("mc_oracle: need at least 1000 samples");
  if (!(gamma > 0.0)) throw std::invalid_argument("mc_oracle: gamma must be positive");
  std::vector<std::pair<detail::Sampler, std::size_t>> samplers;
  for (const auto& f : factors) samplers.emplace_back(detail::Sampler(f.dist), f.count);
  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    double sum = 0.0;
    for (auto& [sampler, count] : samplers) {
      for (std::size_t i = 0; i < count; ++i) sum += sampler(rng);
    }
    if (sum < gamma) ++hits;
  }
  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.alpha_hat = static_cast<double>(hits) / static_cast<double>(samples);
  est.std_error = std::sqrt(est.alpha_hat * (1.0 - est.alpha_hat) / static_cast<double>(samples));
  return est;
}

}  // namespace convtail::experiments

#endif  // CONVTAIL_EXPERIMENTS_HPP
