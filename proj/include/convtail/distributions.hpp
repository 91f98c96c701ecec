#ifndef CONVTAIL_DISTRIBUTIONS_HPP
#define CONVTAIL_DISTRIBUTIONS_HPP

// Non-negative continuous densities used as summands: the fading-channel
// envelopes (Rayleigh, Nakagami-m, Rice, Weibull, Log-Normal, generalized
// Gamma, kappa-mu) and the two laws with closed-form sums (chi-squared, Levy).

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "convtail/special_functions.hpp"

namespace convtail {

enum class DistKind { Rayleigh, NakagamiM, Rice, Weibull, LogNormal, GeneralizedGamma, KappaMu, ChiSquared, Levy };

/// Behaviour of a density at the origin: the number q of leading derivatives
/// f, f', ..., f^(q-1) that vanish at 0+. `all_vanish` marks densities that are
/// flat to every order (Log-Normal, Levy); `bounded` is false when f(0+) is
/// infinite, in which case the density cannot be point-sampled at x = 0.
struct BoundaryClass {
  int vanishing_order = 0;
  bool all_vanish = false;
  bool bounded = true;

  static constexpr BoundaryClass all() { return {std::numeric_limits<int>::max(), true, true}; }
  static constexpr BoundaryClass order(int q) { return {q, false, true}; }
  static constexpr BoundaryClass unbounded() { return {0, false, false}; }

  /// True when the endpoint-corrected convolution should be used.
  constexpr bool needs_endpoint_correction() const { return !all_vanish && vanishing_order <= 1; }

  friend constexpr bool operator==(const BoundaryClass&, const BoundaryClass&) = default;
};

class Distribution {
 public:
  static Distribution rayleigh(double omega = 1.0) { return Distribution(DistKind::Rayleigh, {omega, 0, 0}); }
  static Distribution nakagami(double m, double omega = 1.0) {
    return Distribution(DistKind::NakagamiM, {m, omega, 0});
  }
  /// Rice with K = nu^2 / 2 and Omega = nu^2 + 2 (unit-variance scatter).
  static Distribution rice(double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("rice: nu must be positive");
    return rice_k_omega(0.5 * nu * nu, nu * nu + 2.0);
  }
  static Distribution rice_k_omega(double k, double omega) { return Distribution(DistKind::Rice, {k, omega, 0}); }
  static Distribution weibull(double k, double omega = 1.0) { return Distribution(DistKind::Weibull, {k, omega, 0}); }
  static Distribution lognormal(double mu, double sigma) { return Distribution(DistKind::LogNormal, {mu, sigma, 0}); }
  static Distribution generalized_gamma(double p, double d, double omega = 1.0) {
    return Distribution(DistKind::GeneralizedGamma, {p, d, omega});
  }
  static Distribution kappa_mu(double kappa, double mu, double omega = 1.0) {
    return Distribution(DistKind::KappaMu, {kappa, mu, omega});
  }
  static Distribution chi_squared(double df) { return Distribution(DistKind::ChiSquared, {df, 0, 0}); }
  static Distribution levy(double c) { return Distribution(DistKind::Levy, {c, 0, 0}); }

  DistKind kind() const { return kind_; }

  /// Named parameters in canonical order.
  std::vector<std::pair<std::string, double>> params() const {
    std::vector<std::pair<std::string, double>> out;
    const auto names = param_names(kind_);
    for (std::size_t i = 0; i < names.size(); ++i) out.emplace_back(std::string(names[i]), p_[i]);
    return out;
  }

  double param(std::string_view name) const {
    const auto names = param_names(kind_);
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return p_[i];
    }
    throw std::invalid_argument("distribution has no parameter '" + std::string(name) + "'");
  }

  /// Density value; at x = 0 the right limit f(0+) (possibly +inf).
  double pdf(double x) const {
    if (!(x >= 0.0)) throw std::domain_error("pdf: argument must be non-negative");
    if (x == 0.0) {
      if (kind_ == DistKind::LogNormal || kind_ == DistKind::Levy) return 0.0;
      if (lead_power_ > 0.0) return 0.0;
      if (lead_power_ == 0.0) return std::exp(log_norm_);
      return std::numeric_limits<double>::infinity();
    }
    if (std::isinf(x)) return 0.0;
    return std::exp(log_pdf(x));
  }

  /// ln f(x) for x > 0.
  double log_pdf(double x) const {
    const double lx = std::log(x);
    switch (kind_) {
      case DistKind::Rayleigh:
        return log_norm_ + lx - x * x / p_[0];
      case DistKind::NakagamiM:
        return log_norm_ + lead_power_ * lx - p_[0] * x * x / p_[1];
      case DistKind::Rice: {
        const double k = p_[0], omega = p_[1];
        return log_norm_ + lx - (k + 1.0) * x * x / omega + special::log_bessel_i(0.0, aux_ * x);
      }
      case DistKind::Weibull:
        return log_norm_ + lead_power_ * lx - std::pow(x * aux_, p_[0]);
      case DistKind::LogNormal: {
        const double z = (lx - p_[0]) / p_[1];
        return log_norm_ - lx - 0.5 * z * z;
      }
      case DistKind::GeneralizedGamma:
        return log_norm_ + lead_power_ * lx - std::pow(x * aux_, p_[0]);
      case DistKind::KappaMu: {
        const double k = p_[0], mu = p_[1], omega = p_[2];
        return log_norm_ + mu * lx - (k + 1.0) * mu * x * x / omega + special::log_bessel_i(mu - 1.0, aux_ * x);
      }
      case DistKind::ChiSquared:
        return log_norm_ + lead_power_ * lx - 0.5 * x;
      case DistKind::Levy:
        return log_norm_ - 0.5 * p_[0] / x - 1.5 * lx;
    }
    return -std::numeric_limits<double>::infinity();
  }

  /// Smoothness at the origin, derived from the leading power x^L of the
  /// closed form: q = ceil(L) for L >= 0, unbounded for L < 0.
  BoundaryClass boundary_class() const {
    if (kind_ == DistKind::LogNormal || kind_ == DistKind::Levy) return BoundaryClass::all();
    if (lead_power_ < 0.0) return BoundaryClass::unbounded();
    return BoundaryClass::order(static_cast<int>(std::ceil(lead_power_ - 1e-12)));
  }

  /// Canonical specification string, e.g. "lognormal(mu=0,sigma=0.125)".
  std::string to_string() const {
    std::string s(kind_name(kind_));
    s += '(';
    const auto names = param_names(kind_);
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) s += ',';
      s += names[i];
      s += '=';
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, p_[i]);
      s.append(buf, res.ptr);
    }
    s += ')';
    return s;
  }

  static std::string_view kind_name(DistKind k) {
    switch (k) {
      case DistKind::Rayleigh: return "rayleigh";
      case DistKind::NakagamiM: return "nakagami";
      case DistKind::Rice: return "rice";
      case DistKind::Weibull: return "weibull";
      case DistKind::LogNormal: return "lognormal";
      case DistKind::GeneralizedGamma: return "gengamma";
      case DistKind::KappaMu: return "kappamu";
      case DistKind::ChiSquared: return "chisq";
      case DistKind::Levy: return "levy";
    }
    return "?";
  }

  static std::vector<std::string_view> param_names(DistKind k) {
    switch (k) {
      case DistKind::Rayleigh: return {"omega"};
      case DistKind::NakagamiM: return {"m", "omega"};
      case DistKind::Rice: return {"k", "omega"};
      case DistKind::Weibull: return {"k", "omega"};
      case DistKind::LogNormal: return {"mu", "sigma"};
      case DistKind::GeneralizedGamma: return {"p", "d", "omega"};
      case DistKind::KappaMu: return {"kappa", "mu", "omega"};
      case DistKind::ChiSquared: return {"df"};
      case DistKind::Levy: return {"c"};
    }
    return {};
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.kind_ == b.kind_ && a.p_ == b.p_;
  }

 private:
  Distribution(DistKind kind, std::array<double, 3> p) : kind_(kind), p_(p) {
    validate();
    precompute();
  }

  static void check(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  }

  void validate() const {
    const auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
    switch (kind_) {
      case DistKind::Rayleigh: check(pos(p_[0]), "rayleigh: omega must be positive"); break;
      case DistKind::NakagamiM:
        check(p_[0] >= 0.5 && std::isfinite(p_[0]), "nakagami: m must be >= 1/2");
        check(pos(p_[1]), "nakagami: omega must be positive");
        break;
      case DistKind::Rice:
        check(pos(p_[0]), "rice: K must be positive");
        check(pos(p_[1]), "rice: omega must be positive");
        break;
      case DistKind::Weibull:
        check(pos(p_[0]), "weibull: k must be positive");
        check(pos(p_[1]), "weibull: omega must be positive");
        break;
      case DistKind::LogNormal:
        check(std::isfinite(p_[0]), "lognormal: mu must be finite");
        check(pos(p_[1]), "lognormal: sigma must be positive");
        break;
      case DistKind::GeneralizedGamma:
        check(pos(p_[0]), "gengamma: p must be positive");
        check(pos(p_[1]), "gengamma: d must be positive");
        check(pos(p_[2]), "gengamma: omega must be positive");
        break;
      case DistKind::KappaMu:
        check(pos(p_[0]), "kappamu: kappa must be positive");
        // I_{mu-1} is only implemented for non-negative order.
        check(p_[1] >= 1.0 && std::isfinite(p_[1]), "kappamu: mu must be >= 1");
        check(pos(p_[2]), "kappamu: omega must be positive");
        break;
      case DistKind::ChiSquared:
        check(pos(p_[0]) && p_[0] == std::floor(p_[0]), "chisq: df must be a positive integer");
        break;
      case DistKind::Levy: check(pos(p_[0]), "levy: c must be positive"); break;
    }
  }

  void precompute() {
    using special::ln_gamma;
    const double ln2 = std::numbers::ln2;
    const double ln2pi = std::log(2.0 * std::numbers::pi);
    switch (kind_) {
      case DistKind::Rayleigh:
        lead_power_ = 1.0;
        log_norm_ = ln2 - std::log(p_[0]);
        break;
      case DistKind::NakagamiM: {
        const double m = p_[0], omega = p_[1];
        lead_power_ = 2.0 * m - 1.0;
        log_norm_ = ln2 + m * std::log(m) - m * std::log(omega) - ln_gamma(m);
        break;
      }
      case DistKind::Rice: {
        const double k = p_[0], omega = p_[1];
        lead_power_ = 1.0;
        log_norm_ = std::log(2.0 * (k + 1.0) / omega) - k;
        aux_ = 2.0 * std::sqrt(k * (k + 1.0) / omega);
        break;
      }
      case DistKind::Weibull: {
        const double k = p_[0], omega = p_[1];
        const double beta = std::exp(ln_gamma(1.0 + 1.0 / k));
        lead_power_ = k - 1.0;
        aux_ = beta / omega;
        log_norm_ = std::log(k) + k * std::log(aux_);
        break;
      }
      case DistKind::LogNormal:
        lead_power_ = std::numeric_limits<double>::infinity();
        log_norm_ = -std::log(p_[1]) - 0.5 * ln2pi;
        break;
      case DistKind::GeneralizedGamma: {
        const double p = p_[0], d = p_[1], omega = p_[2];
        const double beta = std::exp(ln_gamma((d + 1.0) / p) - ln_gamma(d / p));
        lead_power_ = d - 1.0;
        aux_ = beta / omega;
        log_norm_ = std::log(p) + d * std::log(aux_) - ln_gamma(d / p);
        break;
      }
      case DistKind::KappaMu: {
        const double k = p_[0], mu = p_[1], omega = p_[2];
        lead_power_ = 2.0 * mu - 1.0;
        log_norm_ = std::log(2.0 * mu) + 0.5 * (1.0 + mu) * std::log(k + 1.0) - 0.5 * (1.0 + mu) * std::log(omega) -
                    0.5 * (mu - 1.0) * std::log(k) - mu * k;
        aux_ = 2.0 * mu * std::sqrt(k * (k + 1.0) / omega);
        break;
      }
      case DistKind::ChiSquared: {
        const double half = 0.5 * p_[0];
        lead_power_ = half - 1.0;
        log_norm_ = -half * ln2 - ln_gamma(half);
        break;
      }
      case DistKind::Levy:
        lead_power_ = std::numeric_limits<double>::infinity();
        log_norm_ = 0.5 * std::log(p_[0] / (2.0 * std::numbers::pi));
        break;
    }
  }

  DistKind kind_;
  std::array<double, 3> p_;
  double log_norm_ = 0.0;
  double lead_power_ = 0.0;
  double aux_ = 0.0;
};

/// Law of the sum of `n` i.i.d. copies when it is known in closed form
/// (chi-squared and Levy are closed under convolution).
inline std::optional<Distribution> exact_sum_distribution(const Distribution& dist, std::size_t n) {
  if (n == 0) throw std::invalid_argument("exact_sum_distribution: n must be >= 1");
  const double nd = static_cast<double>(n);
  switch (dist.kind()) {
    case DistKind::ChiSquared: return Distribution::chi_squared(nd * dist.param("df"));
    case DistKind::Levy: return Distribution::levy(nd * nd * dist.param("c"));
    default: return std::nullopt;
  }
}

/// CDF of chi-squared and Levy laws; nullopt for the rest of the catalog.
inline std::optional<double> closed_form_cdf(const Distribution& dist, double x) {
  if (!(x >= 0.0)) throw std::domain_error("cdf: argument must be non-negative");
  switch (dist.kind()) {
    case DistKind::ChiSquared: return special::reg_lower_gamma(0.5 * dist.param("df"), 0.5 * x);
    case DistKind::Levy:
      if (x == 0.0) return 0.0;
      return special::erfc(std::sqrt(dist.param("c") / (2.0 * x)));
    default: return std::nullopt;
  }
}

/// P(X_1 + ... + X_n < gamma) for i.i.d. chi-squared or Levy summands.
inline std::optional<double> exact_sum_cdf(const Distribution& dist, std::size_t n, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("exact_sum_cdf: gamma must be positive");
  auto sum = exact_sum_distribution(dist, n);
  if (!sum) return std::nullopt;
  return closed_form_cdf(*sum, gamma);
}

// ---------------------------------------------------------------------------
// Specification strings: name(param=value,...), case-insensitive.

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view s, std::string_view context) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("invalid number '" + std::string(s) + "' in " + std::string(context));
  }
  return v;
}

}  // namespace detail

inline Distribution parse_distribution(std::string_view spec) {
  const std::string text = detail::lower(detail::trim(spec));
  const auto open = text.find('(');
  const std::string name(detail::trim(std::string_view(text).substr(0, open)));
  std::vector<std::pair<std::string, double>> kv;
  if (open != std::string::npos) {
    const auto close = text.rfind(')');
    if (close == std::string::npos || close < open || close + 1 != text.size()) {
      throw std::invalid_argument("malformed distribution spec '" + std::string(spec) + "'");
    }
    std::string_view body = std::string_view(text).substr(open + 1, close - open - 1);
    while (!detail::trim(body).empty()) {
      const auto comma = body.find(',');
      std::string_view item = body.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw std::invalid_argument("expected param=value in '" + std::string(spec) + "'");
      }
      kv.emplace_back(std::string(detail::trim(item.substr(0, eq))), detail::parse_number(item.substr(eq + 1), spec));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
  }

  std::vector<std::string> used;
  auto get = [&](std::initializer_list<std::string_view> keys, std::optional<double> fallback) -> double {
    for (const auto& [k, v] : kv) {
      for (auto key : keys) {
        if (k == key) {
          used.push_back(k);
          return v;
        }
      }
    }
    if (!fallback) {
      throw std::invalid_argument("missing parameter '" + std::string(*keys.begin()) + "' in '" + std::string(spec) + "'");
    }
    return *fallback;
  };
  auto finish = [&](Distribution d) {
    for (const auto& [k, v] : kv) {
      if (std::find(used.begin(), used.end(), k) == used.end()) {
        throw std::invalid_argument("unknown parameter '" + k + "' in '" + std::string(spec) + "'");
      }
    }
    return d;
  };

  if (name == "rayleigh") return finish(Distribution::rayleigh(get({"omega"}, 1.0)));
  if (name == "nakagami" || name == "nakagami-m" || name == "nakagamim") {
    return finish(Distribution::nakagami(get({"m"}, 1.0), get({"omega"}, 1.0)));
  }
  if (name == "rice" || name == "rician") {
    bool has_nu = false;
    for (const auto& [k, v] : kv) has_nu = has_nu || k == "nu";
    if (has_nu) return finish(Distribution::rice(get({"nu"}, std::nullopt)));
    return finish(Distribution::rice_k_omega(get({"k"}, std::nullopt), get({"omega"}, std::nullopt)));
  }
  if (name == "weibull") return finish(Distribution::weibull(get({"k"}, 2.0), get({"omega"}, 1.0)));
  if (name == "lognormal" || name == "log-normal") {
    return finish(Distribution::lognormal(get({"mu"}, 0.0), get({"sigma"}, 0.125)));
  }
  if (name == "gengamma" || name == "generalizedgamma" || name == "generalized-gamma") {
    return finish(Distribution::generalized_gamma(get({"p"}, 2.0), get({"d"}, 2.0), get({"omega"}, 1.0)));
  }
  if (name == "kappamu" || name == "kappa-mu") {
    return finish(Distribution::kappa_mu(get({"kappa", "k"}, 1.0), get({"mu"}, 1.0), get({"omega"}, 1.0)));
  }
  if (name == "chisq" || name == "chi2" || name == "chisquared" || name == "chi-squared") {
    return finish(Distribution::chi_squared(get({"df"}, 2.0)));
  }
  if (name == "levy") {
    const double loc = get({"mu", "loc", "location"}, 0.0);
    if (loc != 0.0) throw std::invalid_argument("levy: only location 0 is supported");
    return finish(Distribution::levy(get({"c"}, 0.1)));
  }
  throw std::invalid_argument("unknown distribution '" + name + "'");
}

/// Splits "a(x=1,y=2),b(z=3)" at top-level commas and parses each entry.
inline std::vector<Distribution> parse_distribution_list(std::string_view specs) {
  std::vector<Distribution> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= specs.size(); ++i) {
    const char c = i < specs.size() ? specs[i] : ',';
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      auto item = detail::trim(specs.substr(start, i - start));
      if (!item.empty()) out.push_back(parse_distribution(item));
      start = i + 1;
    }
  }
  if (depth != 0) throw std::invalid_argument("unbalanced parentheses in '" + std::string(specs) + "'");
  if (out.empty()) throw std::invalid_argument("no distribution given");
  return out;
}

}  // namespace convtail

#endif  // CONVTAIL_DISTRIBUTIONS_HPP
