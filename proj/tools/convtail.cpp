// convtail: command-line front end for the left-tail estimator and its studies.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "convtail/convtail.hpp"

namespace {

using namespace convtail;
using experiments::sci;
using json = nlohmann::ordered_json;

struct SumOptions {
  std::string dist;
  std::vector<std::size_t> counts;
  double gamma = 1.0;
  std::string backend = "direct";
  std::string precision = "64";
  std::string endpoint = "auto";

  void add_to(CLI::App* app, bool with_backend = true) {
    app->add_option("--dist", dist, "distribution spec(s), e.g. levy(c=0.1) or rayleigh,nakagami(m=2)")->required();
    app->add_option("--counts", counts, "multiplicity per distribution (default 1 each)")->delimiter(',');
    app->add_option("--gamma", gamma, "threshold gamma")->required();
    if (with_backend) {
      app->add_option("--backend", backend, "direct or fft")->check(CLI::IsMember({"direct", "fft"}));
      app->add_option("--precision", precision, "64 or 32emu")->check(CLI::IsMember({"64", "32emu"}));
      app->add_option("--endpoint", endpoint, "endpoint-corrected convolution")
          ->check(CLI::IsMember({"auto", "on", "off"}));
    }
  }

  std::vector<Factor> factors() const {
    const auto dists = parse_distribution_list(dist);
    std::vector<std::size_t> c = counts;
    if (c.empty()) c.assign(dists.size(), 1);
    if (c.size() != dists.size()) {
      throw std::invalid_argument("--counts has " + std::to_string(c.size()) + " entries for " +
                                  std::to_string(dists.size()) + " distributions");
    }
    std::vector<Factor> out;
    for (std::size_t i = 0; i < dists.size(); ++i) out.push_back({dists[i], c[i]});
    return out;
  }

  EstimatorConfig config() const {
    EstimatorConfig cfg;
    cfg.factors = factors();
    cfg.gamma = gamma;
    cfg.backend = {parse_conv_kind(backend), parse_precision(precision)};
    if (endpoint != "auto") cfg.endpoint_override = endpoint == "on";
    return cfg;
  }
};

std::string factors_string(const std::vector<Factor>& factors) {
  std::string s;
  for (const auto& f : factors) {
    if (!s.empty()) s += ' ';
    s += std::to_string(f.count) + "x" + f.dist.to_string();
  }
  return s;
}

// Rounds N up to the rule's divisibility; returns the adjusted value if it changed.
std::optional<std::size_t> admissible_n(const NewtonCotesRule& rule, std::size_t& n) {
  if (rule.admits(n)) return std::nullopt;
  n = rule.round_up(n);
  std::fprintf(stderr, "note: N rounded up to %zu for the %s rule\n", n, std::string(rule.name()).c_str());
  return n;
}

std::string csv_field(const std::string& s) { return '"' + s + '"'; }

int run_estimate(const SumOptions& sum, std::size_t n, const std::string& rule_name, const std::string& format) {
  EstimatorConfig cfg = sum.config();
  cfg.rule = NewtonCotesRule::parse(rule_name);
  const auto adjusted = admissible_n(cfg.rule, n);
  cfg.n_intervals = n;
  EstimateReport r = tail_probability(cfg);
  r.adjusted_n = adjusted;

  if (format == "json") {
    json j;
    j["factors"] = factors_string(cfg.factors);
    j["total_count"] = r.total_count;
    j["gamma"] = cfg.gamma;
    j["n_intervals"] = r.grid.n_intervals();
    j["adjusted_n"] = r.adjusted_n ? json(*r.adjusted_n) : json(nullptr);
    j["rule"] = r.rule.name();
    j["backend"] = to_string(r.backend.kind);
    j["precision"] = to_string(r.backend.precision);
    j["endpoint"] = r.endpoint;
    j["alpha_hat"] = r.alpha_hat;
    j["density_at_gamma"] = r.density_at_gamma;
    j["reference_alpha"] = r.reference_alpha ? json(*r.reference_alpha) : json(nullptr);
    j["relative_error"] = r.relative_error ? json(*r.relative_error) : json(nullptr);
    j["seconds"] = r.seconds;
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << "factors,gamma,n_intervals,adjusted,rule,backend,precision,endpoint,alpha_hat,density_at_gamma,"
               "reference_alpha,relative_error\n";
  std::cout << csv_field(factors_string(cfg.factors)) << ',' << sci(cfg.gamma) << ',' << r.grid.n_intervals() << ','
            << (r.adjusted_n ? 1 : 0) << ',' << r.rule.name() << ',' << to_string(r.backend.kind) << ','
            << to_string(r.backend.precision) << ',' << (r.endpoint ? "on" : "off") << ',' << sci(r.alpha_hat) << ','
            << sci(r.density_at_gamma) << ',' << (r.reference_alpha ? sci(*r.reference_alpha) : "") << ','
            << (r.relative_error ? sci(*r.relative_error) : "") << '\n';
  return 0;
}

int run_converge(const SumOptions& sum, std::size_t n_max, std::size_t n_start, double eps,
                 const std::vector<std::string>& rules, bool exact, const std::string& format) {
  experiments::ConvergenceStudyConfig cfg;
  cfg.base = sum.config();
  cfg.n_max = n_max;
  cfg.n_start = n_start;
  cfg.epsilon = eps;
  cfg.prefer_exact_reference = exact;
  cfg.rules.clear();
  for (const auto& r : rules) cfg.rules.push_back(NewtonCotesRule::parse(r));
  const auto study = experiments::run_convergence_study(cfg);

  if (format == "json") {
    json j;
    j["reference_alpha"] = study.reference_alpha;
    j["exact_reference"] = study.exact_reference;
    j["reference_n"] = study.reference_n;
    j["rows"] = json::array();
    for (const auto& r : study.rows) {
      j["rows"].push_back({{"rule", r.rule.name()},
                           {"n_intervals", r.n_intervals},
                           {"alpha_hat", r.alpha_hat},
                           {"relative_error", r.relative_error}});
    }
    j["slopes"] = json::object();
    for (const auto& rule : cfg.rules) {
      auto it = study.slopes.find(rule.kind);
      j["slopes"][std::string(rule.name())] = it == study.slopes.end() ? json(nullptr) : json(it->second);
    }
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  experiments::write_convergence_csv(std::cout, study);
  for (const auto& rule : cfg.rules) {
    auto it = study.slopes.find(rule.kind);
    if (it == study.slopes.end()) {
      std::fprintf(stderr, "slope %s: not enough rows above the rounding plateau\n", std::string(rule.name()).c_str());
    } else {
      std::fprintf(stderr, "slope %s: %.3f\n", std::string(rule.name()).c_str(), it->second);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Left-tail probabilities of sums of non-negative random variables by grid convolution"};
  app.require_subcommand(1);

  // estimate
  SumOptions est;
  std::size_t est_n = 1024;
  std::string est_rule = "boole", est_format = "csv";
  auto* estimate = app.add_subcommand("estimate", "estimate alpha = P(sum < gamma)");
  est.add_to(estimate);
  estimate->add_option("--n", est_n, "grid intervals N (rounded up to the rule's multiple)");
  estimate->add_option("--rule", est_rule, "trapezoid, simpson or boole");
  estimate->add_option("--format", est_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // converge
  SumOptions conv;
  std::size_t conv_nmax = std::size_t{1} << 18, conv_nstart = std::size_t{1} << 7;
  double conv_eps = 1e-8;
  std::vector<std::string> conv_rules = {"trapezoid", "simpson", "boole"};
  bool conv_exact = false;
  std::string conv_format = "csv";
  auto* converge = app.add_subcommand("converge", "convergence study against a pseudo-reference");
  conv.add_to(converge);
  converge->add_option("--nmax", conv_nmax, "pseudo-reference grid size N_M");
  converge->add_option("--nstart", conv_nstart, "first grid size");
  converge->add_option("--eps", conv_eps, "stop once every rule is below this relative error");
  converge->add_option("--rules", conv_rules, "comma-separated rules")->delimiter(',');
  converge->add_flag("--exact", conv_exact, "use the exact law as reference when one exists");
  converge->add_option("--format", conv_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // precision
  SumOptions prec;
  prec.dist = "levy(c=0.1)";
  prec.counts = {16};
  std::vector<double> prec_gammas = {0.05, 0.1, 0.2, 0.5, 1.0};
  std::size_t prec_n = std::size_t{1} << 16, prec_ref_n = std::size_t{1} << 18;
  auto* precision = app.add_subcommand("precision", "relative error of direct/64, fft/64 and fft/32emu per gamma");
  precision->add_option("--dist", prec.dist, "distribution spec(s)");
  precision->add_option("--counts", prec.counts, "multiplicity per distribution")->delimiter(',');
  precision->add_option("--gammas", prec_gammas, "comma-separated thresholds")->delimiter(',');
  precision->add_option("--n", prec_n, "grid intervals N");
  precision->add_option("--ref-n", prec_ref_n, "pseudo-reference N when no exact law exists");

  // bench
  std::vector<std::size_t> bench_sizes = {std::size_t{1} << 13, std::size_t{1} << 14, std::size_t{1} << 15};
  std::size_t bench_count = 16, bench_reps = 5;
  std::vector<std::string> bench_backends = {"direct", "fft"};
  std::string bench_dist = "lognormal(mu=0,sigma=0.125)";
  double bench_gamma = 16.0;
  auto* bench = app.add_subcommand("bench", "wall time of a full estimate per backend and N");
  bench->add_option("--sizes", bench_sizes, "comma-separated increasing N")->delimiter(',');
  bench->add_option("--count", bench_count, "number of summands n");
  bench->add_option("--backends", bench_backends, "comma-separated: direct, fft, direct:32emu, fft:32emu")
      ->delimiter(',');
  bench->add_option("--dist", bench_dist, "summand distribution");
  bench->add_option("--gamma", bench_gamma, "threshold gamma");
  bench->add_option("--reps", bench_reps, "timed repetitions (median reported)");

  // mc
  SumOptions mc;
  std::uint64_t mc_samples = 1000000, mc_seed = 1;
  auto* mcc = app.add_subcommand("mc", "naive Monte Carlo estimate of alpha");
  mc.add_to(mcc, false);
  mcc->add_option("--samples", mc_samples, "number of sampled sums");
  mcc->add_option("--seed", mc_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*estimate) return run_estimate(est, est_n, est_rule, est_format);
    if (*converge) return run_converge(conv, conv_nmax, conv_nstart, conv_eps, conv_rules, conv_exact, conv_format);
    if (*precision) {
      EstimatorConfig base;
      base.factors = prec.factors();
      experiments::write_precision_csv(std::cout,
                                       experiments::run_precision_comparison(base, prec_gammas, prec_n, prec_ref_n));
      return 0;
    }
    if (*bench) {
      experiments::BenchConfig cfg;
      cfg.sizes = bench_sizes;
      cfg.count = bench_count;
      cfg.repetitions = bench_reps;
      cfg.dist = parse_distribution(bench_dist);
      cfg.gamma = bench_gamma;
      cfg.backends.clear();
      for (const auto& b : bench_backends) {
        const auto colon = b.find(':');
        ConvBackend be{parse_conv_kind(b.substr(0, colon)), PrecisionMode::Native64};
        if (colon != std::string::npos) be.precision = parse_precision(b.substr(colon + 1));
        cfg.backends.push_back(be);
      }
      experiments::write_bench_csv(std::cout, experiments::run_cost_benchmark(cfg));
      return 0;
    }
    if (*mcc) {
      const auto factors = mc.factors();
      const auto e = experiments::mc_oracle(factors, mc.gamma, mc_samples, mc_seed);
      std::cout << "alpha_hat,std_error,samples,seed\n"
                << sci(e.alpha_hat) << ',' << sci(e.std_error) << ',' << e.samples << ',' << e.seed << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
