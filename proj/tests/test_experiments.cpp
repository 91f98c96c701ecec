#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "convtail/experiments.hpp"
#include "oracles.hpp"

using namespace convtail;
using namespace convtail::experiments;

namespace {

std::vector<ConvergenceRow> synthetic(double order, double noise = 0.0, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-noise, noise);
  std::vector<ConvergenceRow> rows;
  for (std::size_t n = 128; n <= 65536; n *= 2) {
    rows.push_back({n, 0.0, 3.0 * std::pow(static_cast<double>(n), -order) * (1.0 + u(rng)), NewtonCotesRule::boole()});
  }
  return rows;
}

}  // namespace

TEST(FitOrder, ExactPowerLaws) {
  EXPECT_NEAR(fit_convergence_order(synthetic(2.0)), 2.0, 1e-12);
  EXPECT_NEAR(fit_convergence_order(synthetic(4.0)), 4.0, 1e-9);
}

TEST(FitOrder, TwoPointFallback) {
  const std::vector<ConvergenceRow> rows = {{100, 0, 1.6e-3, {}}, {400, 0, 1e-4, {}}};
  EXPECT_NEAR(fit_convergence_order(rows), 2.0, 1e-12);
}

TEST(FitOrder, NoisyData) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const double s = fit_convergence_order(synthetic(4.0, 0.05, seed));
    EXPECT_GE(s, 3.8);
    EXPECT_LE(s, 4.2);
  }
}

TEST(FitOrder, Errors) {
  EXPECT_THROW(fit_convergence_order({{128, 0, 1e-3, {}}}), std::invalid_argument);
  EXPECT_THROW(fit_convergence_order({{128, 0, 1e-3, {}}, {256, 0, 0.0, {}}}), std::invalid_argument);
  EXPECT_THROW(fit_convergence_order({{128, 0, 1e-3, {}}, {128, 0, 1e-4, {}}}), std::invalid_argument);
}

TEST(ConvergenceStudy, NakagamiThreeIsSixthOrder) {
  ConvergenceStudyConfig cfg;
  cfg.base.factors = {{Distribution::nakagami(3.0), 16}};
  cfg.base.gamma = 0.8;
  cfg.n_max = 1 << 14;
  cfg.n_start = 1 << 7;
  cfg.rules = {NewtonCotesRule::boole()};
  const auto study = run_convergence_study(cfg);
  ASSERT_TRUE(study.slopes.count(RuleKind::Boole));
  EXPECT_NEAR(study.slopes.at(RuleKind::Boole), 6.0, 0.5);
  EXPECT_EQ(study.reference_n, 1u << 14);
  // rows strictly increase in N for a single rule, and the sweep halts
  for (std::size_t i = 1; i < study.rows.size(); ++i) EXPECT_GT(study.rows[i].n_intervals, study.rows[i - 1].n_intervals);
  EXPECT_LE(study.rows.back().n_intervals, cfg.n_max / 2);
}

TEST(ConvergenceStudy, HaltsOnceBelowEpsilon) {
  ConvergenceStudyConfig cfg;
  cfg.base.factors = {{Distribution::levy(0.1), 16}};
  cfg.base.gamma = 1.0;
  cfg.n_max = 1 << 14;
  cfg.epsilon = 1e-6;
  cfg.rules = {NewtonCotesRule::boole()};
  const auto study = run_convergence_study(cfg);
  EXPECT_LT(study.rows.back().relative_error, 1e-6);
  EXPECT_LT(study.rows.back().n_intervals, cfg.n_max / 2);
  for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) EXPECT_GE(study.rows[i].relative_error, 1e-6);
}

TEST(ConvergenceStudy, LevyExactAndPseudoReferenceAgree) {
  ConvergenceStudyConfig cfg;
  cfg.base.factors = {{Distribution::levy(0.1), 16}};
  cfg.base.gamma = 0.8;
  cfg.n_max = 1 << 14;
  cfg.epsilon = 1e-12;
  cfg.rules = {NewtonCotesRule::trapezoid()};
  const auto pseudo = run_convergence_study(cfg);
  cfg.prefer_exact_reference = true;
  const auto exact = run_convergence_study(cfg);
  EXPECT_TRUE(exact.exact_reference);
  EXPECT_FALSE(pseudo.exact_reference);
  const double ref_err = oracle::rel(pseudo.reference_alpha, exact.reference_alpha);
  ASSERT_EQ(pseudo.rows.size(), exact.rows.size());
  for (std::size_t i = 0; i < pseudo.rows.size(); ++i) {
    if (exact.rows[i].relative_error > 10 * ref_err) {
      const double ratio = pseudo.rows[i].relative_error / exact.rows[i].relative_error;
      EXPECT_GE(ratio, 0.5);
      EXPECT_LE(ratio, 2.0);
    }
  }
}

TEST(ConvergenceStudy, Errors) {
  ConvergenceStudyConfig cfg;
  cfg.base.factors = {{Distribution::rayleigh(), 4}};
  cfg.base.gamma = 1.0;
  cfg.n_start = 100;
  cfg.n_max = 150;
  EXPECT_THROW(run_convergence_study(cfg), std::invalid_argument);
  cfg.n_start = 130;  // not a multiple of 4
  cfg.n_max = 1 << 12;
  EXPECT_THROW(run_convergence_study(cfg), std::invalid_argument);
  cfg.n_start = 128;
  cfg.rules.clear();
  EXPECT_THROW(run_convergence_study(cfg), std::invalid_argument);
}

TEST(ConvergenceStudy, CsvFormat) {
  ConvergenceStudy s;
  s.rows = {{128, 1.5e-7, 2.25e-3, NewtonCotesRule::simpson()}};
  std::ostringstream os;
  write_convergence_csv(os, s);
  EXPECT_EQ(os.str(), "rule,n_intervals,alpha_hat,relative_error\nsimpson,128,1.500000000e-07,2.250000000e-03\n");
}

TEST(PrecisionComparison, LevyRows) {
  EstimatorConfig base;
  base.factors = {{Distribution::levy(0.1), 16}};
  const auto rows = run_precision_comparison(base, {0.2, 1.0, 3.2}, 4096);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LE(rows[0].delta_direct64, 1e-8);
  EXPECT_GT(rows[0].delta_fft32emu, 1e3);
  EXPECT_LE(rows[1].delta_fft64, 1e-6);
  // alpha = 4.7e-3: little to cancel, the three backends agree
  EXPECT_LE(rows[2].delta_direct64, 1e-9);
  EXPECT_LE(rows[2].delta_fft64, 1e-9);
  EXPECT_LE(rows[2].delta_fft32emu, 1e-3);
  std::ostringstream os;
  write_precision_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "gamma,alpha_ref,delta_direct64,delta_fft64,delta_fft32emu");
}

TEST(PrecisionComparison, PseudoReferenceWhenNoExactLaw) {
  EstimatorConfig base;
  base.factors = {{Distribution::nakagami(2.0), 4}};
  const auto rows = run_precision_comparison(base, {0.5}, 256, 1024);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GT(rows[0].alpha_ref, 0.0);
  EXPECT_LE(rows[0].delta_direct64, 1e-6);
}

TEST(CostBenchmark, RowsAndValidation) {
  BenchConfig cfg;
  cfg.sizes = {256, 512};
  cfg.repetitions = 3;
  const auto rows = run_cost_benchmark(cfg);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) EXPECT_GT(r.seconds, 0.0);
  EXPECT_EQ(rows[2].backend.kind, ConvKind::Fft);
  cfg.sizes = {512, 256};
  EXPECT_THROW(run_cost_benchmark(cfg), std::invalid_argument);
}

TEST(MonteCarlo, ChiSquaredSum) {
  const auto e = mc_oracle({{Distribution::chi_squared(1.0), 16}}, 8.0, 200000, 7);
  const double exact = boost::math::gamma_p(8.0, 4.0);
  EXPECT_LE(std::abs(e.alpha_hat - exact), 4 * e.std_error);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(e.alpha_hat * (1 - e.alpha_hat) / 200000));
  EXPECT_EQ(e.samples, 200000u);
  EXPECT_EQ(e.seed, 7u);
}

TEST(MonteCarlo, DeterministicGivenSeed) {
  const std::vector<Factor> f = {{Distribution::lognormal(0.0, 0.5), 4}};
  EXPECT_EQ(mc_oracle(f, 4.0, 5000, 3).alpha_hat, mc_oracle(f, 4.0, 5000, 3).alpha_hat);
  EXPECT_NE(mc_oracle(f, 4.0, 5000, 3).alpha_hat, mc_oracle(f, 4.0, 5000, 4).alpha_hat);
}

TEST(MonteCarlo, LevySamplerMatchesCdf) {
  const auto e = mc_oracle({{Distribution::levy(0.5), 1}}, 2.0, 100000, 11);
  EXPECT_LE(std::abs(e.alpha_hat - *closed_form_cdf(Distribution::levy(0.5), 2.0)), 4 * e.std_error);
}

TEST(MonteCarlo, Extremes) {
  EXPECT_EQ(mc_oracle({{Distribution::chi_squared(1.0), 16}}, 1e6, 1000, 1).alpha_hat, 1.0);
  EXPECT_LE(mc_oracle({{Distribution::levy(0.1), 16}}, 1.0, 1000000, 5).alpha_hat, 10.0 / 1e6);
}

TEST(MonteCarlo, Errors) {
  EXPECT_THROW(mc_oracle({{Distribution::rayleigh(), 2}}, 1.0, 1000, 1), std::invalid_argument);
  EXPECT_THROW(mc_oracle({{Distribution::levy(0.1), 2}}, 1.0, 999, 1), std::invalid_argument);
}
