#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <random>

#include "convtail/distributions.hpp"
#include "oracles.hpp"

using namespace convtail;

namespace {

struct NormCase {
  Distribution dist;
  double upper;  // integrate pdf over [0, upper]
};

std::vector<NormCase> catalog() {
  return {
      {Distribution::rayleigh(), 8.0},
      {Distribution::rayleigh(2.5), 12.0},
      {Distribution::nakagami(0.5), 10.0},
      {Distribution::nakagami(1.0), 8.0},
      {Distribution::nakagami(3.0, 2.0), 8.0},
      {Distribution::rice(1.0), 10.0},
      {Distribution::rice(3.0), 15.0},
      {Distribution::weibull(2.0), 8.0},
      {Distribution::weibull(0.8, 1.5), 200.0},
      {Distribution::lognormal(0.0, 0.125), 4.0},
      {Distribution::lognormal(1.0, 0.5), 60.0},
      {Distribution::generalized_gamma(2.0, 2.0), 8.0},
      {Distribution::generalized_gamma(1.5, 3.5, 2.0), 30.0},
      {Distribution::kappa_mu(1.0, 1.0), 10.0},
      {Distribution::kappa_mu(2.0, 2.5, 1.5), 10.0},
      {Distribution::chi_squared(2.0), 80.0},
      {Distribution::chi_squared(6.0), 100.0},
  };
}

}  // namespace

TEST(Distribution, DensitiesIntegrateToOne) {
  for (const auto& c : catalog()) {
    const double mass = oracle::integrate([&](double x) { return c.dist.pdf(x); }, 0.0, c.upper, 1e-12);
    EXPECT_GE(mass, 0.999) << c.dist.to_string();
    EXPECT_NEAR(mass, 1.0, 1e-8) << c.dist.to_string();
  }
}

TEST(Distribution, LevyMassMatchesClosedForm) {
  const auto d = Distribution::levy(0.1);
  for (double x : {0.05, 0.5, 3.0}) {
    const double mass = oracle::integrate_endpoint([&](double t) { return d.pdf(t); }, 0.0, x);
    EXPECT_LE(oracle::rel(mass, *closed_form_cdf(d, x)), 1e-10) << x;
  }
}

TEST(Distribution, ChiSquaredMassMatchesClosedForm) {
  for (double df : {2.0, 3.0, 8.0}) {
    const auto d = Distribution::chi_squared(df);
    const double mass = oracle::integrate_endpoint([&](double t) { return d.pdf(t); }, 0.0, 2.0);
    EXPECT_LE(oracle::rel(mass, boost::math::gamma_p(df / 2, 1.0)), 1e-12) << df;
  }
}

TEST(Distribution, PointValues) {
  EXPECT_EQ(Distribution::lognormal(0.0, 0.125).pdf(0.0), 0.0);
  EXPECT_NEAR(Distribution::lognormal(0.0, 0.125).pdf(1e-3), 0.0, 1e-300);
  EXPECT_DOUBLE_EQ(Distribution::chi_squared(2.0).pdf(0.0), 0.5);
  EXPECT_NEAR(Distribution::rayleigh(1.0).pdf(1.0), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(Distribution::levy(0.1).pdf(0.0), 0.0);
  EXPECT_TRUE(std::isinf(Distribution::chi_squared(1.0).pdf(0.0)));
  EXPECT_EQ(Distribution::rice(1.0).pdf(0.0), 0.0);
  // Rice nu=1: K = 1/2, Omega = 3, f(x) = x exp(-(x^2+1)/2) I_0(x)
  const double x = 0.7;
  EXPECT_LE(oracle::rel(Distribution::rice(1.0).pdf(x),
                        x * std::exp(-(x * x + 1.0) / 2.0) * oracle::bessel_i_series(0.0, x)),
            1e-14);
}

TEST(Distribution, NonNegativeOnRandomParameters) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const std::vector<Distribution> ds = {
        Distribution::rayleigh(0.1 + 5 * u(rng)),
        Distribution::nakagami(0.5 + 5 * u(rng), 0.1 + 3 * u(rng)),
        Distribution::rice(0.1 + 5 * u(rng)),
        Distribution::weibull(0.3 + 5 * u(rng), 0.1 + 3 * u(rng)),
        Distribution::lognormal(-2 + 4 * u(rng), 0.05 + 2 * u(rng)),
        Distribution::generalized_gamma(0.3 + 4 * u(rng), 0.3 + 4 * u(rng), 0.1 + 3 * u(rng)),
        Distribution::kappa_mu(0.05 + 5 * u(rng), 1.0 + 4 * u(rng), 0.1 + 3 * u(rng)),
        Distribution::chi_squared(std::floor(1 + 10 * u(rng))),
        Distribution::levy(0.01 + 2 * u(rng)),
    };
    for (const auto& d : ds) {
      for (double x : {0.0, 1e-6, 0.01 + u(rng), 10 * u(rng), 1e3 * u(rng), 1e6}) {
        const double v = d.pdf(x);
        EXPECT_GE(v, 0.0) << d.to_string() << " x=" << x;
        EXPECT_FALSE(std::isnan(v)) << d.to_string() << " x=" << x;
      }
    }
  }
}

TEST(Distribution, KappaMuWithUnitMuIsRice) {
  // mu = 1 reduces kappa-mu to Rice with K = kappa.
  const auto km = Distribution::kappa_mu(0.5, 1.0, 3.0);
  const auto rice = Distribution::rice(1.0);  // K = 0.5, Omega = 3
  for (double x : {0.1, 0.9, 2.0, 5.0}) EXPECT_LE(oracle::rel(km.pdf(x), rice.pdf(x)), 1e-13) << x;
}

TEST(Distribution, ScaleParameterIsTheMean) {
  // Weibull and generalized Gamma take Omega as E[X].
  for (const auto& d : {Distribution::generalized_gamma(2.0, 2.0, 1.0), Distribution::generalized_gamma(1.5, 3.5, 2.0),
                        Distribution::weibull(2.0, 1.0), Distribution::weibull(3.0, 0.5)}) {
    const double mean = oracle::integrate([&](double x) { return x * d.pdf(x); }, 0.0, 40.0);
    EXPECT_NEAR(mean, d.params().back().second, 1e-10) << d.to_string();
  }
}

TEST(Distribution, RejectsInvalidParameters) {
  EXPECT_THROW(Distribution::rayleigh(0.0), std::invalid_argument);
  EXPECT_THROW(Distribution::nakagami(0.3), std::invalid_argument);
  EXPECT_THROW(Distribution::lognormal(0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(Distribution::chi_squared(1.5), std::invalid_argument);
  EXPECT_THROW(Distribution::levy(0.0), std::invalid_argument);
  EXPECT_THROW(Distribution::kappa_mu(1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(Distribution::rice(-1.0), std::invalid_argument);
  EXPECT_THROW(Distribution::rayleigh().pdf(-1.0), std::domain_error);
}

TEST(BoundaryClass, Catalog) {
  EXPECT_EQ(Distribution::lognormal(0.0, 0.125).boundary_class(), BoundaryClass::all());
  EXPECT_EQ(Distribution::levy(0.1).boundary_class(), BoundaryClass::all());
  EXPECT_EQ(Distribution::rice(1.0).boundary_class().vanishing_order, 1);
  EXPECT_EQ(Distribution::rice(4.0).boundary_class().vanishing_order, 1);
  EXPECT_EQ(Distribution::rayleigh().boundary_class().vanishing_order, 1);
  EXPECT_EQ(Distribution::nakagami(1.0).boundary_class().vanishing_order, 1);
  EXPECT_EQ(Distribution::nakagami(2.0).boundary_class().vanishing_order, 3);
  EXPECT_EQ(Distribution::nakagami(3.0).boundary_class().vanishing_order, 5);
  EXPECT_EQ(Distribution::chi_squared(1.0).boundary_class().vanishing_order, 0);
  EXPECT_FALSE(Distribution::chi_squared(1.0).boundary_class().bounded);
  EXPECT_EQ(Distribution::chi_squared(2.0).boundary_class().vanishing_order, 0);
  EXPECT_EQ(Distribution::chi_squared(4.0).boundary_class().vanishing_order, 1);
  EXPECT_EQ(Distribution::chi_squared(6.0).boundary_class().vanishing_order, 2);
  EXPECT_EQ(Distribution::kappa_mu(1.0, 2.0).boundary_class().vanishing_order, 3);
  EXPECT_EQ(Distribution::generalized_gamma(2.0, 2.5).boundary_class().vanishing_order, 2);
  EXPECT_EQ(Distribution::weibull(2.0).boundary_class().vanishing_order, 1);
}

TEST(BoundaryClass, OrderZeroExactlyWhenDensityNonzeroAtOrigin) {
  for (const auto& c : catalog()) {
    const bool nonzero = c.dist.pdf(0.0) != 0.0;
    EXPECT_EQ(nonzero, c.dist.boundary_class().vanishing_order == 0) << c.dist.to_string();
  }
}

TEST(BoundaryClass, EndpointCorrectionSelection) {
  EXPECT_TRUE(Distribution::rice(1.0).boundary_class().needs_endpoint_correction());
  EXPECT_TRUE(Distribution::chi_squared(2.0).boundary_class().needs_endpoint_correction());
  EXPECT_FALSE(Distribution::nakagami(2.0).boundary_class().needs_endpoint_correction());
  EXPECT_FALSE(Distribution::lognormal(0.0, 1.0).boundary_class().needs_endpoint_correction());
}

TEST(ExactSum, LevyValues) {
  const auto d = Distribution::levy(0.1);
  EXPECT_LE(oracle::rel(*exact_sum_cdf(d, 16, 1.0), 4.2003939760220e-7), 1e-12);
  EXPECT_NEAR(*exact_sum_cdf(d, 16, 0.05) / 2.33e-113, 1.0, 0.005);
  EXPECT_EQ(exact_sum_distribution(d, 16)->param("c"), 25.6);
}

TEST(ExactSum, ChiSquaredValues) {
  const auto d = Distribution::chi_squared(1.0);
  EXPECT_LE(oracle::rel(*exact_sum_cdf(d, 16, 0.8), boost::math::gamma_p(8.0, 0.4)), 1e-13);
  EXPECT_EQ(exact_sum_distribution(d, 16)->param("df"), 16.0);
}

TEST(ExactSum, UnavailableForOtherFamilies) {
  EXPECT_FALSE(exact_sum_cdf(Distribution::rayleigh(), 4, 1.0));
  EXPECT_FALSE(exact_sum_cdf(Distribution::lognormal(0.0, 0.125), 16, 11.2));
}

TEST(ExactSum, LevyMonotoneInGamma) {
  const auto d = Distribution::levy(0.1);
  double prev = 0.0;
  for (double g = 0.01; g < 1e12; g *= 1.7) {
    const double v = *exact_sum_cdf(d, 16, g);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_GT(prev, 0.9999);
}

TEST(Parse, Examples) {
  EXPECT_EQ(parse_distribution("lognormal(mu=0,sigma=0.125)"), Distribution::lognormal(0.0, 0.125));
  EXPECT_EQ(parse_distribution("LEVY(c=0.1)"), Distribution::levy(0.1));
  EXPECT_EQ(parse_distribution("chisq(df=6)"), Distribution::chi_squared(6.0));
  EXPECT_EQ(parse_distribution("nakagami(m=2)"), Distribution::nakagami(2.0, 1.0));
  EXPECT_EQ(parse_distribution("rice(nu=1)"), Distribution::rice(1.0));
  EXPECT_EQ(parse_distribution(" Rayleigh "), Distribution::rayleigh(1.0));
  EXPECT_EQ(parse_distribution("kappamu(kappa=2, mu=1.5, omega=1)"), Distribution::kappa_mu(2.0, 1.5, 1.0));
}

TEST(Parse, RoundTripsCanonicalNames) {
  for (const auto& c : catalog()) EXPECT_EQ(parse_distribution(c.dist.to_string()), c.dist) << c.dist.to_string();
  EXPECT_EQ(Distribution::lognormal(0.0, 0.125).to_string(), "lognormal(mu=0,sigma=0.125)");
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_distribution("gauss(mu=0)"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("levy(c=0.1,q=2)"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("levy(c=abc)"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("levy(c=0.1,mu=1)"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("levy(c=0.1"), std::invalid_argument);
  EXPECT_THROW(parse_distribution_list("levy(c=0.1),(x"), std::invalid_argument);
}

TEST(Parse, Lists) {
  const auto ds = parse_distribution_list("rayleigh, nakagami(m=2,omega=1),levy(c=0.2)");
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds[1], Distribution::nakagami(2.0));
  EXPECT_EQ(ds[2], Distribution::levy(0.2));
}
