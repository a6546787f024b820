#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "fisherlab/errors.hpp"
#include "fisherlab/interferometer.hpp"
#include "fisherlab/slit.hpp"
#include "fisherlab/stats.hpp"

namespace st = fisherlab::stats;

namespace {

// Expected counts n p_x, rounded; the MLE of such data sits at theta.
st::DataSet expected_counts(const st::ParametricModel& model, double theta, double n) {
  const auto p = model.prob(theta);
  const auto& w = model.weights();
  std::vector<std::uint64_t> c(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    c[i] = static_cast<std::uint64_t>(std::llround(n * w[i] * p[i]));
  }
  return st::DataSet(c);
}

}  // namespace

TEST(Bernoulli, FisherAndCrb) {
  const auto m = st::bernoulli_model();
  EXPECT_NEAR(st::fisher_information(m, 0.5), 4.0, 1e-12);
  EXPECT_NEAR(st::fisher_information(m, 0.2), 1.0 / (0.2 * 0.8), 1e-10);
  EXPECT_NEAR(st::crb(m, 0.5, 100), 0.0025, 1e-15);
  EXPECT_DOUBLE_EQ(st::crb(m, 0.3, 200), 0.5 * st::crb(m, 0.3, 100));
}

TEST(Bernoulli, DegenerateAtBoundary) {
  const auto m = st::bernoulli_model();
  EXPECT_THROW(st::fisher_information(m, 1.0), fisherlab::DegenerateModel);
}

TEST(Bernoulli, MleIsSampleFraction) {
  const auto m = st::bernoulli_model();
  for (std::uint64_t k : {1u, 37u, 500u, 999u}) {
    const st::DataSet d({k, 1000 - k});
    EXPECT_NEAR(st::mle(m, d).theta_hat, static_cast<double>(k) / 1000.0, 1e-7) << k;
  }
}

TEST(Bernoulli, MleAtDomainEdge) {
  const auto m = st::bernoulli_model();
  const auto est = st::mle(m, st::DataSet({10, 0}));
  EXPECT_NEAR(est.theta_hat, 1.0, 1e-7);
  EXPECT_EQ(est.crb, 0.0);
}

TEST(Bernoulli, QuadraticExpansion) {
  const auto q = st::quadratic_expansion_check(st::bernoulli_model(), 0.5);
  EXPECT_NEAR(q.coefficient, q.fisher, 0.01 * q.fisher);
  EXPECT_NEAR(q.fisher, 4.0, 1e-12);
}

TEST(Gaussian, FisherIsInverseVariance) {
  EXPECT_NEAR(st::fisher_information(st::gaussian_location_model(), 0.3), 1.0, 1e-6);
  EXPECT_NEAR(st::fisher_information(st::gaussian_location_model(0.5), 0.0), 4.0, 1e-6);
}

TEST(Gaussian, FisherWithoutHooksMatches) {
  const auto m = st::gaussian_location_model().without_analytic_hooks();
  EXPECT_FALSE(m.has_analytic_derivative());
  EXPECT_NEAR(st::fisher_information(m, 0.3), 1.0, 1e-6);
}

TEST(Gaussian, SingleObservationMle) {
  const auto m = st::gaussian_location_model();
  const auto& grid = *m.grid();
  std::vector<std::uint64_t> c(grid.size(), 0);
  const std::size_t idx = 1100;  // x = 1.0
  c[idx] = 1;
  EXPECT_NEAR(st::mle(m, st::DataSet(c)).theta_hat, grid[idx], 1e-7);
}

TEST(Gaussian, QuadraticExpansion) {
  const auto q = st::quadratic_expansion_check(st::gaussian_location_model(), 0.0);
  EXPECT_NEAR(q.coefficient, 1.0, 0.01);
}

TEST(ModelInvariants, NormalizationAndDerivativeSum) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const auto bern = st::bernoulli_model();
  const auto gauss = st::gaussian_location_model();
  const auto slit = fisherlab::slit::farfield_model({}, {});
  const auto mz = fisherlab::mz::mz_model({3, 2});
  for (int i = 0; i < 10; ++i) {
    const double t = u(rng);
    for (const st::ParametricModel* m : {&bern, &gauss, &slit, &mz}) {
      const double theta = m->theta_domain().lo + t * m->theta_domain().width();
      const auto c = st::check_model(*m, theta);
      EXPECT_GE(c.min_prob, 0.0);
      EXPECT_LT(std::abs(c.normalization_error), 1e-6) << theta;
      EXPECT_LT(std::abs(c.derivative_sum), 1e-8) << theta;
    }
  }
}

TEST(ModelInvariants, AnalyticDerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const auto gauss = st::gaussian_location_model();
  const auto slit = fisherlab::slit::farfield_model({}, {});
  const auto bern = st::bernoulli_model();
  for (const st::ParametricModel* m : {&bern, &gauss, &slit}) {
    ASSERT_TRUE(m->has_analytic_derivative());
    const auto fd_model = m->without_analytic_hooks();
    for (int i = 0; i < 10; ++i) {
      const double theta = m->theta_domain().lo + u(rng) * m->theta_domain().width();
      const auto a = m->dprob(theta);
      const auto f = fd_model.dprob(theta);
      double scale = 0.0, worst = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        scale = std::max(scale, std::abs(a[k]));
        worst = std::max(worst, std::abs(a[k] - f[k]));
      }
      EXPECT_LT(worst, 1e-4 * scale) << theta;
    }
  }
}

TEST(Mle, ConsistentAtExpectedCounts) {
  const auto slit = fisherlab::slit::farfield_model({}, {});
  EXPECT_NEAR(st::mle(slit, expected_counts(slit, 0.3, 1e9)).theta_hat, 0.3, 1e-6);
  const auto gauss = st::gaussian_location_model();
  EXPECT_NEAR(st::mle(gauss, expected_counts(gauss, -0.7, 1e9)).theta_hat, -0.7, 1e-6);
  const auto mz = fisherlab::mz::mz_model({6, 4});
  EXPECT_NEAR(st::mle(mz, expected_counts(mz, 1.1, 1e12)).theta_hat, 1.1, 1e-6);
}

TEST(Mle, TiesBreakTowardSmallestTheta) {
  // p depends on theta^2 only, so +theta and -theta tie exactly.
  const auto m = st::ParametricModel::discrete(
      {"a", "b"}, [](double t) { return std::vector<double>{t * t, 1.0 - t * t}; },
      {-1.0, 1.0});
  EXPECT_NEAR(st::mle(m, st::DataSet({36, 64})).theta_hat, -0.6, 1e-7);
}

TEST(Mle, FlatLikelihoodRaises) {
  // Probabilities do not depend on theta.
  const auto m = st::ParametricModel::discrete(
      {"a", "b"}, [](double) { return std::vector<double>{0.5, 0.5}; }, {0.0, 1.0});
  EXPECT_THROW(st::mle(m, st::DataSet({3, 3})), fisherlab::FlatLikelihood);
}

TEST(Mle, ImpossibleDataRaises) {
  const auto m = st::ParametricModel::discrete(
      {"a", "b"}, [](double) { return std::vector<double>{1.0, 0.0}; }, {0.0, 1.0});
  EXPECT_THROW(st::mle(m, st::DataSet({3, 1})), fisherlab::NonFiniteLikelihood);
}

TEST(LogLikelihood, ZeroProbabilityIsMinusInfinity) {
  const auto m = st::bernoulli_model();
  EXPECT_EQ(st::log_likelihood(m, st::DataSet({0, 4}), 1.0),
            -std::numeric_limits<double>::infinity());
  EXPECT_NEAR(st::log_likelihood(m, st::DataSet({1, 3}), 0.25),
              std::log(0.25) + 3.0 * std::log(0.75), 1e-14);
}

TEST(LogLikelihood, RejectsMisalignedData) {
  EXPECT_THROW(st::log_likelihood(st::bernoulli_model(), st::DataSet({1, 1, 1}), 0.5),
               std::invalid_argument);
}

TEST(DataSet, RejectsEmpty) { EXPECT_THROW(st::DataSet({0, 0}), std::invalid_argument); }
