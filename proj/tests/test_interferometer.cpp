#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "fisherlab/errors.hpp"
#include "fisherlab/interferometer.hpp"
#include "fisherlab/special.hpp"

namespace mz = fisherlab::mz;
using mz::HalfInteger;

namespace {

constexpr double kPi = std::numbers::pi;

HalfInteger hi(int twice) { return HalfInteger::from_twice(twice); }

// exp(-i phi J2) from the Schwinger generators, via the matrix exponential.
Eigen::MatrixXcd rotation_oracle(HalfInteger j, double phi) {
  const auto rep = mz::build_rep(j);
  return (std::complex<double>(0.0, -phi) * rep.j2).exp();
}

}  // namespace

TEST(HalfInteger, ParsingAndFormatting) {
  EXPECT_EQ(HalfInteger::from_double(1.5).twice(), 3);
  EXPECT_EQ(HalfInteger::from_double(-2.0).twice(), -4);
  EXPECT_THROW(HalfInteger::from_double(0.3), std::invalid_argument);
  EXPECT_EQ(hi(3).to_string(), "3/2");
  EXPECT_EQ(hi(-1).to_string(), "-1/2");
  EXPECT_EQ(hi(4).to_string(), "2");
  EXPECT_LT(hi(1), hi(2));
}

TEST(FockInput, AngularMomentumLabels) {
  const mz::FockInput in{5, 2};
  EXPECT_EQ(in.j(), hi(7));
  EXPECT_EQ(in.m(), hi(3));
  EXPECT_EQ(in.total(), 7u);
  EXPECT_EQ(mz::basis_index(hi(7), hi(7)), 0u);
  EXPECT_EQ(mz::basis_index(hi(7), hi(-7)), 7u);
}

TEST(Representation, CommutationRelations) {
  for (int tj : {1, 2, 5, 8}) {
    const auto r = mz::build_rep(hi(tj));
    const std::complex<double> i(0.0, 1.0);
    EXPECT_LT((r.j1 * r.j2 - r.j2 * r.j1 - i * r.j3).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((r.j2 * r.j3 - r.j3 * r.j2 - i * r.j1).cwiseAbs().maxCoeff(), 1e-13);
    const double jj = 0.25 * tj * (tj + 2);
    const Eigen::MatrixXcd casimir = r.j1 * r.j1 + r.j2 * r.j2 + r.j3 * r.j3;
    const auto n = casimir.rows();
    EXPECT_LT((casimir - jj * Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Representation, SizeCap) {
  EXPECT_THROW(mz::build_rep(hi(20), 10), fisherlab::SizeLimit);
  EXPECT_THROW(mz::wigner_column(hi(5000), hi(0), 0.1), fisherlab::SizeLimit);
}

TEST(Wigner, SpinHalfClosedForm) {
  const double phi = 0.83;
  const auto d = mz::wigner_d(hi(1), phi).d;
  EXPECT_NEAR(d(0, 0), std::cos(phi / 2), 1e-15);
  EXPECT_NEAR(d(0, 1), -std::sin(phi / 2), 1e-15);
  EXPECT_NEAR(d(1, 0), std::sin(phi / 2), 1e-15);
  EXPECT_NEAR(d(1, 1), std::cos(phi / 2), 1e-15);
}

TEST(Wigner, MatchesMatrixExponential) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-7.0, 7.0);
  for (int tj = 1; tj <= 20; ++tj) {
    for (int k = 0; k < 6; ++k) {
      const double phi = u(rng);
      const Eigen::MatrixXcd ref = rotation_oracle(hi(tj), phi);
      const Eigen::MatrixXd d = mz::wigner_d(hi(tj), phi).d;
      EXPECT_LT((ref - d.cast<std::complex<double>>()).cwiseAbs().maxCoeff(), 1e-10)
          << "2j=" << tj << " phi=" << phi;
    }
  }
}

TEST(Wigner, SpecialAngles) {
  for (int tj : {3, 6, 11}) {
    const auto n = tj + 1;
    EXPECT_LT((mz::wigner_d(hi(tj), 0.0).d - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(),
              1e-15);
    const Eigen::MatrixXcd ref = rotation_oracle(hi(tj), kPi);
    EXPECT_LT((ref - mz::wigner_d(hi(tj), kPi).d.cast<std::complex<double>>()).cwiseAbs().maxCoeff(),
              1e-10);
    const Eigen::MatrixXcd ref2 = rotation_oracle(hi(tj), 2.0 * kPi);
    EXPECT_LT(
        (ref2 - mz::wigner_d(hi(tj), 2.0 * kPi).d.cast<std::complex<double>>()).cwiseAbs().maxCoeff(),
        1e-10);
  }
}

TEST(Wigner, OrthogonalForLargeJ) {
  for (int tj : {101, 400, 1000}) {
    const auto d = mz::wigner_d(hi(tj), 1.234).d;
    const auto n = d.rows();
    EXPECT_LT((d.transpose() * d - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10)
        << "2j=" << tj;
  }
}

TEST(Wigner, GroupProperty) {
  const HalfInteger j = hi(61);
  const auto a = mz::wigner_d(j, 0.7).d;
  const auto b = mz::wigner_d(j, -1.9).d;
  const auto ab = mz::wigner_d(j, 0.7 - 1.9).d;
  EXPECT_LT((a * b - ab).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Wigner, SymmetryRelations) {
  const HalfInteger j = hi(9);
  const double phi = 0.91;
  const auto d = mz::wigner_d(j, phi).d;
  const auto dm = mz::wigner_d(j, -phi).d;
  for (int r = 0; r < d.rows(); ++r) {
    for (int c = 0; c < d.cols(); ++c) {
      EXPECT_NEAR(dm(r, c), d(c, r), 1e-14);
      // d_{k,m} = (-1)^{k-m} d_{m,k}; k - m = c - r in this ordering.
      const double sign = ((c - r) % 2 == 0) ? 1.0 : -1.0;
      EXPECT_NEAR(d(r, c), sign * d(c, r), 1e-14);
    }
  }
}

TEST(Wigner, CentralElementIsLegendre) {
  // d^j_{00}(phi) = P_j(cos phi) for integer j.
  for (unsigned j : {1u, 10u, 100u}) {
    for (double phi : {0.013, 0.2, 1.1, 2.9}) {
      const auto col = mz::wigner_column(hi(2 * j), hi(0), phi);
      EXPECT_NEAR(col[j], std::legendre(j, std::cos(phi)), 1e-12) << j << " " << phi;
    }
  }
}

TEST(Wigner, InterferometerIdentity) {
  for (int tj : {1, 4, 7, 12}) {
    for (double phi : {-2.2, 0.4, 1.3}) EXPECT_LT(mz::mz_transform_check(hi(tj), phi), 1e-9);
  }
  EXPECT_THROW(mz::mz_transform_check(hi(41), 0.3), std::invalid_argument);
}

TEST(Outcomes, SingleParticleAtZero) {
  const auto d = mz::outcome_distribution({1, 0}, 0.0);
  ASSERT_EQ(d.p.size(), 2u);
  EXPECT_DOUBLE_EQ(d.p[0], 1.0);
  EXPECT_DOUBLE_EQ(d.p[1], 0.0);
}

TEST(Outcomes, EvenInPhase) {
  const auto a = mz::outcome_distribution({7, 3}, 0.6);
  const auto b = mz::outcome_distribution({7, 3}, -0.6);
  for (std::size_t i = 0; i < a.p.size(); ++i) EXPECT_NEAR(a.p[i], b.p[i], 1e-14);
}

TEST(Moments, ClosedFormMatchesDistribution) {
  for (const mz::FockInput in : {mz::FockInput{5, 0}, mz::FockInput{4, 4}, mz::FockInput{9, 2}}) {
    for (double phi : {0.0, 0.3, 1.7, -2.5}) {
      const auto d = mz::outcome_distribution(in, phi);
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t i = 0; i < d.p.size(); ++i) {
        const double k = d.j.value() - static_cast<double>(i);
        s1 += k * d.p[i];
        s2 += k * k * d.p[i];
      }
      const auto mo = mz::moments(in, phi);
      EXPECT_NEAR(mo.mean_j3, s1, 1e-12);
      EXPECT_NEAR(mo.mean_j3_sq, s2, 1e-11);
    }
  }
}

TEST(LinearizedError, StandardLimitAndUndefinedBalancedCase) {
  const auto e = mz::linearized_phase_error({16, 0}, 0.7);
  ASSERT_TRUE(e.has_value());
  EXPECT_NEAR(*e, 1.0 / 4.0, 1e-12);
  EXPECT_NEAR(*mz::linearized_phase_error({16, 0}, 0.0), 0.25, 1e-12);
  EXPECT_FALSE(mz::linearized_phase_error({8, 8}, 0.7).has_value());
}

TEST(PhaseFisher, ClosedFormMatchesFiniteDifference) {
  for (const mz::FockInput in : {mz::FockInput{1, 0}, mz::FockInput{10, 0}, mz::FockInput{6, 6},
                                 mz::FockInput{40, 13}, mz::FockInput{150, 150}}) {
    const auto f = mz::fisher_phase_at_zero(in);
    EXPECT_LT(f.relative_deviation, 1e-3);
  }
  EXPECT_DOUBLE_EQ(mz::fisher_phase_at_zero({12, 0}).closed_form, 12.0);
  EXPECT_DOUBLE_EQ(mz::fisher_phase_at_zero({6, 6}).closed_form, 2.0 * 6.0 * 7.0);
}

TEST(Posterior, FlatPrior) {
  const auto p = mz::Posterior::flat(1.2, 2001);
  EXPECT_NEAR(p.normalization(), 1.0, 1e-12);
  EXPECT_NEAR(mz::posterior_variance(p), 1.2 * 1.2 / 3.0, 1e-6);
  EXPECT_THROW(mz::Posterior::flat(4.0), std::invalid_argument);
  EXPECT_THROW(mz::Posterior::flat(0.0), std::invalid_argument);
}

TEST(Posterior, UpdateIsLikelihoodTimesPrior) {
  const mz::FockInput in{5, 5};
  auto p = mz::posterior_update(mz::Posterior::flat(), in, hi(0));
  p = mz::posterior_update(p, in, hi(2));
  EXPECT_NEAR(p.normalization(), 1.0, 1e-12);
  ASSERT_EQ(p.shots().size(), 2u);
  const auto& g = p.grid();
  const std::size_t a = 2300, b = 3100;
  const auto la = mz::outcome_distribution(in, g[a]);
  const auto lb = mz::outcome_distribution(in, g[b]);
  const double ratio = (la.prob(hi(0)) * la.prob(hi(2))) / (lb.prob(hi(0)) * lb.prob(hi(2)));
  EXPECT_NEAR(p.density()[a] / p.density()[b], ratio, 1e-10 * ratio);
}

TEST(Posterior, SingleBalancedShotFollowsBessel) {
  // For large j, P_j(cos phi) ~ J0((j + 1/2) phi) near the origin.
  const unsigned j = 100;
  const auto p = mz::posterior_update(mz::Posterior::flat(), {j, j}, hi(0));
  const auto& g = p.grid();
  double lo = 1e300, top = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g[i]) * j > 2.0) continue;
    const double b = fisherlab::special::bessel_j(0, (j + 0.5) * g[i]);
    const double r = p.density()[i] / (b * b);
    lo = std::min(lo, r);
    top = std::max(top, r);
  }
  EXPECT_LT(top / lo - 1.0, 2e-3);
}

TEST(Posterior, ContradictoryDataRaises) {
  // p_{-j} = sin^{2N}(phi/2) underflows everywhere on a tiny window.
  const auto p = mz::Posterior::flat(1e-3, 101);
  EXPECT_THROW(mz::posterior_update(p, {200, 0}, hi(-200)), fisherlab::ZeroPosterior);
}

TEST(Posterior, OutcomeMustBeWeight) {
  EXPECT_THROW(mz::posterior_update(mz::Posterior::flat(), {2, 2}, hi(1)), std::invalid_argument);
  EXPECT_THROW(mz::posterior_update(mz::Posterior::flat(), {2, 2}, hi(6)), std::invalid_argument);
}

TEST(ResourceScaling, ClosedForm) {
  EXPECT_DOUBLE_EQ(mz::resource_scaling(hi(100), 4), 1.0 / (4 * 50.0 * 50.0));
  EXPECT_DOUBLE_EQ(mz::resource_scaling(hi(100), 8), 4.0 * 8 / (800.0 * 800.0));
  EXPECT_THROW(mz::resource_scaling(hi(100), 0), std::invalid_argument);
}
