#pragma once

#include <compare>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fisherlab/numeric.hpp"
#include "fisherlab/stats.hpp"

namespace fisherlab::mz {

/// Integer or half-integer stored as twice its value.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;
  static constexpr HalfInteger from_twice(int twice) {
    HalfInteger h;
    h.twice_ = twice;
    return h;
  }
  /// Throws std::invalid_argument unless 2v is an integer.
  static HalfInteger from_double(double v);

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  std::string to_string() const;

  constexpr auto operator<=>(const HalfInteger&) const = default;

 private:
  int twice_ = 0;
};

/// Largest representation dimension 2j+1 accepted by default.
inline constexpr std::size_t kDefaultSizeCap = 4097;

/// Particle numbers at the two input ports; the input state is |j, m> with
/// j = (n1 + n2)/2 and m = (n1 - n2)/2.
struct FockInput {
  unsigned n1 = 0;
  unsigned n2 = 0;

  HalfInteger j() const { return HalfInteger::from_twice(static_cast<int>(n1 + n2)); }
  HalfInteger m() const {
    return HalfInteger::from_twice(static_cast<int>(n1) - static_cast<int>(n2));
  }
  unsigned total() const { return n1 + n2; }
};

/// Index of |j, k> in the basis ordered k = j, j-1, ..., -j.
inline std::size_t basis_index(HalfInteger j, HalfInteger k) {
  return static_cast<std::size_t>((j.twice() - k.twice()) / 2);
}

/// Fixed-N block of the Schwinger operators J1, J2, J3.
struct AngularMomentumRep {
  HalfInteger j;
  Eigen::MatrixXcd j1;
  Eigen::MatrixXcd j2;
  Eigen::MatrixXcd j3;
};

AngularMomentumRep build_rep(HalfInteger j, std::size_t size_cap = kDefaultSizeCap);

/// d^j_{k,m}(phi) = <j,k| exp(-i phi J2) |j,m>, rows k and columns m ordered
/// from +j down to -j.
struct WignerRotation {
  HalfInteger j;
  double phi = 0.0;
  Eigen::MatrixXd d;
};

WignerRotation wigner_d(HalfInteger j, double phi, std::size_t size_cap = kDefaultSizeCap);

/// Column m of the Wigner rotation, i.e. exp(-i phi J2)|j,m> in the |j,k> basis.
/// O(j) work; safe to call concurrently.
std::vector<double> wigner_column(HalfInteger j, HalfInteger m, double phi,
                                  std::size_t size_cap = kDefaultSizeCap);

/// Largest elementwise deviation in the two interferometer identities
///   exp(i pi/2 J1) exp(-i phi J3) exp(-i pi/2 J1) = exp(-i phi J2)
///   U^dagger J3 U = -sin(phi) J1 + cos(phi) J3
/// with the beam splitters from a matrix exponential and U from wigner_d.
/// Intended for j <= 20.
double mz_transform_check(HalfInteger j, double phi);

struct OutcomeDistribution {
  HalfInteger j;
  HalfInteger m;
  double phi = 0.0;
  std::vector<double> p;  // ordered k = j .. -j

  double prob(HalfInteger k) const { return p.at(basis_index(j, k)); }
};

OutcomeDistribution outcome_distribution(const FockInput& input, double phi,
                                         std::size_t size_cap = kDefaultSizeCap);

struct Moments {
  double mean_j3;
  double mean_j3_sq;

  double variance() const { return mean_j3_sq - mean_j3 * mean_j3; }
};

/// Closed-form <J3> and <J3^2> of the output state.
Moments moments(const FockInput& input, double phi);

/// Delta J3 / |d<J3>/d phi|. Empty when m = 0, where the linearized error is
/// 0/0. For m != 0 the ratio does not depend on phi, so the value at
/// sin(phi) = 0 is the limit.
std::optional<double> linearized_phase_error(const FockInput& input, double phi);

struct PhaseFisher {
  double closed_form;         // 2 [j(j+1) - m^2]
  double finite_difference;   // -2 p_m''(0), step kPhaseFisherStep
  double relative_deviation;
};
inline constexpr double kPhaseFisherStep = 1e-4;

/// Fisher information at the working point phi = 0.
PhaseFisher fisher_phase_at_zero(const FockInput& input);

/// Outcome statistics as a parametric model in phi. The outcome law is even
/// in phi for every input, so the default domain is [0, pi].
stats::ParametricModel mz_model(const FockInput& input,
                                stats::Interval domain = {0.0, std::numbers::pi});

/// Grid posterior over the phase under a flat prior.
class Posterior {
 public:
  static constexpr double kDefaultHalfWindow = std::numbers::pi / 2.0;
  static constexpr std::size_t kDefaultPoints = 4001;

  static Posterior flat(double half_window = kDefaultHalfWindow,
                        std::size_t points = kDefaultPoints);

  const numeric::UniformGrid& grid() const { return grid_; }
  const std::vector<double>& density() const { return density_; }
  const std::vector<HalfInteger>& shots() const { return shots_; }

  double normalization() const;
  double mean() const;

 private:
  Posterior(numeric::UniformGrid grid, std::vector<double> density)
      : grid_(grid), density_(std::move(density)) {}

  friend Posterior posterior_update(const Posterior&, const FockInput&, HalfInteger);

  numeric::UniformGrid grid_;
  std::vector<double> density_;
  std::vector<HalfInteger> shots_;
};

/// Multiplies by p_k(phi) at every grid point and renormalizes.
Posterior posterior_update(const Posterior& posterior, const FockInput& input,
                           HalfInteger outcome);

double posterior_variance(const Posterior& posterior);

/// Predicted phase variance 4 n / N_tot^2 for n repeated shots of the
/// balanced input with N = 2j particles each (N_tot = N n).
double resource_scaling(HalfInteger j, unsigned n_repeats);

}  // namespace fisherlab::mz
