#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fisherlab/numeric.hpp"

namespace fisherlab::stats {

/// Outcomes with probability at or below this are treated as off-support.
inline constexpr double kSupportCutoff = 1e-14;

/// Central-difference step used when a model has no analytic derivative.
inline constexpr double kDerivativeStep = 1e-5;

struct Interval {
  double lo;
  double hi;

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool interior(double x) const { return x > lo && x < hi; }
  double width() const { return hi - lo; }
};

enum class ModelKind { Discrete, ContinuousGrid };

using VectorFn = std::function<std::vector<double>(double theta)>;
using PointFn = std::function<double(double theta, std::size_t outcome)>;
using ScalarFn = std::function<double(double theta)>;

/// Optional capabilities a model may provide beyond p(theta).
struct ModelHooks {
  /// Analytic derivative dp/dtheta; central differences are used otherwise.
  VectorFn dprob;
  /// Single-outcome probability, used by the likelihood for sparse data.
  PointFn prob_at;
  /// Analytic p'^2/p per outcome, finite at zeros of p.
  VectorFn score_density;
  /// ContinuousGrid only: density mass and Fisher information carried by the
  /// analytic continuation of the model beyond the grid ends.
  ScalarFn tail_mass;
  ScalarFn tail_fisher;
};

/// A one-parameter family of outcome distributions. Discrete models hold a
/// probability per labelled outcome; ContinuousGrid models hold density
/// values on a uniform grid and integrate with the trapezoid rule.
///
/// Instances are immutable after construction and safe to share between
/// threads as long as the supplied callables are.
class ParametricModel {
 public:
  static ParametricModel discrete(std::vector<std::string> labels, VectorFn prob,
                                  Interval theta_domain, ModelHooks hooks = {});
  static ParametricModel continuous(numeric::UniformGrid grid, VectorFn density,
                                    Interval theta_domain, ModelHooks hooks = {});

  ModelKind kind() const { return kind_; }
  std::size_t outcome_count() const { return weights_.size(); }
  const Interval& theta_domain() const { return domain_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::optional<numeric::UniformGrid>& grid() const { return grid_; }

  /// Quadrature weight per outcome: 1 for discrete, trapezoid weight on grids.
  const std::vector<double>& weights() const { return weights_; }

  std::vector<double> prob(double theta) const;
  double prob_at(double theta, std::size_t outcome) const;
  std::vector<double> dprob(double theta) const;
  bool has_analytic_derivative() const { return static_cast<bool>(hooks_.dprob); }

  /// p'^2/p per outcome; zero where p is off-support.
  std::vector<double> score_density(double theta) const;

  double tail_mass(double theta) const;
  double tail_fisher(double theta) const;
  bool has_analytic_tail() const { return static_cast<bool>(hooks_.tail_mass); }

  /// Same family with the analytic hooks removed, so every quantity goes
  /// through p(theta) and finite differences. Used to cross-check hooks.
  ParametricModel without_analytic_hooks() const;

 private:
  ParametricModel() = default;

  ModelKind kind_ = ModelKind::Discrete;
  std::vector<std::string> labels_;
  std::optional<numeric::UniformGrid> grid_;
  std::vector<double> weights_;
  VectorFn prob_;
  Interval domain_{0.0, 0.0};
  ModelHooks hooks_;
};

/// Deviations from the model invariants at one parameter value.
struct ModelCheck {
  double min_prob;
  double normalization_error;
  double derivative_sum;
};
ModelCheck check_model(const ParametricModel& model, double theta);

/// Outcome counts aligned with a model's outcomes.
class DataSet {
 public:
  explicit DataSet(std::vector<std::uint64_t> counts);

  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  /// Indices with a non-zero count, ascending.
  const std::vector<std::size_t>& support() const { return support_; }

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<std::size_t> support_;
  std::uint64_t total_ = 0;
};

struct Estimate {
  double theta_hat;
  double variance;
  double fisher;
  double crb;
};

/// sum_x n_x ln p_x(theta), up to the model-independent additive constant.
/// Grid models only register outcomes on the grid, so their probabilities are
/// conditioned on the grid mass first. Returns -infinity when an observed
/// outcome has zero probability.
double log_likelihood(const ParametricModel& model, const DataSet& data, double theta);

double fisher_information(const ParametricModel& model, double theta);

/// 1 / (n F(theta)).
double crb(const ParametricModel& model, double theta, std::uint64_t n);

inline constexpr std::size_t kScanPoints = 201;
inline constexpr double kMleTolerance = 1e-8;

/// Maximum-likelihood estimate: 201-point scan of the domain, then golden
/// section inside the bracket around the best scan point.
Estimate mle(const ParametricModel& model, const DataSet& data);

struct QuadraticExpansion {
  double coefficient;
  double fisher;
};

/// Curvature of theta -> sum_x p_x(theta_true) ln p_x(theta) near theta_true,
/// from a 5-point least-squares parabola on [theta_true - 0.01, theta_true + 0.01].
QuadraticExpansion quadratic_expansion_check(const ParametricModel& model,
                                             double theta_true);

// Bundled models.

/// p = (theta, 1 - theta) on [0, 1].
ParametricModel bernoulli_model();

/// Unit-variance (by default) Gaussian density on a grid, location parameter.
ParametricModel gaussian_location_model(double sigma = 1.0, double half_width = 10.0,
                                        std::size_t points = 2001,
                                        Interval theta_domain = {-2.0, 2.0});

}  // namespace fisherlab::stats
