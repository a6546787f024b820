#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fisherlab/errors.hpp"
#include "fisherlab/interferometer.hpp"
#include "fisherlab/stats.hpp"

namespace fisherlab::mc {

inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64-substreams";

std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit Mersenne Twister with a portable double conversion, so draws are
/// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for trial `index` of a run seeded with `seed`.
  static Rng substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Inverse-CDF sampler over a model's outcomes at a fixed parameter. Grid
/// models are sampled at their grid points with trapezoid weights.
class OutcomeSampler {
 public:
  OutcomeSampler(const stats::ParametricModel& model, double theta);
  explicit OutcomeSampler(const std::vector<double>& weights);

  std::size_t draw(Rng& rng) const;
  stats::DataSet sample(std::uint64_t n, Rng& rng) const;
  const std::vector<double>& cdf() const { return cdf_; }

 private:
  std::vector<double> cdf_;
};

stats::DataSet sample_outcomes(const stats::ParametricModel& model, double theta,
                               std::uint64_t n, Rng& rng);

enum class Estimator { MLE, BayesMean };
std::string to_string(Estimator e);

/// Posterior mean of theta under a flat prior on the model domain.
double bayes_mean(const stats::ParametricModel& model, const stats::DataSet& data,
                  std::size_t points = 2001);

struct TrialConfig {
  std::string model_name;
  std::shared_ptr<const stats::ParametricModel> model;
  double theta_true = 0.0;
  std::uint64_t n_particles = 1;
  std::uint64_t n_trials = 1;
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::MLE;
  /// Worker threads; 0 picks the hardware concurrency. Results do not
  /// depend on this value.
  unsigned threads = 0;
};

struct TrialReport {
  std::string model;
  double theta_true = 0.0;
  std::uint64_t n_particles = 0;
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  std::string rng = kRngAlgorithm;
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;
  double crb = 0.0;
  double efficiency = 0.0;
  std::uint64_t failures = 0;

  double failure_rate() const {
    return n_trials ? static_cast<double>(failures) / static_cast<double>(n_trials) : 0.0;
  }
  nlohmann::json to_json() const;
};

inline constexpr double kMaxFailureRate = 0.01;

/// Raised when more than 1% of trials fail to produce an estimate.
class TrialFailureRate : public Error {
 public:
  explicit TrialFailureRate(TrialReport report);
  const TrialReport& report() const { return report_; }

 private:
  TrialReport report_;
};

TrialReport run_trials(const TrialConfig& config);

struct AccumulationConfig {
  mz::HalfInteger j;  // integer: the balanced input has n1 = n2 = j
  unsigned n_repeats = 1;
  double phi_true = 0.0;
  double half_window = mz::Posterior::kDefaultHalfWindow;
  std::size_t points = mz::Posterior::kDefaultPoints;
  /// Condition on the all-zero record instead of sampling outcomes.
  bool postselect_zero = false;
};

struct AccumulationResult {
  mz::Posterior posterior;
  double variance;
  std::vector<mz::HalfInteger> outcomes;
};

/// Repeats single shots of the balanced interferometer and folds each
/// outcome into the phase posterior. `on_shot` sees the flat prior and then
/// the posterior after every shot.
AccumulationResult run_accumulation(
    const AccumulationConfig& config, Rng& rng,
    const std::function<void(const mz::Posterior&)>& on_shot = {});

}  // namespace fisherlab::mc
