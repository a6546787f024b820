#include "fisherlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>

namespace fisherlab::mc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

OutcomeSampler::OutcomeSampler(const stats::ParametricModel& model, double theta) {
  const std::vector<double> p = model.prob(theta);
  std::vector<double> w = model.weights();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= std::max(p[i], 0.0);
  *this = OutcomeSampler(w);
}

OutcomeSampler::OutcomeSampler(const std::vector<double>& weights) {
  cdf_.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("OutcomeSampler: negative weight");
    acc += weights[i];
    cdf_[i] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("OutcomeSampler: zero total weight");
  for (double& c : cdf_) c /= acc;
}

std::size_t OutcomeSampler::draw(Rng& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;  // rounding left the last entry just below 1
  return static_cast<std::size_t>(it - cdf_.begin());
}

stats::DataSet OutcomeSampler::sample(std::uint64_t n, Rng& rng) const {
  std::vector<std::uint64_t> counts(cdf_.size(), 0);
  for (std::uint64_t i = 0; i < n; ++i) ++counts[draw(rng)];
  return stats::DataSet(std::move(counts));
}

stats::DataSet sample_outcomes(const stats::ParametricModel& model, double theta,
                               std::uint64_t n, Rng& rng) {
  return OutcomeSampler(model, theta).sample(n, rng);
}

std::string to_string(Estimator e) {
  return e == Estimator::MLE ? "mle" : "bayes_mean";
}

double bayes_mean(const stats::ParametricModel& model, const stats::DataSet& data,
                  std::size_t points) {
  const stats::Interval dom = model.theta_domain();
  const numeric::UniformGrid grid(dom.lo, dom.hi, points);
  std::vector<double> ll(points);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    ll[i] = stats::log_likelihood(model, data, grid[i]);
    peak = std::max(peak, ll[i]);
  }
  if (!std::isfinite(peak)) {
    throw NonFiniteLikelihood("bayes_mean: observed outcomes impossible across the domain");
  }
  std::vector<double> w(points), tw(points);
  for (std::size_t i = 0; i < points; ++i) {
    w[i] = std::exp(ll[i] - peak);
    tw[i] = grid[i] * w[i];
  }
  return numeric::trapezoid(tw, grid.step()) / numeric::trapezoid(w, grid.step());
}

nlohmann::json TrialReport::to_json() const {
  auto finite_or_null = [](double v) -> nlohmann::json {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  return {
      {"schema", "fisherlab.trial_report.v1"},
      {"model", model},
      {"theta_true", theta_true},
      {"n_particles", n_particles},
      {"n_trials", n_trials},
      {"seed", seed},
      {"estimator", estimator},
      {"rng", rng},
      {"empirical_mean", finite_or_null(empirical_mean)},
      {"empirical_variance", finite_or_null(empirical_variance)},
      {"crb", finite_or_null(crb)},
      {"efficiency", finite_or_null(efficiency)},
      {"failures", failures},
  };
}

TrialFailureRate::TrialFailureRate(TrialReport report)
    : Error("run_trials: " + std::to_string(report.failures) + " of " +
            std::to_string(report.n_trials) + " trials failed"),
      report_(std::move(report)) {}

TrialReport run_trials(const TrialConfig& config) {
  if (!config.model) throw std::invalid_argument("run_trials: no model");
  if (config.n_particles < 1 || config.n_trials < 1) {
    throw std::invalid_argument("run_trials: need n_particles >= 1 and n_trials >= 1");
  }
  const stats::ParametricModel& model = *config.model;
  const OutcomeSampler sampler(model, config.theta_true);

  // Trial t always uses substream t, so the schedule cannot change results.
  std::vector<std::optional<double>> estimates(config.n_trials);
  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      Rng rng = Rng::substream(config.seed, t);
      const stats::DataSet data = sampler.sample(config.n_particles, rng);
      try {
        estimates[t] = config.estimator == Estimator::MLE ? stats::mle(model, data).theta_hat
                                                          : bayes_mean(model, data);
      } catch (const Error&) {
        estimates[t].reset();
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(
      std::clamp<std::uint64_t>(threads ? threads : 1, 1, config.n_trials));
  if (threads == 1) {
    run_range(0, config.n_trials);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (config.n_trials + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(config.n_trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
  }

  TrialReport report;
  report.model = config.model_name;
  report.theta_true = config.theta_true;
  report.n_particles = config.n_particles;
  report.n_trials = config.n_trials;
  report.seed = config.seed;
  report.estimator = to_string(config.estimator);

  // Reduce in trial order.
  double sum = 0.0;
  std::uint64_t ok = 0;
  for (const auto& e : estimates) {
    if (e) {
      sum += *e;
      ++ok;
    }
  }
  report.failures = config.n_trials - ok;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.empirical_mean = ok ? sum / static_cast<double>(ok) : nan;
  double ss = 0.0;
  for (const auto& e : estimates) {
    if (e) ss += (*e - report.empirical_mean) * (*e - report.empirical_mean);
  }
  report.empirical_variance = ok > 1 ? ss / static_cast<double>(ok - 1) : nan;
  report.crb = stats::crb(model, config.theta_true, config.n_particles);
  report.efficiency = report.crb / report.empirical_variance;

  if (report.failure_rate() > kMaxFailureRate) throw TrialFailureRate(report);
  return report;
}

AccumulationResult run_accumulation(const AccumulationConfig& config, Rng& rng,
                                    const std::function<void(const mz::Posterior&)>& on_shot) {
  if (config.j.twice() < 2 || config.j.twice() % 2 != 0) {
    throw std::invalid_argument("run_accumulation: j must be a positive integer (n1 = n2 = j)");
  }
  const auto half = static_cast<unsigned>(config.j.twice() / 2);
  const mz::FockInput input{half, half};
  const mz::HalfInteger zero = mz::HalfInteger::from_twice(0);

  std::optional<OutcomeSampler> sampler;
  if (!config.postselect_zero) {
    sampler.emplace(mz::outcome_distribution(input, config.phi_true).p);
  }

  AccumulationResult result{mz::Posterior::flat(config.half_window, config.points), 0.0, {}};
  if (on_shot) on_shot(result.posterior);
  for (unsigned shot = 0; shot < config.n_repeats; ++shot) {
    mz::HalfInteger outcome = zero;
    if (sampler) {
      const std::size_t idx = sampler->draw(rng);
      outcome = mz::HalfInteger::from_twice(config.j.twice() - 2 * static_cast<int>(idx));
    }
    result.posterior = mz::posterior_update(result.posterior, input, outcome);
    result.outcomes.push_back(outcome);
    if (on_shot) on_shot(result.posterior);
  }
  result.variance = mz::posterior_variance(result.posterior);
  return result;
}

}  // namespace fisherlab::mc
