#include "fisherlab/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fisherlab/errors.hpp"

namespace fisherlab::stats {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_in_domain(const ParametricModel& model, double theta, const char* what) {
  if (!model.theta_domain().contains(theta)) {
    throw std::invalid_argument(std::string(what) + ": theta outside the model domain");
  }
}

}  // namespace

ParametricModel ParametricModel::discrete(std::vector<std::string> labels, VectorFn prob,
                                          Interval theta_domain, ModelHooks hooks) {
  if (labels.empty()) throw std::invalid_argument("discrete model needs outcomes");
  if (!prob) throw std::invalid_argument("discrete model needs a probability function");
  if (!(theta_domain.hi > theta_domain.lo)) {
    throw std::invalid_argument("theta domain must have positive width");
  }
  ParametricModel m;
  m.kind_ = ModelKind::Discrete;
  m.weights_.assign(labels.size(), 1.0);
  m.labels_ = std::move(labels);
  m.prob_ = std::move(prob);
  m.domain_ = theta_domain;
  m.hooks_ = std::move(hooks);
  return m;
}

ParametricModel ParametricModel::continuous(numeric::UniformGrid grid, VectorFn density,
                                            Interval theta_domain, ModelHooks hooks) {
  if (!density) throw std::invalid_argument("grid model needs a density function");
  if (!(theta_domain.hi > theta_domain.lo)) {
    throw std::invalid_argument("theta domain must have positive width");
  }
  ParametricModel m;
  m.kind_ = ModelKind::ContinuousGrid;
  m.weights_ = grid.trapezoid_weights();
  m.grid_ = grid;
  m.prob_ = std::move(density);
  m.domain_ = theta_domain;
  m.hooks_ = std::move(hooks);
  return m;
}

std::vector<double> ParametricModel::prob(double theta) const {
  std::vector<double> p = prob_(theta);
  if (p.size() != outcome_count()) {
    throw std::logic_error("model probability vector has the wrong length");
  }
  return p;
}

double ParametricModel::prob_at(double theta, std::size_t outcome) const {
  if (hooks_.prob_at) return hooks_.prob_at(theta, outcome);
  return prob(theta).at(outcome);
}

std::vector<double> ParametricModel::dprob(double theta) const {
  if (hooks_.dprob) return hooks_.dprob(theta);
  // Central difference, falling back to one-sided at the domain edges.
  double lo = theta - kDerivativeStep;
  double hi = theta + kDerivativeStep;
  if (lo < domain_.lo) lo = theta;
  if (hi > domain_.hi) hi = theta;
  const std::vector<double> p_lo = prob(lo);
  const std::vector<double> p_hi = prob(hi);
  std::vector<double> d(p_lo.size());
  const double inv = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (p_hi[i] - p_lo[i]) * inv;
  return d;
}

std::vector<double> ParametricModel::score_density(double theta) const {
  if (hooks_.score_density) return hooks_.score_density(theta);
  const std::vector<double> p = prob(theta);
  const std::vector<double> dp = dprob(theta);
  std::vector<double> s(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > kSupportCutoff) s[i] = dp[i] * dp[i] / p[i];
  }
  return s;
}

double ParametricModel::tail_mass(double theta) const {
  return hooks_.tail_mass ? hooks_.tail_mass(theta) : 0.0;
}

double ParametricModel::tail_fisher(double theta) const {
  return hooks_.tail_fisher ? hooks_.tail_fisher(theta) : 0.0;
}

ParametricModel ParametricModel::without_analytic_hooks() const {
  ParametricModel m = *this;
  m.hooks_.dprob = nullptr;
  m.hooks_.score_density = nullptr;
  return m;
}

ModelCheck check_model(const ParametricModel& model, double theta) {
  const std::vector<double> p = model.prob(theta);
  const std::vector<double> dp = model.dprob(theta);
  const std::vector<double>& w = model.weights();
  ModelCheck c{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  double mass = model.tail_mass(theta);
  double dmass = (model.tail_mass(theta + kDerivativeStep) -
                  model.tail_mass(theta - kDerivativeStep)) /
                 (2.0 * kDerivativeStep);
  for (std::size_t i = 0; i < p.size(); ++i) {
    c.min_prob = std::min(c.min_prob, p[i]);
    mass += w[i] * p[i];
    dmass += w[i] * dp[i];
  }
  c.normalization_error = mass - 1.0;
  c.derivative_sum = dmass;
  return c;
}

DataSet::DataSet(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] > 0) {
      support_.push_back(i);
      total_ += counts_[i];
    }
  }
  if (total_ == 0) throw std::invalid_argument("DataSet: need at least one registration");
}

double log_likelihood(const ParametricModel& model, const DataSet& data, double theta) {
  if (data.counts().size() != model.outcome_count()) {
    throw std::invalid_argument("log_likelihood: data not aligned with model outcomes");
  }
  require_in_domain(model, theta, "log_likelihood");
  const auto& counts = data.counts();
  const auto& support = data.support();
  const bool grid = model.kind() == ModelKind::ContinuousGrid;
  const double total = static_cast<double>(data.total());
  double sum = 0.0;
  // Sparse data on a large grid: evaluate only the observed outcomes.
  if (support.size() * 4 < model.outcome_count() &&
      (!grid || model.has_analytic_tail())) {
    for (std::size_t i : support) {
      const double p = model.prob_at(theta, i);
      if (!(p > 0.0)) return kNegInf;
      sum += static_cast<double>(counts[i]) * std::log(p);
    }
    if (grid) sum -= total * std::log1p(-model.tail_mass(theta));
    return sum;
  }
  const std::vector<double> p = model.prob(theta);
  for (std::size_t i : support) {
    if (!(p[i] > 0.0)) return kNegInf;
    sum += static_cast<double>(counts[i]) * std::log(p[i]);
  }
  if (grid) {
    const std::vector<double>& w = model.weights();
    double mass = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) mass += w[i] * p[i];
    sum -= total * std::log(mass);
  }
  return sum;
}

double fisher_information(const ParametricModel& model, double theta) {
  require_in_domain(model, theta, "fisher_information");
  const std::vector<double> p = model.prob(theta);
  const std::size_t on_support = static_cast<std::size_t>(
      std::count_if(p.begin(), p.end(), [](double v) { return v > kSupportCutoff; }));
  if (on_support < 2) {
    throw DegenerateModel("fisher_information: fewer than two outcomes on support");
  }
  const std::vector<double> s = model.score_density(theta);
  const std::vector<double>& w = model.weights();
  double f = model.tail_fisher(theta);
  for (std::size_t i = 0; i < s.size(); ++i) f += w[i] * s[i];
  return f;
}

double crb(const ParametricModel& model, double theta, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("crb: need n >= 1");
  return 1.0 / (static_cast<double>(n) * fisher_information(model, theta));
}

Estimate mle(const ParametricModel& model, const DataSet& data) {
  const Interval dom = model.theta_domain();
  const double step = dom.width() / static_cast<double>(kScanPoints - 1);
  auto theta_at = [&](std::size_t i) {
    return i + 1 == kScanPoints ? dom.hi : dom.lo + static_cast<double>(i) * step;
  };

  std::size_t best = 0;
  double best_ll = kNegInf;
  double min_ll = std::numeric_limits<double>::infinity();
  bool any_finite = false;
  for (std::size_t i = 0; i < kScanPoints; ++i) {
    const double ll = log_likelihood(model, data, theta_at(i));
    min_ll = std::min(min_ll, ll);
    if (std::isfinite(ll)) {
      if (!any_finite || ll > best_ll) {
        best = i;
        best_ll = ll;
      }
      any_finite = true;
    }
  }
  if (!any_finite) {
    throw NonFiniteLikelihood("mle: observed outcomes impossible across the domain");
  }
  if (best_ll - min_ll < 1e-12) {
    throw FlatLikelihood("mle: log-likelihood constant across the scan");
  }

  const double lo = theta_at(best == 0 ? 0 : best - 1);
  const double hi = theta_at(std::min(best + 1, kScanPoints - 1));
  auto ll = [&](double t) { return log_likelihood(model, data, t); };
  double theta_hat = numeric::golden_section_max(ll, lo, hi, kMleTolerance);
  double hat_ll = ll(theta_hat);
  // The optimum may sit on the bracket edge (e.g. a domain boundary).
  for (double edge : {lo, hi}) {
    const double e = ll(edge);
    if (e > hat_ll || (e == hat_ll && edge < theta_hat)) {
      theta_hat = edge;
      hat_ll = e;
    }
  }
  if (best_ll > hat_ll) theta_hat = theta_at(best);

  Estimate est{theta_hat, 0.0, std::numeric_limits<double>::infinity(), 0.0};
  try {
    est.fisher = fisher_information(model, theta_hat);
    est.crb = 1.0 / (static_cast<double>(data.total()) * est.fisher);
  } catch (const DegenerateModel&) {
    // Point mass at the estimate: zero asymptotic variance.
  }
  est.variance = est.crb;
  return est;
}

QuadraticExpansion quadratic_expansion_check(const ParametricModel& model,
                                             double theta_true) {
  constexpr std::array<double, 5> kOffsets{-0.01, -0.005, 0.0, 0.005, 0.01};
  const Interval dom = model.theta_domain();
  if (!dom.contains(theta_true + kOffsets.front()) ||
      !dom.contains(theta_true + kOffsets.back())) {
    throw std::invalid_argument("quadratic_expansion_check: stencil leaves the domain");
  }
  const std::vector<double> p_true = model.prob(theta_true);
  const std::vector<double>& w = model.weights();
  std::array<double, 5> values{};
  for (std::size_t s = 0; s < kOffsets.size(); ++s) {
    const std::vector<double> p = model.prob(theta_true + kOffsets[s]);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p_true[i] > kSupportCutoff)) continue;
      if (!(p[i] > 0.0)) {
        throw NonFiniteLikelihood("quadratic_expansion_check: support shrinks off theta_true");
      }
      sum += w[i] * p_true[i] * std::log(p[i]);
    }
    values[s] = sum;
  }
  const auto c = numeric::fit_quadratic(kOffsets, values);
  // Outcomes beyond a grid contribute their own curvature, which to leading
  // order is the Fisher information they carry.
  return {-2.0 * c[2] + model.tail_fisher(theta_true),
          fisher_information(model, theta_true)};
}

ParametricModel bernoulli_model() {
  ModelHooks hooks;
  hooks.dprob = [](double) { return std::vector<double>{1.0, -1.0}; };
  hooks.prob_at = [](double theta, std::size_t i) { return i == 0 ? theta : 1.0 - theta; };
  return ParametricModel::discrete(
      {"1", "0"}, [](double theta) { return std::vector<double>{theta, 1.0 - theta}; },
      {0.0, 1.0}, std::move(hooks));
}

ParametricModel gaussian_location_model(double sigma, double half_width,
                                        std::size_t points, Interval theta_domain) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian model: sigma must be positive");
  const numeric::UniformGrid grid = numeric::UniformGrid::symmetric(half_width, points);
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  auto density = [grid, sigma, norm](double theta, std::size_t i) {
    const double z = (grid[i] - theta) / sigma;
    return norm * std::exp(-0.5 * z * z);
  };
  ModelHooks hooks;
  hooks.prob_at = density;
  hooks.dprob = [grid, sigma, density](double theta) {
    std::vector<double> d(grid.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = density(theta, i) * (grid[i] - theta) / (sigma * sigma);
    }
    return d;
  };
  return ParametricModel::continuous(
      grid,
      [grid, density](double theta) {
        std::vector<double> p(grid.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = density(theta, i);
        return p;
      },
      theta_domain, std::move(hooks));
}

}  // namespace fisherlab::stats
