#include "fisherlab/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "fisherlab/errors.hpp"

namespace fisherlab::mz {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

std::size_t dimension(HalfInteger j, std::size_t size_cap) {
  if (j.twice() < 0) throw std::invalid_argument("j must be non-negative");
  const auto dim = static_cast<std::size_t>(j.twice()) + 1;
  if (dim > size_cap) {
    throw SizeLimit("representation dimension " + std::to_string(dim) +
                    " exceeds the cap " + std::to_string(size_cap));
  }
  return dim;
}

void require_member(HalfInteger j, HalfInteger m) {
  if (std::abs(m.twice()) > j.twice() || (j.twice() - m.twice()) % 2 != 0) {
    throw std::invalid_argument("m = " + m.to_string() + " is not a weight of j = " +
                                j.to_string());
  }
}

// Reduces phi to [-pi, pi]; exp(-i 2 pi J2) = (-1)^{2j}, so odd turns flip the
// sign of half-integer representations.
struct ReducedPhase {
  double phi;
  double sign;
};

ReducedPhase reduce_phase(HalfInteger j, double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("phase must be finite");
  const double r = std::remainder(phi, 2.0 * kPi);
  const long long turns = std::llround((phi - r) / (2.0 * kPi));
  const bool flip = (j.twice() % 2 != 0) && (turns % 2 != 0);
  return {r, flip ? -1.0 : 1.0};
}

// (j + k)(j - k + 1) with everything doubled.
double ladder_sq(int two_j, int two_k) {
  return 0.25 * static_cast<double>(two_j + two_k) * static_cast<double>(two_j - two_k + 2);
}

}  // namespace

HalfInteger HalfInteger::from_double(double v) {
  const double twice = 2.0 * v;
  const double rounded = std::round(twice);
  if (!std::isfinite(v) || std::abs(twice - rounded) > 1e-9 ||
      std::abs(rounded) > static_cast<double>(std::numeric_limits<int>::max())) {
    throw std::invalid_argument("not an integer or half-integer: " + std::to_string(v));
  }
  return from_twice(static_cast<int>(rounded));
}

std::string HalfInteger::to_string() const {
  if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

AngularMomentumRep build_rep(HalfInteger j, std::size_t size_cap) {
  const std::size_t n = dimension(j, size_cap);
  const int tj = j.twice();
  Eigen::MatrixXcd raise = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd j3 = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const int tk = tj - 2 * static_cast<int>(i);
    j3(i, i) = 0.5 * tk;
    // J+ |k-1> = sqrt((j+k)(j-k+1)) |k>, and |k-1> sits at index i+1.
    if (i + 1 < n) raise(i, i + 1) = std::sqrt(ladder_sq(tj, tk));
  }
  const Eigen::MatrixXcd lower = raise.adjoint();
  AngularMomentumRep rep{j, 0.5 * (raise + lower), (raise - lower) / cd(0.0, 2.0), j3};
  return rep;
}

std::vector<double> wigner_column(HalfInteger j, HalfInteger m, double phi,
                                  std::size_t size_cap) {
  const std::size_t n = dimension(j, size_cap);
  require_member(j, m);
  const int tj = j.twice();
  const int tm = m.twice();
  const ReducedPhase rp = reduce_phase(j, phi);
  std::vector<double> v(n, 0.0);
  const double c = std::cos(rp.phi);
  const double s = std::sin(rp.phi);

  if (n == 1) {
    v[0] = rp.sign;
    return v;
  }
  if (s == 0.0) {
    if (c > 0.0) {
      v[basis_index(j, m)] = rp.sign;
    } else {
      // d^j_{k,m}(pi) = (-1)^{j+k} delta_{k,-m}
      const int parity = ((tj - tm) / 2) % 2;
      v[basis_index(j, HalfInteger::from_twice(-tm))] = rp.sign * (parity ? -1.0 : 1.0);
    }
    return v;
  }

  // The column is the null vector of the symmetric tridiagonal
  //   T = cos(phi) J3 + sin(phi) J1 - m,
  // i.e. the three-term recursion in k. Solve it with a twisted
  // factorization: ratios are propagated from both ends toward the twist
  // index, always in the numerically stable direction.
  std::vector<double> diag(n), off(n - 1);
  const double mv = 0.5 * tm;
  for (std::size_t i = 0; i < n; ++i) {
    const int tk = tj - 2 * static_cast<int>(i);
    diag[i] = 0.5 * tk * c - mv;
    if (i + 1 < n) off[i] = 0.5 * s * std::sqrt(ladder_sq(tj, tk));
  }
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  auto guard = [tiny](double x) { return x == 0.0 ? tiny : x; };

  std::vector<double> fwd(n), bwd(n);
  fwd[0] = guard(diag[0]);
  for (std::size_t i = 1; i < n; ++i) {
    fwd[i] = guard(diag[i] - off[i - 1] * off[i - 1] / fwd[i - 1]);
  }
  bwd[n - 1] = guard(diag[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) {
    bwd[i] = guard(diag[i] - off[i] * off[i] / bwd[i + 1]);
  }
  std::size_t twist = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double gamma = std::abs(fwd[i] + bwd[i] - diag[i]);
    if (gamma < best) {
      best = gamma;
      twist = i;
    }
  }

  v[twist] = 1.0;
  // Track the sign of the top component separately: it can underflow.
  double top_sign = 1.0;
  for (std::size_t i = twist; i-- > 0;) {
    const double ratio = -off[i] / fwd[i];
    v[i] = ratio * v[i + 1];
    if (ratio < 0.0) top_sign = -top_sign;
  }
  for (std::size_t i = twist + 1; i < n; ++i) v[i] = -off[i - 1] * v[i - 1] / bwd[i];

  double norm_sq = 0.0;
  for (double x : v) norm_sq += x * x;
  double scale = 1.0 / std::sqrt(norm_sq);

  // d^j_{j,m}(phi) = (-1)^{j-m} sqrt(C(2j, j-m)) cos^{j+m}(phi/2) sin^{j-m}(phi/2)
  const bool odd = ((tj - tm) / 2) % 2 != 0;
  const double want = (rp.phi > 0.0 && odd) ? -1.0 : 1.0;
  if (want != top_sign) scale = -scale;
  scale *= rp.sign;
  for (double& x : v) x *= scale;
  return v;
}

WignerRotation wigner_d(HalfInteger j, double phi, std::size_t size_cap) {
  const std::size_t n = dimension(j, size_cap);
  WignerRotation w{j, phi, Eigen::MatrixXd(n, n)};
  for (std::size_t col = 0; col < n; ++col) {
    const HalfInteger m = HalfInteger::from_twice(j.twice() - 2 * static_cast<int>(col));
    const std::vector<double> v = wigner_column(j, m, phi, size_cap);
    for (std::size_t row = 0; row < n; ++row) w.d(row, col) = v[row];
  }
  return w;
}

double mz_transform_check(HalfInteger j, double phi) {
  if (j.twice() > 40) throw std::invalid_argument("mz_transform_check: intended for j <= 20");
  const AngularMomentumRep rep = build_rep(j);
  const Eigen::Index n = rep.j1.rows();
  const cd i_unit(0.0, 1.0);

  const Eigen::MatrixXcd splitter = (-i_unit * (kPi / 2.0) * rep.j1).exp();
  const Eigen::MatrixXcd merger = (i_unit * (kPi / 2.0) * rep.j1).exp();
  Eigen::MatrixXcd shifter = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) shifter(i, i) = std::exp(-i_unit * phi * rep.j3(i, i));
  const Eigen::MatrixXcd composed = merger * shifter * splitter;

  const Eigen::MatrixXcd u = wigner_d(j, phi).d.cast<cd>();
  const double dev_u = (composed - u).cwiseAbs().maxCoeff();

  const Eigen::MatrixXcd lhs = u.adjoint() * rep.j3 * u;
  const Eigen::MatrixXcd rhs = -std::sin(phi) * rep.j1 + std::cos(phi) * rep.j3;
  const double dev_j3 = (lhs - rhs).cwiseAbs().maxCoeff();
  return std::max(dev_u, dev_j3);
}

OutcomeDistribution outcome_distribution(const FockInput& input, double phi,
                                         std::size_t size_cap) {
  OutcomeDistribution out{input.j(), input.m(), phi, {}};
  out.p = wigner_column(out.j, out.m, phi, size_cap);
  for (double& x : out.p) x *= x;
  return out;
}

Moments moments(const FockInput& input, double phi) {
  const double j = input.j().value();
  const double m = input.m().value();
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return {m * c, m * m * c * c + 0.5 * (j * (j + 1.0) - m * m) * s * s};
}

std::optional<double> linearized_phase_error(const FockInput& input, double phi) {
  const double m = input.m().value();
  if (input.m().twice() == 0) return std::nullopt;
  const double s = std::sin(phi);
  if (std::abs(s) < 1e-4) {
    const double j = input.j().value();
    return std::sqrt((j * (j + 1.0) - m * m) / (2.0 * m * m));
  }
  const Moments mo = moments(input, phi);
  return std::sqrt(std::max(mo.variance(), 0.0)) / std::abs(m * s);
}

PhaseFisher fisher_phase_at_zero(const FockInput& input) {
  const HalfInteger j = input.j();
  const HalfInteger m = input.m();
  const double jv = j.value();
  const double mv = m.value();
  PhaseFisher out{};
  out.closed_form = 2.0 * (jv * (jv + 1.0) - mv * mv);

  const std::size_t idx = basis_index(j, m);
  const double h = kPhaseFisherStep;
  const double up = wigner_column(j, m, h)[idx];
  const double down = wigner_column(j, m, -h)[idx];
  const double second = (up * up - 2.0 + down * down) / (h * h);
  out.finite_difference = -2.0 * second;
  out.relative_deviation =
      out.closed_form != 0.0
          ? std::abs(out.finite_difference - out.closed_form) / out.closed_form
          : std::abs(out.finite_difference);
  return out;
}

stats::ParametricModel mz_model(const FockInput& input, stats::Interval domain) {
  const HalfInteger j = input.j();
  std::vector<std::string> labels;
  for (int tk = j.twice(); tk >= -j.twice(); tk -= 2) {
    labels.push_back(HalfInteger::from_twice(tk).to_string());
  }
  dimension(j, kDefaultSizeCap);
  return stats::ParametricModel::discrete(
      std::move(labels), [input](double phi) { return outcome_distribution(input, phi).p; },
      domain);
}

Posterior Posterior::flat(double half_window, std::size_t points) {
  if (!(half_window > 0.0) || half_window > kPi) {
    throw std::invalid_argument("posterior window must satisfy 0 < W <= pi");
  }
  const numeric::UniformGrid grid = numeric::UniformGrid::symmetric(half_window, points);
  return Posterior(grid, std::vector<double>(points, 1.0 / (2.0 * half_window)));
}

double Posterior::normalization() const { return numeric::trapezoid(density_, grid_.step()); }

double Posterior::mean() const {
  std::vector<double> f(density_.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = grid_[i] * density_[i];
  return numeric::trapezoid(f, grid_.step()) / normalization();
}

Posterior posterior_update(const Posterior& posterior, const FockInput& input,
                           HalfInteger outcome) {
  const HalfInteger j = input.j();
  require_member(j, outcome);
  const std::size_t idx = basis_index(j, outcome);
  const numeric::UniformGrid& grid = posterior.grid();
  std::vector<double> density = posterior.density();
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double amp = wigner_column(j, input.m(), grid[i])[idx];
    density[i] *= amp * amp;
  }
  const double z = numeric::trapezoid(density, grid.step());
  if (!(z >= 1e-300)) {
    throw ZeroPosterior("posterior vanished after outcome k = " + outcome.to_string());
  }
  for (double& x : density) x /= z;
  Posterior next(grid, std::move(density));
  next.shots_ = posterior.shots_;
  next.shots_.push_back(outcome);
  return next;
}

double posterior_variance(const Posterior& posterior) {
  const numeric::UniformGrid& grid = posterior.grid();
  const std::vector<double>& rho = posterior.density();
  std::vector<double> f1(rho.size()), f2(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    f1[i] = grid[i] * rho[i];
    f2[i] = grid[i] * grid[i] * rho[i];
  }
  const double z = numeric::trapezoid(rho, grid.step());
  const double mean = numeric::trapezoid(f1, grid.step()) / z;
  return numeric::trapezoid(f2, grid.step()) / z - mean * mean;
}

double resource_scaling(HalfInteger j, unsigned n_repeats) {
  if (n_repeats < 1) throw std::invalid_argument("resource_scaling: need n_repeats >= 1");
  if (j.twice() < 1) throw std::invalid_argument("resource_scaling: need N >= 1");
  const double n = static_cast<double>(n_repeats);
  const double total = static_cast<double>(j.twice()) * n;
  return 4.0 * n / (total * total);
}

}  // namespace fisherlab::mz
