#include "fisherlab/slit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fisherlab/errors.hpp"
#include "fisherlab/special.hpp"

namespace fisherlab::slit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvPi = std::numbers::inv_pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("slit geometry: ") + name +
                                " must be positive and finite");
  }
}

void validate_options(const SlitGeometry& g, const FarFieldOptions& o) {
  if (o.points < 3) throw std::invalid_argument("far-field grid needs >= 3 points");
  if (!(o.nu_half_range > 0.0)) throw std::invalid_argument("nu_half_range must be positive");
  // Tail formulas need each grid end at least one unit beyond any shift.
  if (o.half_width - std::abs(g.shift()) - o.nu_half_range < 1.0) {
    throw std::invalid_argument("far-field grid too narrow for the requested nu range");
  }
}

}  // namespace

void SlitGeometry::validate() const {
  require_positive(width, "width");
  require_positive(wavelength, "wavelength");
  require_positive(screen_distance, "screen distance");
  require_positive(hbar, "hbar");
  if (!std::isfinite(k_x)) throw std::invalid_argument("slit geometry: k_x must be finite");
}

double SlitGeometry::wavenumber() const { return 2.0 * kPi / wavelength; }

double SlitGeometry::screen_per_mu() const {
  return 2.0 * screen_distance / (width * wavenumber());
}

double farfield_density(double mu, double nu) {
  const double s = special::sinc(mu - nu);
  return kInvPi * s * s;
}

stats::ParametricModel farfield_model(const SlitGeometry& geometry,
                                      const FarFieldOptions& options) {
  geometry.validate();
  validate_options(geometry, options);
  const numeric::UniformGrid grid =
      numeric::UniformGrid::symmetric(options.half_width, options.points);
  const double edge = options.half_width;

  stats::ModelHooks hooks;
  hooks.prob_at = [grid](double nu, std::size_t i) { return farfield_density(grid[i], nu); };
  hooks.dprob = [grid](double nu) {
    std::vector<double> d(grid.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double x = grid[i] - nu;
      // d/dnu of sinc^2(mu - nu)/pi
      d[i] = -2.0 * kInvPi * special::sinc(x) * special::sinc_derivative(x);
    }
    return d;
  };
  hooks.score_density = [grid](double nu) {
    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double ds = special::sinc_derivative(grid[i] - nu);
      s[i] = 4.0 * kInvPi * ds * ds;
    }
    return s;
  };
  hooks.tail_mass = [edge](double nu) {
    return kInvPi *
           (special::sinc_squared_tail(edge - nu) + special::sinc_squared_tail(edge + nu));
  };
  hooks.tail_fisher = [edge](double nu) {
    return 4.0 * kInvPi *
           (special::sinc_derivative_squared_tail(edge - nu) +
            special::sinc_derivative_squared_tail(edge + nu));
  };

  const double centre = geometry.shift();
  return stats::ParametricModel::continuous(
      grid,
      [grid](double nu) {
        std::vector<double> p(grid.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = farfield_density(grid[i], nu);
        return p;
      },
      {centre - options.nu_half_range, centre + options.nu_half_range}, std::move(hooks));
}

double fisher_slit(const SlitGeometry& geometry, const FarFieldOptions& options) {
  const stats::ParametricModel model = farfield_model(geometry, options);
  return stats::fisher_information(model, geometry.shift());
}

double position_variance(const SlitGeometry& geometry) {
  const SlitWavefunction psi = position_wavefunction(geometry);
  const std::size_t n = psi.grid.size();
  std::vector<double> rho(n), x_rho(n), x2_rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = psi.grid[i];
    rho[i] = std::norm(psi.amplitude[i]);
    x_rho[i] = x * rho[i];
    x2_rho[i] = x * x * rho[i];
  }
  const double h = psi.grid.step();
  const double norm = numeric::simpson(rho, h);
  const double mean = numeric::simpson(x_rho, h) / norm;
  return numeric::simpson(x2_rho, h) / norm - mean * mean;
}

UncertaintyChain uncertainty_chain(const SlitGeometry& geometry,
                                   const FarFieldOptions& options) {
  UncertaintyChain c{};
  c.fisher = fisher_slit(geometry, options);
  const double scale = geometry.momentum_per_mu();
  c.momentum_variance_bound = scale * scale / c.fisher;
  c.position_variance = position_variance(geometry);
  c.heisenberg_bound = geometry.hbar * geometry.hbar / (4.0 * c.position_variance);
  c.product = c.momentum_variance_bound * c.position_variance;
  return c;
}

double SlitWavefunction::norm() const {
  std::vector<double> rho(amplitude.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(amplitude[i]);
  const double h = grid.step();
  const double sampled =
      rho.size() % 2 == 1 ? numeric::simpson(rho, h) : numeric::trapezoid(rho, h);
  return sampled + tail_norm;
}

SlitWavefunction position_wavefunction(const SlitGeometry& geometry, std::size_t points) {
  geometry.validate();
  if (points < 3 || points % 2 == 0) {
    throw std::invalid_argument("position_wavefunction: need an odd number of points >= 3");
  }
  const double half = 0.5 * geometry.width;
  SlitWavefunction psi{geometry, Representation::Position,
                       numeric::UniformGrid(-half, half, points), {}, 0.0};
  const double amp = 1.0 / std::sqrt(geometry.width);
  psi.amplitude.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    psi.amplitude[i] = std::polar(amp, geometry.k_x * psi.grid[i]);
  }
  return psi;
}

SlitWavefunction momentum_wavefunction(const SlitGeometry& geometry,
                                       const FarFieldOptions& options,
                                       double displacement) {
  geometry.validate();
  validate_options(geometry, options);
  const double nu = geometry.shift();
  const double s0 = 2.0 * displacement / geometry.width;
  SlitWavefunction psi{geometry, Representation::Momentum,
                       numeric::UniformGrid::symmetric(options.half_width, options.points),
                       {}, 0.0};
  psi.amplitude.resize(options.points);
  const double amp = std::sqrt(kInvPi);
  for (std::size_t i = 0; i < options.points; ++i) {
    const double mu = psi.grid[i];
    psi.amplitude[i] = amp * special::sinc(mu - nu) * std::polar(1.0, -mu * s0);
  }
  psi.tail_norm = kInvPi * (special::sinc_squared_tail(options.half_width - nu) +
                            special::sinc_squared_tail(options.half_width + nu));
  return psi;
}

MomentumFisher fisher_from_wavefunction(const SlitWavefunction& psi) {
  using cd = std::complex<double>;
  if (psi.representation != Representation::Momentum) {
    throw std::invalid_argument("fisher_from_wavefunction: need the momentum representation");
  }
  const std::size_t n = psi.amplitude.size();
  if (n < 5 || n != psi.grid.size()) {
    throw std::invalid_argument("fisher_from_wavefunction: need >= 5 samples matching the grid");
  }
  const double h = psi.grid.step();
  const auto& a = psi.amplitude;

  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = std::norm(a[i]);
  const double norm = numeric::trapezoid(rho, h);
  if (!(norm > 0.0)) throw std::invalid_argument("fisher_from_wavefunction: zero wavefunction");
  for (double& r : rho) r /= norm;
  const double scale = 1.0 / std::sqrt(norm);

  // Phase must be resolved by the grid, except across nodes where the
  // amplitude dips through (near) zero and the sign may flip.
  auto local_min = [&](std::size_t i) {
    const bool left = i == 0 || rho[i] <= rho[i - 1];
    const bool right = i + 1 == n || rho[i] <= rho[i + 1];
    return left && right;
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (rho[i] <= stats::kSupportCutoff || rho[i + 1] <= stats::kSupportCutoff) continue;
    const double jump = std::arg(a[i + 1] * std::conj(a[i]));
    if (std::abs(jump) > 0.5 * std::numbers::pi && !local_min(i) && !local_min(i + 1)) {
      throw PhaseUnwrapFailure("phase changes by " + std::to_string(jump) +
                               " rad between grid points " + std::to_string(i) + " and " +
                               std::to_string(i + 1));
    }
  }

  // d psi / d mu: fourth-order centred inside, lower order near the ends.
  std::vector<cd> d(n);
  d[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h);
  d[n - 1] = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * h);
  d[1] = (a[2] - a[0]) / (2.0 * h);
  d[n - 2] = (a[n - 1] - a[n - 3]) / (2.0 * h);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (-a[i + 2] + 8.0 * a[i + 1] - 8.0 * a[i - 1] + a[i - 2]) / (12.0 * h);
  }

  std::vector<double> cross_im(n), grad_sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cd c = std::conj(a[i]) * d[i] * (scale * scale);
    cross_im[i] = c.imag();
    grad_sq[i] = std::norm(d[i]) * scale * scale;
  }
  const double mean_s = -numeric::trapezoid(cross_im, h);

  std::vector<double> amp_term(n), phase_term(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rho[i] > stats::kSupportCutoff) {
      const cd c = std::conj(a[i]) * d[i] * (scale * scale);
      amp_term[i] = 4.0 * c.real() * c.real() / rho[i];
      const double shifted = c.imag() + mean_s * rho[i];
      phase_term[i] = 4.0 * shifted * shifted / rho[i];
    } else {
      // Node: the whole gradient belongs to the modulus.
      amp_term[i] = 4.0 * grad_sq[i];
      phase_term[i] = 0.0;
    }
  }

  MomentumFisher out{};
  out.mean_position = mean_s;
  out.fisher = numeric::trapezoid(amp_term, h);
  out.variance_term = 4.0 * (numeric::trapezoid(grad_sq, h) - mean_s * mean_s);
  out.phase_term = numeric::trapezoid(phase_term, h);
  return out;
}

double truncated_momentum_variance(double window) {
  if (!(window >= 0.0) || !std::isfinite(window)) {
    throw std::invalid_argument("truncated_momentum_variance: window must be >= 0");
  }
  if (window == 0.0) return 0.0;
  // Even integrand: integrate [0, W] with Simpson at spacing <= 0.01.
  std::size_t intervals = static_cast<std::size_t>(std::ceil(window / 0.01));
  intervals = std::max<std::size_t>(intervals + intervals % 2, 2);
  const double h = window / static_cast<double>(intervals);
  std::vector<double> f(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double mu = static_cast<double>(i) * h;
    const double s = special::sinc(mu);
    f[i] = mu * mu * kInvPi * s * s;
  }
  return 2.0 * numeric::simpson(f, h);
}

}  // namespace fisherlab::slit
