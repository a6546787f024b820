#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fisherlab/numeric.hpp"
#include "fisherlab/stats.hpp"

namespace fisherlab::slit {

/// Single-slit geometry. Lengths share one (arbitrary) unit; hbar defaults to
/// natural units.
struct SlitGeometry {
  double width = 1.0;            // a
  double wavelength = 1.0;       // de Broglie wavelength
  double screen_distance = 1.0;  // slit-to-screen distance d
  double k_x = 0.0;              // incident transverse wavenumber
  double hbar = 1.0;

  /// Throws std::invalid_argument unless width, wavelength and distance are
  /// positive and finite.
  void validate() const;

  double wavenumber() const;
  /// Far-field peak position nu = a k_x / 2.
  double shift() const { return 0.5 * width * k_x; }
  /// Screen coordinate per unit of mu: xi = mu * 2 d / (a k).
  double screen_per_mu() const;
  /// Momentum per unit of mu: p_x = mu * 2 hbar / a.
  double momentum_per_mu() const { return 2.0 * hbar / width; }
};

/// Grid and parameter range for the far-field model in mu.
struct FarFieldOptions {
  double half_width = 40.0;
  std::size_t points = 8001;
  /// The model parameter nu ranges over shift() +- this value.
  double nu_half_range = 2.0;
};

/// (1/pi) sinc^2(mu - nu).
double farfield_density(double mu, double nu);

/// Far-field detection density in mu with the shift nu as parameter. The
/// model carries analytic derivative, score density and the analytic tail
/// mass / Fisher information beyond the grid.
stats::ParametricModel farfield_model(const SlitGeometry& geometry,
                                      const FarFieldOptions& options = {});

/// Fisher information of the far-field pattern about nu (dimensionless).
double fisher_slit(const SlitGeometry& geometry, const FarFieldOptions& options = {});

/// Variance of the transverse position inside the slit, by quadrature.
double position_variance(const SlitGeometry& geometry);

struct UncertaintyChain {
  double fisher;                   // F in mu units
  double momentum_variance_bound;  // (2 hbar / a)^2 / F
  double position_variance;        // (Delta x)^2
  double heisenberg_bound;         // hbar^2 / (4 (Delta x)^2)
  double product;                  // momentum_variance_bound * (Delta x)^2
};
UncertaintyChain uncertainty_chain(const SlitGeometry& geometry,
                                   const FarFieldOptions& options = {});

enum class Representation { Position, Momentum };

/// Sampled wavefunction. Position samples cover the slit aperture; momentum
/// samples are in the dimensionless mu with unit norm against d mu.
/// `tail_norm` is the analytic norm carried outside the sampled grid.
struct SlitWavefunction {
  SlitGeometry geometry;
  Representation representation = Representation::Momentum;
  numeric::UniformGrid grid{-1.0, 1.0, 3};
  std::vector<std::complex<double>> amplitude;
  double tail_norm = 0.0;

  double norm() const;
};

/// exp(i k_x x)/sqrt(a) on [-a/2, a/2]; `points` must be odd.
SlitWavefunction position_wavefunction(const SlitGeometry& geometry,
                                       std::size_t points = 2001);

/// sinc(mu - nu)/sqrt(pi), optionally for an aperture centred at
/// `displacement` (length units) instead of 0, which adds the linear phase
/// exp(-i mu 2 displacement / a).
SlitWavefunction momentum_wavefunction(const SlitGeometry& geometry,
                                       const FarFieldOptions& options = {},
                                       double displacement = 0.0);

/// Fisher information of |psi(mu)|^2 about a shift of mu, together with the
/// two terms of its decomposition
///   F = 4 <(Delta s)^2> - 4 int |psi|^2 (d arg psi / d mu + <s>)^2
/// where s = i d/d mu is the position conjugate to mu (s = 2x/a for the slit).
/// Quantities refer to the state restricted to the sampled grid.
struct MomentumFisher {
  double fisher;
  double variance_term;
  double phase_term;
  double mean_position;  // <s>
};
MomentumFisher fisher_from_wavefunction(const SlitWavefunction& psi);

/// int_{-W}^{W} mu^2 (1/pi) sinc^2(mu) d mu. Grows without bound, like W/pi.
double truncated_momentum_variance(double window);

}  // namespace fisherlab::slit
