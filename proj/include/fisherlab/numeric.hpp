#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fisherlab::numeric {

/// Uniform grid of `size` points covering [lo, hi] inclusive.
class UniformGrid {
 public:
  UniformGrid(double lo, double hi, std::size_t size);

  static UniformGrid symmetric(double half_width, std::size_t size) {
    return UniformGrid(-half_width, half_width, size);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double step() const { return step_; }
  std::size_t size() const { return size_; }

  double operator[](std::size_t i) const {
    // Pin the last point so that hi is reproduced exactly.
    return i + 1 == size_ ? hi_ : lo_ + static_cast<double>(i) * step_;
  }

  std::vector<double> points() const;

  /// Weights w_i such that sum_i w_i f(x_i) is the trapezoid rule.
  std::vector<double> trapezoid_weights() const;

 private:
  double lo_;
  double hi_;
  double step_;
  std::size_t size_;
};

double trapezoid(std::span<const double> values, double step);

/// Composite Simpson rule; requires an odd number of samples (>= 3).
double simpson(std::span<const double> values, double step);

/// Maximizes a unimodal function on [lo, hi] by golden-section search.
/// Returns the abscissa once the bracket is narrower than `tol`.
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double tol);

/// Least-squares quadratic c0 + c1 t + c2 t^2 through (t_i, y_i).
std::array<double, 3> fit_quadratic(std::span<const double> t,
                                    std::span<const double> y);

}  // namespace fisherlab::numeric
