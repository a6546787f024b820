#include "fisherlab/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace fisherlab::numeric {

UniformGrid::UniformGrid(double lo, double hi, std::size_t size)
    : lo_(lo), hi_(hi), step_(0.0), size_(size) {
  if (size < 2) throw std::invalid_argument("UniformGrid: need at least 2 points");
  if (!(hi > lo)) throw std::invalid_argument("UniformGrid: hi must exceed lo");
  step_ = (hi - lo) / static_cast<double>(size - 1);
}

std::vector<double> UniformGrid::points() const {
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = (*this)[i];
  return out;
}

std::vector<double> UniformGrid::trapezoid_weights() const {
  std::vector<double> w(size_, step_);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double trapezoid(std::span<const double> values, double step) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * step;
}

double simpson(std::span<const double> values, double step) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) {
    throw std::invalid_argument("simpson: need an odd number of samples >= 3");
  }
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    (i % 2 == 1 ? odd : even) += values[i];
  }
  return step / 3.0 * (values.front() + values.back() + 4.0 * odd + 2.0 * even);
}

double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    // >= keeps the left point on ties, which drifts toward smaller abscissae.
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::array<double, 3> fit_quadratic(std::span<const double> t,
                                    std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 3) {
    throw std::invalid_argument("fit_quadratic: need >= 3 matched samples");
  }
  // Normal equations in the monomial basis; the fits used here have
  // a handful of points on a tiny symmetric stencil, so conditioning is benign.
  double s[5] = {0, 0, 0, 0, 0};
  double r[3] = {0, 0, 0};
  for (std::size_t i = 0; i < t.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += p;
      if (k < 3) r[k] += p * y[i];
      p *= t[i];
    }
  }
  double m[3][4] = {{s[0], s[1], s[2], r[0]},
                    {s[1], s[2], s[3], r[1]},
                    {s[2], s[3], s[4], r[2]}};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
    }
    for (int k = 0; k < 4; ++k) std::swap(m[col][k], m[piv][k]);
    if (m[col][col] == 0.0) throw std::invalid_argument("fit_quadratic: singular system");
    for (int row = 0; row < 3; ++row) {
      if (row == col) continue;
      const double factor = m[row][col] / m[col][col];
      for (int k = col; k < 4; ++k) m[row][k] -= factor * m[col][k];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

}  // namespace fisherlab::numeric
