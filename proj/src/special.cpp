#include "fisherlab/special.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fisherlab::special {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

double sinc_derivative(double x) {
  if (std::abs(x) < 0.5) {
    // sum_{n>=1} (-1)^n 2n x^(2n-1) / (2n+1)!
    const double x2 = x * x;
    double term = -x / 3.0;  // n = 1
    double sum = term;
    for (int n = 2; n < 12; ++n) {
      term *= -x2 * static_cast<double>(n) /
              (static_cast<double>(n - 1) * (2.0 * n) * (2.0 * n + 1.0));
      sum += term;
    }
    return sum;
  }
  return (x * std::cos(x) - std::sin(x)) / (x * x);
}

double bessel_j(int order, double x) {
  if (order < 0) {
    const double v = bessel_j(-order, x);
    return (order % 2 == 0) ? v : -v;
  }
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  const double ax = std::abs(x);
  const double sign = (x < 0.0 && order % 2 == 1) ? -1.0 : 1.0;

  const double reach = std::max(static_cast<double>(order), ax);
  int start = static_cast<int>(reach + 30.0 + std::sqrt(60.0 * reach));
  if (start % 2 == 1) ++start;

  constexpr double kBig = 1e250;
  const double two_over_x = 2.0 / ax;
  double j_above = 0.0;  // J_{k+1}
  double j_here = 1e-300;  // J_k, unnormalized
  double norm = 0.0;
  double result = 0.0;
  for (int k = start; k > 0; --k) {
    const double j_below = static_cast<double>(k) * two_over_x * j_here - j_above;
    j_above = j_here;
    j_here = j_below;  // now J_{k-1}
    if (std::abs(j_here) > kBig) {
      j_here /= kBig;
      j_above /= kBig;
      norm /= kBig;
      result /= kBig;
    }
    const int n = k - 1;
    if (n == order) result = j_here;
    if (n > 0 && n % 2 == 0) norm += 2.0 * j_here;
  }
  norm += j_here;  // J_0
  return sign * result / norm;
}

TrigIntegralTails trig_integral_tails(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("trig_integral_tails: x must be positive");
  constexpr double kEuler = 0.57721566490153286061;
  constexpr double kEps = 1e-16;
  if (x > 2.0) {
    // Continued fraction for E1(ix), modified Lentz.
    using cd = std::complex<double>;
    const double tiny = std::numeric_limits<double>::min() * 1e10;
    cd b(1.0, x);
    cd c(1.0 / tiny, 0.0);
    cd d = 1.0 / b;
    cd h = d;
    for (int i = 2; i < 100000; ++i) {
      const double a = -static_cast<double>((i - 1) * (i - 1));
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      const cd del = c * d;
      h *= del;
      if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) break;
    }
    h *= cd(std::cos(x), -std::sin(x));
    // E1(ix) = -Ci(x) + i (Si(x) - pi/2)
    return {-h.imag(), h.real()};
  }
  // Power series.
  const double x2 = x * x;
  double si = 0.0;
  double term = x;  // x^(2k+1)/(2k+1)! with sign
  for (int k = 0; k < 40; ++k) {
    si += term / (2.0 * k + 1.0);
    term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    if (std::abs(term) < kEps * std::abs(si)) break;
  }
  double ci_sum = 0.0;
  term = 1.0;  // x^(2k)/(2k)! with sign
  for (int k = 1; k < 40; ++k) {
    term *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
    ci_sum += term / (2.0 * k);
    if (std::abs(term) < kEps * (std::abs(ci_sum) + 1e-300)) break;
  }
  const double ci = kEuler + std::log(x) + ci_sum;
  return {std::numbers::pi / 2.0 - si, -ci};
}

double sine_integral(double x) {
  return std::numbers::pi / 2.0 - trig_integral_tails(x).sin_tail;
}

double cosine_integral(double x) { return -trig_integral_tails(x).cos_tail; }

namespace {

// int_X^inf cos(u)/u^n du and int_X^inf sin(u)/u^n du for n = 1..4, built by
// integration by parts from the n = 1 tails.
struct OscillatoryTails {
  double cos_n[5];
  double sin_n[5];
};

OscillatoryTails oscillatory_tails(double X) {
  const TrigIntegralTails t = trig_integral_tails(X);
  const double c = std::cos(X);
  const double s = std::sin(X);
  OscillatoryTails o{};
  o.sin_n[1] = t.sin_tail;
  o.cos_n[1] = t.cos_tail;
  double xn = X;  // X^n
  for (int n = 1; n < 4; ++n) {
    o.sin_n[n + 1] = (o.cos_n[n] + s / xn) / n;
    o.cos_n[n + 1] = (c / xn - o.sin_n[n]) / n;
    xn *= X;
  }
  return o;
}

}  // namespace

double sinc_squared_tail(double x0) {
  if (!(x0 >= 1.0)) throw std::invalid_argument("sinc_squared_tail: x0 must be >= 1");
  // sin^2 x / x^2 = (1 - cos 2x) / (2 x^2)
  const OscillatoryTails o = oscillatory_tails(2.0 * x0);
  return 1.0 / (2.0 * x0) - o.cos_n[2];
}

double sinc_derivative_squared_tail(double x0) {
  if (!(x0 >= 1.0)) {
    throw std::invalid_argument("sinc_derivative_squared_tail: x0 must be >= 1");
  }
  // sinc'^2 = (1 + cos 2x)/(2x^2) - sin 2x / x^3 + (1 - cos 2x)/(2x^4)
  const OscillatoryTails o = oscillatory_tails(2.0 * x0);
  return 1.0 / (2.0 * x0) + 1.0 / (6.0 * x0 * x0 * x0) + o.cos_n[2] -
         4.0 * o.sin_n[3] - 4.0 * o.cos_n[4];
}

}  // namespace fisherlab::special
