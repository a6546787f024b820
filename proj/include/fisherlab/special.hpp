#pragma once

namespace fisherlab::special {

/// sin(x)/x with the removable singularity at 0 filled by its series.
double sinc(double x);

/// d/dx sinc(x). Uses the Taylor series near the origin, where the closed
/// form (x cos x - sin x)/x^2 loses digits to cancellation.
double sinc_derivative(double x);

/// Bessel function of the first kind J_n(x) for integer n, computed by
/// Miller's downward recurrence normalized with J_0 + 2 sum J_2k = 1.
/// Accurate to ~1e-12 absolute for |x| <= 1e3.
double bessel_j(int order, double x);

/// Tails of the sine and cosine integrals for x > 0:
///   sin_tail = int_x^inf sin(t)/t dt = pi/2 - Si(x)
///   cos_tail = int_x^inf cos(t)/t dt = -Ci(x)
struct TrigIntegralTails {
  double sin_tail;
  double cos_tail;
};
TrigIntegralTails trig_integral_tails(double x);

/// Si(x) and Ci(x) for x > 0.
double sine_integral(double x);
double cosine_integral(double x);

/// int_x0^inf sinc(t)^2 dt for x0 >= 1.
double sinc_squared_tail(double x0);

/// int_x0^inf sinc'(t)^2 dt for x0 >= 1.
double sinc_derivative_squared_tail(double x0);

}  // namespace fisherlab::special
