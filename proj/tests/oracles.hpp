#ifndef PHASEMIX_TESTS_ORACLES_HPP
#define PHASEMIX_TESTS_ORACLES_HPP

// Brute-force reference computations used by the tests. They deliberately share no code
// with the library: plain composite rules on fixed grids, bisection, partial sums.

#include <cmath>
#include <functional>
#include <random>
#include <utility>

namespace oracle {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, long n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (long i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Trapezoid rule on [0, tmax] with step h; exponentially accurate for smooth integrands
/// that are even in t and decay fast.
inline double trapezoid_even(const std::function<double(double)>& f, double tmax, double h) {
  double s = 0.5 * f(0.0);
  for (double t = h; t <= tmax; t += h) s += f(t);
  return s * h;
}

/// K_nu(z) from its integral representation int_0^inf e^{-z cosh t} cosh(nu t) dt.
inline double bessel_k(double nu, double z) {
  const double tmax = std::acosh(760.0 / z + 1.0) + 1.0;
  return trapezoid_even([&](double t) { return std::exp(-z * std::cosh(t)) * std::cosh(nu * t); },
                        tmax, 1e-3);
}

/// Root of f on [lo, hi] by bisection (f(lo), f(hi) of opposite sign).
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// zeta(alpha) by partial summation to n terms plus the integral of the remainder and the
/// first trapezoid correction.
inline double zeta_partial(double alpha, long n) {
  double s = 0.0;
  for (long i = n; i >= 1; --i) s += std::pow(static_cast<double>(i), -alpha);
  const double nn = static_cast<double>(n);
  return s + std::pow(nn, 1.0 - alpha) / (alpha - 1.0) - 0.5 * std::pow(nn, -alpha);
}

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson(double successes, double n, double z) {
  const double p = successes / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {centre - half, centre + half};
}

}  // namespace oracle

#endif  // PHASEMIX_TESTS_ORACLES_HPP
