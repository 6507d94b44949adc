#ifndef PHASEMIX_SPECIAL_FUNCTIONS_HPP
#define PHASEMIX_SPECIAL_FUNCTIONS_HPP

namespace phasemix {

/// Numerical settings shared by the special functions.
///
/// `asymptotic_switch` is the argument above which the modified Bessel function
/// is evaluated by Steed's continued fraction instead of Temme's series, and the
/// smallest argument accepted by the large-argument derivative form.
struct SpecialFnPolicy {
  int series_terms = 1000;
  double asymptotic_switch = 2.0;
  double tolerance = 1e-16;

  void validate() const;
};

/// Modified Bessel function of the second kind K_nu(z), real order, z > 0.
double bessel_k(double nu, double z, const SpecialFnPolicy& policy = {});

/// Exponentially scaled e^z K_nu(z); finite for arguments where K_nu underflows.
double bessel_k_scaled(double nu, double z, const SpecialFnPolicy& policy = {});

/// log K_nu(z) without underflow.
double log_bessel_k(double nu, double z, const SpecialFnPolicy& policy = {});

/// Large-z form shared by K_nu and all of its derivatives:
/// d^n/dz^n K_nu(z) ~ (-1)^n sqrt(pi / 2z) e^{-z}.
double bessel_k_derivative_asymptotic(int n, double nu, double z,
                                      const SpecialFnPolicy& policy = {});

/// Principal branch W_0 of the Lambert W function, x >= -1/e.
double lambert_w(double x);

double gamma_fn(double a);
double log_gamma_fn(double a);

/// Riemann zeta for real alpha > 1.
double riemann_zeta(double alpha);

/// Hurwitz zeta sum_{n>=0} (a+n)^{-alpha}, alpha > 1, a > 0.
double hurwitz_zeta(double alpha, double a);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gamma_q(double a, double x);

/// log Q(a, x), accurate when Q underflows.
double log_gamma_q(double a, double x);

/// Standard normal upper tail P(Z > z) and its logarithm.
double normal_tail(double z);
double log_normal_tail(double z);

}  // namespace phasemix

#endif  // PHASEMIX_SPECIAL_FUNCTIONS_HPP
