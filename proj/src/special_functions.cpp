#include "phasemix/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "phasemix/error.hpp"

namespace phasemix {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Taylor coefficients of 1/Gamma(z) about z = 0, starting at z^1.
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
};

// Temme's auxiliary quantities for |mu| <= 1/2:
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu),  gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2.
// 1/Gamma(1+mu) = sum_k c_k mu^{k-1}, so odd/even coefficients separate cleanly.
struct TemmeGammas {
  double gam1;
  double gam2;
  double gampl;  // 1/Gamma(1+mu)
  double gammi;  // 1/Gamma(1-mu)
};

TemmeGammas temme_gammas(double mu) {
  double even = 0.0;  // sum of c_{2i+1} mu^{2i}
  double odd = 0.0;   // sum of c_{2i+2} mu^{2i}
  const double mu2 = mu * mu;
  double power = 1.0;
  for (std::size_t k = 0; k + 1 < kRecipGamma.size(); k += 2) {
    even += kRecipGamma[k] * power;
    odd += kRecipGamma[k + 1] * power;
    power *= mu2;
  }
  TemmeGammas g;
  g.gam1 = -odd;
  g.gam2 = even;
  g.gampl = even + mu * odd;
  g.gammi = even - mu * odd;
  return g;
}

struct KPair {
  double k_mu;
  double k_mu1;
};

// K_mu and K_{mu+1} for |mu| <= 1/2 via Temme's series (small z); unscaled.
KPair temme_series(double mu, double z, const SpecialFnPolicy& policy) {
  const double half_z = 0.5 * z;
  const double pimu = kPi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(half_z);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = half_z * half_z;
  double sum1 = p;
  int i = 1;
  for (; i <= policy.series_terms; ++i) {
    const double di = static_cast<double>(i);
    ff = (di * ff + p + q) / (di * di - mu * mu);
    c *= d / di;
    p /= di - mu;
    q /= di + mu;
    const double del = c * ff;
    sum += del;
    const double del1 = c * (p - di * ff);
    sum1 += del1;
    if (std::abs(del) < std::abs(sum) * policy.tolerance) break;
  }
  if (i > policy.series_terms) {
    throw Error(ErrorCode::PrecisionLoss, "bessel_k: Temme series did not converge");
  }
  return {sum, sum1 * 2.0 / z};
}

// e^z K_mu and e^z K_{mu+1} for |mu| <= 1/2 via Steed's continued fraction (large z).
KPair steed_scaled(double mu, double z, const SpecialFnPolicy& policy) {
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 1;
  for (; i <= policy.series_terms; ++i) {
    const double di = static_cast<double>(i);
    a -= 2.0 * di;
    c = -a * c / (di + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < policy.tolerance) break;
  }
  if (i > policy.series_terms) {
    throw Error(ErrorCode::PrecisionLoss, "bessel_k: continued fraction did not converge");
  }
  h *= a1;
  const double k_mu = std::sqrt(kPi / (2.0 * z)) / s;
  const double k_mu1 = k_mu * (mu + z + 0.5 - h) / z;
  return {k_mu, k_mu1};
}

// Returns e^{scale_z} K_nu(z) with scale_z either 0 or z.
double bessel_k_impl(double nu, double z, bool scaled, const SpecialFnPolicy& policy) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw Error(ErrorCode::DomainError, "bessel_k requires finite z > 0, got " + std::to_string(z));
  }
  if (!std::isfinite(nu)) {
    throw Error(ErrorCode::DomainError, "bessel_k requires a finite order");
  }
  policy.validate();
  nu = std::abs(nu);
  const double n_steps = std::floor(nu + 0.5);
  const double mu = nu - n_steps;

  KPair pair{};
  if (z <= policy.asymptotic_switch) {
    pair = temme_series(mu, z, policy);
    if (scaled) {
      const double ez = std::exp(z);
      pair.k_mu *= ez;
      pair.k_mu1 *= ez;
    }
  } else {
    pair = steed_scaled(mu, z, policy);
    if (!scaled) {
      const double emz = std::exp(-z);
      pair.k_mu *= emz;
      pair.k_mu1 *= emz;
    }
  }

  double k_lo = pair.k_mu;
  double k_hi = pair.k_mu1;
  const double two_over_z = 2.0 / z;
  for (int i = 1; i <= static_cast<int>(n_steps); ++i) {
    const double next = (mu + i) * two_over_z * k_hi + k_lo;
    k_lo = k_hi;
    k_hi = next;
  }
  if (!std::isfinite(k_lo)) {
    throw Error(ErrorCode::PrecisionLoss,
                "bessel_k overflow at nu=" + std::to_string(nu) + ", z=" + std::to_string(z));
  }
  return k_lo;
}

}  // namespace

void SpecialFnPolicy::validate() const {
  if (!(tolerance > 0.0) || !(asymptotic_switch > 0.0) || series_terms < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "SpecialFnPolicy requires tolerance > 0, asymptotic_switch > 0, series_terms >= 1");
  }
}

double bessel_k(double nu, double z, const SpecialFnPolicy& policy) {
  return bessel_k_impl(nu, z, false, policy);
}

double bessel_k_scaled(double nu, double z, const SpecialFnPolicy& policy) {
  return bessel_k_impl(nu, z, true, policy);
}

double log_bessel_k(double nu, double z, const SpecialFnPolicy& policy) {
  return std::log(bessel_k_impl(nu, z, true, policy)) - z;
}

double bessel_k_derivative_asymptotic(int n, double /*nu*/, double z, const SpecialFnPolicy& policy) {
  policy.validate();
  if (!(z > policy.asymptotic_switch) || n < 0) {
    throw Error(ErrorCode::DomainError,
                "bessel_k_derivative_asymptotic requires n >= 0 and z above the asymptotic switch");
  }
  const double base = std::sqrt(kPi / (2.0 * z)) * std::exp(-z);
  return (n % 2 == 0) ? base : -base;
}

double lambert_w(double x) {
  constexpr double kBranch = -0.36787944117144232160;  // -1/e
  if (std::isnan(x) || x < kBranch) {
    throw Error(ErrorCode::DomainError, "lambert_w requires x >= -1/e");
  }
  if (x == 0.0) return 0.0;
  if (x == kBranch) return -1.0;
  if (std::isinf(x)) return x;

  double w;
  if (x < -0.25) {
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = std::log1p(x);
    if (x > 0.0) w *= 0.8;
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(w))) break;
  }
  return w;
}

double gamma_fn(double a) {
  if (!(a > 0.0)) {
    throw Error(ErrorCode::DomainError, "gamma_fn requires a > 0");
  }
  return std::tgamma(a);
}

double log_gamma_fn(double a) {
  if (!(a > 0.0)) {
    throw Error(ErrorCode::DomainError, "log_gamma_fn requires a > 0");
  }
  return std::lgamma(a);
}

double riemann_zeta(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::DomainError, "riemann_zeta requires alpha > 1");
  }
  return hurwitz_zeta(alpha, 1.0);
}

double hurwitz_zeta(double alpha, double a) {
  if (!(alpha > 1.0) || !std::isfinite(alpha) || !(a > 0.0)) {
    throw Error(ErrorCode::DomainError, "hurwitz_zeta requires alpha > 1 and a > 0");
  }
  // Direct summation of the first terms plus the Euler-Maclaurin tail through B_16.
  constexpr int kTerms = 16;
  constexpr std::array<double, 8> kBernoulli = {1.0 / 6.0,   -1.0 / 30.0,     1.0 / 42.0, -1.0 / 30.0,
                                                5.0 / 66.0,  -691.0 / 2730.0, 7.0 / 6.0,  -3617.0 / 510.0};
  double sum = 0.0;
  for (int n = kTerms - 1; n >= 0; --n) sum += std::pow(a + n, -alpha);
  const double big_n = a + kTerms;
  sum += std::pow(big_n, 1.0 - alpha) / (alpha - 1.0);
  sum += 0.5 * std::pow(big_n, -alpha);
  // term_k = B_{2k}/(2k)! * alpha (alpha+1) ... (alpha+2k-2) * N^{-alpha-2k+1}
  double rising = alpha;
  double factorial = 2.0;
  double npow = std::pow(big_n, -alpha - 1.0);
  for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
    const double term = kBernoulli[k - 1] / factorial * rising * npow;
    sum += term;
    if (std::abs(term) < kEps * sum) break;
    const double two_k = 2.0 * static_cast<double>(k);
    rising *= (alpha + two_k - 1.0) * (alpha + two_k);
    factorial *= (two_k + 1.0) * (two_k + 2.0);
    npow /= big_n * big_n;
  }
  return sum;
}

namespace {

// Series for P(a,x) scaled: returns sum such that P = sum * exp(-x + a log x - lgamma(a)).
double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) return sum;
  }
  throw Error(ErrorCode::PrecisionLoss, "gamma_q: series did not converge");
}

// Lentz continued fraction for Q(a,x): Q = cf * exp(-x + a log x - lgamma(a)).
double gamma_q_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error(ErrorCode::PrecisionLoss, "gamma_q: continued fraction did not converge");
}

}  // namespace

double log_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x)) {
    throw Error(ErrorCode::DomainError, "gamma_q requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    const double p = gamma_p_series(a, x) * std::exp(log_prefactor);
    return std::log1p(-p);
  }
  return std::log(gamma_q_fraction(a, x)) + log_prefactor;
}

double gamma_q(double a, double x) { return std::exp(log_gamma_q(a, x)); }

double normal_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double log_normal_tail(double z) {
  if (z < 30.0) return std::log(normal_tail(z));
  // Asymptotic Mills ratio expansion; relative error below 1e-12 for z >= 30.
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(z * std::sqrt(2.0 * kPi)) + std::log(series);
}

}  // namespace phasemix
