#ifndef PHASEMIX_QUADRATURE_HPP
#define PHASEMIX_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "phasemix/error.hpp"

namespace phasemix {

/// A real number stored as sign * exp(log_abs); zero is sign == 0.
struct SignedLog {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static SignedLog from_value(double v) {
    if (v == 0.0 || std::isnan(v)) return {};
    return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
  }
  static SignedLog positive(double log_value) {
    if (log_value == -std::numeric_limits<double>::infinity()) return {};
    return {log_value, 1};
  }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
  bool is_zero() const { return sign == 0; }
};

/// Running sum of SignedLog terms without overflow or underflow.
class LogSum {
 public:
  void add(const SignedLog& v) {
    if (v.sign == 0) return;
    if (v.log_abs > scale_) {
      sum_ = sum_ * std::exp(scale_ - v.log_abs) + v.sign;
      scale_ = v.log_abs;
    } else {
      sum_ += v.sign * std::exp(v.log_abs - scale_);
    }
  }
  SignedLog result() const {
    SignedLog out = SignedLog::from_value(sum_);
    if (out.sign != 0) out.log_abs += scale_;
    return out;
  }

 private:
  double scale_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  int max_subdivisions = 64;
  int max_level = 8;
  // Integration range extends until the integrand falls this many e-folds below its peak.
  double log_drop = 42.0;
  int scan_points = 256;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_value = 0.0;  // integral of |f|, used to scale the error test under cancellation
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

template <class F>
QuadratureResult tanh_sinh_level_sweep(F& f, double a, double b, const QuadratureOptions& opt,
                                       bool& converged) {
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  constexpr double kTMax = 3.6;
  const double half = 0.5 * (b - a);
  const double centre = 0.5 * (a + b);
  QuadratureResult r;

  // Accumulates weighted samples at t; endpoint distances use the complementary form
  // 1 - tanh(u) = 2 / (e^{2u} + 1) so abscissas hug the endpoints without cancellation.
  auto sample = [&](double t, double& sum, double& abs_sum) {
    const double u = kHalfPi * std::sinh(t);
    const double cu = std::cosh(u);
    const double w = kHalfPi * std::cosh(t) / (cu * cu);
    if (w < 1e-300) return;
    const double dist = half * 2.0 / (std::exp(2.0 * std::abs(u)) + 1.0);
    double x;
    if (t < 0.0) {
      x = a + dist;
    } else if (t > 0.0) {
      x = b - dist;
    } else {
      x = centre;
    }
    if (!(x > a && x < b) && !(t == 0.0)) return;
    const double fx = f(x);
    ++r.evaluations;
    sum += w * fx;
    abs_sum += w * std::abs(fx);
  };

  double sum = 0.0;
  double abs_sum = 0.0;
  sample(0.0, sum, abs_sum);
  for (double t = 1.0; t <= kTMax; t += 1.0) {
    sample(t, sum, abs_sum);
    sample(-t, sum, abs_sum);
  }
  double h = 1.0;
  double estimate = half * h * sum;
  converged = false;
  for (int level = 1; level <= opt.max_level; ++level) {
    h *= 0.5;
    for (double t = h; t <= kTMax; t += 2.0 * h) {
      sample(t, sum, abs_sum);
      sample(-t, sum, abs_sum);
    }
    const double next = half * h * sum;
    const double abs_next = half * h * abs_sum;
    r.error = std::abs(next - estimate);
    estimate = next;
    r.abs_value = abs_next;
    if (level >= 3 && r.error <= opt.rel_tol * std::abs(next) + 1e-15 * abs_next) {
      converged = true;
      break;
    }
    if (level >= 3 && abs_next == 0.0) {
      converged = true;
      break;
    }
  }
  r.value = estimate;
  return r;
}

template <class F>
QuadratureResult tanh_sinh_adaptive(F& f, double a, double b, const QuadratureOptions& opt,
                                    int& budget) {
  bool converged = false;
  QuadratureResult r = tanh_sinh_level_sweep(f, a, b, opt, converged);
  if (converged) return r;
  if (budget <= 0) {
    throw Error(ErrorCode::QuadratureNonconvergence,
                "tanh-sinh quadrature exhausted its subdivision budget");
  }
  --budget;
  const double mid = 0.5 * (a + b);
  QuadratureResult left = tanh_sinh_adaptive(f, a, mid, opt, budget);
  QuadratureResult right = tanh_sinh_adaptive(f, mid, b, opt, budget);
  QuadratureResult out;
  out.value = left.value + right.value;
  out.abs_value = left.abs_value + right.abs_value;
  out.error = left.error + right.error;
  out.evaluations = r.evaluations + left.evaluations + right.evaluations;
  return out;
}

}  // namespace detail

/// Adaptive tanh-sinh quadrature of f over the finite interval [a, b].
template <class F>
QuadratureResult integrate_tanh_sinh(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (!(a < b)) return {};
  int budget = opt.max_subdivisions;
  return detail::tanh_sinh_adaptive(f, a, b, opt, budget);
}

/// Integral of a (possibly sharply peaked) integrand given in log form,
/// f(t) = sign(t) * exp(log_abs(t)), over [domain_lo, domain_hi] (either end may be infinite).
///
/// The peak of |f| is located by a scan over the finite search window followed by a
/// golden-section refinement; the range is then extended on both sides until |f| has
/// dropped `log_drop` e-folds, and each side of the peak is integrated with tanh-sinh
/// after dividing out the peak value. The result is returned in log form, so integrals
/// far below the double range are representable.
template <class F>
SignedLog integrate_log_peaked(F&& log_f, double domain_lo, double domain_hi, double window_lo,
                               double window_hi, const QuadratureOptions& opt = {},
                               int* evaluations = nullptr, double* peak_location = nullptr) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  window_lo = std::max(window_lo, domain_lo);
  window_hi = std::min(window_hi, domain_hi);
  if (!(window_lo < window_hi)) {
    if (std::isfinite(domain_lo) && std::isfinite(domain_hi) && domain_lo < domain_hi) {
      window_lo = domain_lo;
      window_hi = domain_hi;
    } else {
      return {};
    }
  }
  int evals = 0;
  auto logabs = [&](double t) {
    ++evals;
    const SignedLog v = log_f(t);
    return v.sign == 0 ? kNegInf : v.log_abs;
  };

  // Coarse scan of log|f| over the window.
  const int n = std::max(opt.scan_points, 8);
  std::vector<double> grid(n), vals(n);
  int best = -1;
  for (int i = 0; i < n; ++i) {
    grid[i] = window_lo + (window_hi - window_lo) * i / (n - 1);
    vals[i] = logabs(grid[i]);
    if (vals[i] > kNegInf && (best < 0 || vals[i] > vals[best])) best = i;
  }
  if (best < 0) {
    if (evaluations) *evaluations += evals;
    return {};
  }

  // Golden-section refinement of the peak inside the neighbouring cells.
  double lo = grid[std::max(best - 1, 0)];
  double hi = grid[std::min(best + 1, n - 1)];
  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = logabs(c);
  double fd = logabs(d);
  for (int it = 0; it < 80 && (hi - lo) > 1e-13 * (1.0 + std::abs(lo)); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = logabs(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = logabs(d);
    }
  }
  double peak_t = grid[best];
  double peak_log = vals[best];
  for (double cand : {c, d}) {
    const double v = logabs(cand);
    if (v > peak_log) {
      peak_log = v;
      peak_t = cand;
    }
  }
  const double cutoff = peak_log - opt.log_drop;
  if (peak_location) *peak_location = peak_t;

  // Initial step from the local curvature of log|f|.
  double step = (window_hi - window_lo) / (n - 1);
  {
    const double eps = std::max(1e-6, 1e-6 * std::abs(peak_t));
    const double fm = logabs(std::max(peak_t - eps, domain_lo));
    const double fp = logabs(std::min(peak_t + eps, domain_hi));
    const double curv = (fp - 2.0 * peak_log + fm) / (eps * eps);
    if (std::isfinite(curv) && curv < 0.0) step = std::min(step, 1.0 / std::sqrt(-curv));
  }

  // Extend outwards until the integrand is negligible, also covering every scanned point
  // that is still above the cutoff.
  auto extend = [&](double direction, double bound) {
    double t = peak_t;
    double s = step;
    for (int it = 0; it < 200; ++it) {
      double next = t + direction * s;
      if ((direction < 0 && next <= bound) || (direction > 0 && next >= bound)) return bound;
      t = next;
      if (logabs(t) < cutoff) return t;
      s *= 1.6;
    }
    return t;
  };
  double a = extend(-1.0, domain_lo);
  double b = extend(1.0, domain_hi);
  for (int i = 0; i < n; ++i) {
    if (vals[i] >= cutoff) {
      a = std::min(a, std::max(grid[i] - (grid[1] - grid[0]), domain_lo));
      b = std::max(b, std::min(grid[i] + (grid[1] - grid[0]), domain_hi));
    }
  }
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::QuadratureNonconvergence,
                "integrand does not decay inside the representable range");
  }

  auto scaled = [&](double t) {
    ++evals;
    const SignedLog v = log_f(t);
    if (v.sign == 0) return 0.0;
    return v.sign * std::exp(v.log_abs - peak_log);
  };
  QuadratureResult left = integrate_tanh_sinh(scaled, a, peak_t, opt);
  QuadratureResult right = integrate_tanh_sinh(scaled, peak_t, b, opt);
  if (evaluations) *evaluations += evals;
  const double total = left.value + right.value;
  if (!std::isfinite(total)) {
    throw Error(ErrorCode::QuadratureNonconvergence, "non-finite quadrature result");
  }
  SignedLog out = SignedLog::from_value(total);
  if (out.sign != 0) out.log_abs += peak_log;
  return out;
}

}  // namespace phasemix

#endif  // PHASEMIX_QUADRATURE_HPP
