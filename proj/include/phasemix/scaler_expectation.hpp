#ifndef PHASEMIX_SCALER_EXPECTATION_HPP
#define PHASEMIX_SCALER_EXPECTATION_HPP

// Template body of scaler_expectation; included from scaler.hpp.

#include <cmath>
#include <limits>
#include <string>

#include "phasemix/error.hpp"

namespace phasemix {

namespace detail {

inline SignedLog signed_sum(const SignedLog& a, double b_log) {
  if (a.sign == 0) return {};
  return {a.log_abs + b_log, a.sign};
}

template <class LogPhi>
ExpectationResult infinite_series(const Scaler& h, LogPhi& log_phi, const ExpectationPolicy& policy) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  auto term = [&](double y) { return signed_sum(log_phi(y), scaler_log_pmf(h, y)); };

  ExpectationResult out;
  LogSum acc;
  double prev = kNegInf;
  double prev2 = kNegInf;
  std::size_t next_check = 8;
  for (std::size_t i = 1; i <= policy.max_terms; ++i) {
    const double y = static_cast<double>(i);
    const SignedLog u = term(y);
    acc.add(u);
    const double cur = u.sign == 0 ? kNegInf : u.log_abs;
    // |u| decreasing and convex over i-2, i-1, i.
    const bool convex_tail = cur < prev && prev < prev2 && cur > kNegInf &&
                             std::exp(prev2 - prev) - 1.0 >= 1.0 - std::exp(cur - prev);
    if (i >= next_check && convex_tail) {
      const SignedLog partial = acc.result();
      // Replacing sum_{j>i} u(j) by the integral over [i + 1/2, inf) is a midpoint rule on a
      // convex decreasing tail; its error is at most |u'(i + 1/2)| / 24 <= |u(i-1) - u(i)| / 24.
      const double log_err = prev + std::log1p(-std::exp(cur - prev)) - std::log(24.0);
      if (partial.sign != 0 && log_err <= std::log(policy.series_tol) + partial.log_abs) {
        double peak_t = 0.0;
        const double t0 = std::log(y + 0.5);
        auto tail_integrand = [&](double t) {
          const double yy = std::exp(t);
          return signed_sum(term(yy), t);
        };
        QuadratureOptions qopt;
        qopt.rel_tol = std::max(policy.rel_tol, 1e-12);
        qopt.max_subdivisions = policy.max_subdivisions;
        const SignedLog tail = integrate_log_peaked(tail_integrand, t0,
                                                    std::numeric_limits<double>::infinity(), t0,
                                                    t0 + 40.0, qopt, &out.evaluations, &peak_t);
        if (peak_t <= t0 + 1e-9 * (1.0 + std::abs(t0)) || tail.sign == 0) {
          acc.add(tail);
          out.value = acc.result();
          out.terms = i;
          out.remainder_bound =
              out.value.sign == 0 ? 0.0 : std::exp(log_err - out.value.log_abs);
          return out;
        }
        next_check = 2 * i;
      }
    }
    prev2 = prev;
    prev = cur;
  }
  throw Error(ErrorCode::TruncationBoundViolated,
              "series for " + h.name() + " did not certify its remainder within " +
                  std::to_string(policy.max_terms) + " terms");
}

}  // namespace detail

template <class LogPhi>
ExpectationResult scaler_expectation(const Scaler& h, LogPhi&& log_phi, double centre,
                                     const ExpectationPolicy& policy) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ExpectationResult out;
  const std::vector<Atom> atoms = scaler_atoms(h);
  if (!atoms.empty()) {
    LogSum acc;
    for (const Atom& a : atoms) {
      if (a.prob > 0.0) acc.add(detail::signed_sum(log_phi(a.point), std::log(a.prob)));
    }
    out.value = acc.result();
    out.terms = atoms.size();
    return out;
  }
  if (h.kind() == ScalerKind::Discrete) return detail::infinite_series(h, log_phi, policy);

  const Support sup = h.support();
  const double lo = sup.lower > 0.0 ? std::log(sup.lower) : -kInf;
  const double hi = std::isfinite(sup.upper) ? std::log(sup.upper) : kInf;
  const double typical = std::log(scaler_typical_scale(h));
  const double c = centre > 0.0 && std::isfinite(centre) ? std::log(centre) : typical;
  auto integrand = [&](double t) {
    const double s = std::exp(t);
    return detail::signed_sum(log_phi(s), scaler_log_density(h, s) + t);
  };
  QuadratureOptions qopt;
  qopt.rel_tol = policy.rel_tol;
  qopt.max_subdivisions = policy.max_subdivisions;
  out.value = integrate_log_peaked(integrand, lo, hi, std::min(c, typical) - 25.0,
                                   std::max(c, typical) + 25.0, qopt, &out.evaluations);
  return out;
}

}  // namespace phasemix

#endif  // PHASEMIX_SCALER_EXPECTATION_HPP
