#include "phasemix/mixture.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "phasemix/error.hpp"
#include "phasemix/special_functions.hpp"

namespace phasemix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double peak_rate(const TailKernel& k) {
  if (k.spectral()) return k.spectral()->dominant.rate;
  return 1.0 / ph_moment(k.phase_type(), 1);
}

}  // namespace

void MixturePolicy::validate() const {
  if (!(quad_rel_tol > 0.0) || !(series_tol > 0.0) || max_subdivisions < 1 || max_terms < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "policy tolerances must be > 0 and subdivision/term limits >= 1");
  }
}

ExpectationPolicy MixturePolicy::expectation() const {
  ExpectationPolicy p;
  p.rel_tol = quad_rel_tol;
  p.max_subdivisions = max_subdivisions;
  p.series_tol = series_tol;
  p.max_terms = max_terms;
  return p;
}

MixtureModel::MixtureModel(PhaseTyped g, Scaler h, MixturePolicy policy)
    : kernel_(std::move(g)), h_(std::move(h)), policy_(policy), dominant_rate_(peak_rate(kernel_)) {
  policy_.validate();
}

ExpectationResult mixture_tail_derivative(const MixtureModel& m, int order, double x) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  if (!std::isfinite(x) || x < 0.0 || (order > 0 && x == 0.0)) {
    throw Error(ErrorCode::DomainError, "mixture evaluation requires finite x > 0");
  }
  if (order == 0 && x == 0.0) {
    ExpectationResult r;
    r.value = {0.0, 1};
    return r;
  }
  const TailKernel& k = m.kernel();
  auto log_phi = [&](double s) -> SignedLog {
    SignedLog v = k.log_tail_derivative(order, x / s);
    if (v.sign != 0) v.log_abs -= order * std::log(s);
    return v;
  };
  return scaler_expectation(m.scaler(), log_phi, x * m.dominant_rate(), m.policy().expectation());
}

double mixture_log_tail(const MixtureModel& m, double x) {
  const SignedLog v = mixture_tail_derivative(m, 0, x).value;
  return v.sign > 0 ? std::min(v.log_abs, 0.0) : kNegInf;
}

double mixture_tail(const MixtureModel& m, double x) { return std::exp(mixture_log_tail(m, x)); }

double mixture_log_density(const MixtureModel& m, double x) {
  const SignedLog v = mixture_tail_derivative(m, 1, x).value;
  return v.sign < 0 ? v.log_abs : kNegInf;
}

double mixture_density(const MixtureModel& m, double x) { return std::exp(mixture_log_density(m, x)); }

double mixture_moment(const MixtureModel& m, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "moment order must be >= 1");
  const double hs = scaler_moment(m.scaler(), n);
  if (std::isinf(hs)) return kInf;
  return ph_moment(m.phase_type(), n) * hs;
}

std::vector<double> mixture_sample(const MixtureModel& m, std::uint64_t seed, std::size_t count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  std::seed_seq seq_y{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0u};
  std::seed_seq seq_s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 1u};
  std::mt19937_64 rng_y(seq_y);
  std::mt19937_64 rng_s(seq_s);
  std::vector<double> y = ph_sample(m.phase_type(), rng_y, count);
  const std::vector<double> s = scaler_sample(m.scaler(), rng_s, count);
  for (std::size_t i = 0; i < count; ++i) y[i] *= s[i];
  return y;
}

SeriesBounds series_bounds(const LogSummand& log_g, double scan_lo, double scan_hi) {
  if (!(scan_lo > 0.0) || !(scan_hi > scan_lo)) {
    throw Error(ErrorCode::InvalidArgument, "series_bounds scan range must satisfy 0 < lo < hi");
  }
  auto logv = [&](double y) {
    const SignedLog v = log_g(y);
    if (v.sign < 0) {
      throw Error(ErrorCode::InvalidArgument, "series_bounds needs a nonnegative summand");
    }
    return v.sign == 0 ? kNegInf : v.log_abs;
  };

  constexpr int kScan = 256;
  const double tlo = std::log(scan_lo);
  const double thi = std::log(scan_hi);
  std::vector<double> vals(kScan);
  for (int i = 0; i < kScan; ++i) vals[i] = logv(std::exp(tlo + (thi - tlo) * i / (kScan - 1)));
  int maxima = 0;
  for (int i = 1; i + 1 < kScan; ++i) {
    const double slack = 1e-12 * std::max(1.0, std::abs(vals[i]));
    if (vals[i] > kNegInf && vals[i] > vals[i - 1] + slack && vals[i] >= vals[i + 1]) ++maxima;
  }
  if (maxima >= 2) {
    throw Error(ErrorCode::UnimodalityCheckFailed,
                "summand has " + std::to_string(maxima) + " local maxima on the scan grid");
  }

  SeriesBounds b;
  auto in_t = [&](double t) {
    SignedLog v = log_g(std::exp(t));
    if (v.sign != 0) v.log_abs += t;
    return v;
  };
  QuadratureOptions opt;
  opt.rel_tol = 1e-12;
  double peak_t = 0.0;
  const SignedLog total = integrate_log_peaked(in_t, kNegInf, kInf, tlo, thi, opt, nullptr, &peak_t);
  if (total.sign == 0) return b;  // g vanishes on the scan range

  // Peak of g itself (the integrand above carries the extra Jacobian factor y).
  double best_t = tlo;
  double best = kNegInf;
  for (int i = 0; i < kScan; ++i) {
    if (vals[i] > best) {
      best = vals[i];
      best_t = tlo + (thi - tlo) * i / (kScan - 1);
    }
  }
  const double cell = (thi - tlo) / (kScan - 1);
  double lo = best_t - cell;
  double hi = best_t + cell;
  constexpr double kInvPhi = 0.6180339887498949;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double c = hi - kInvPhi * (hi - lo);
    const double d = lo + kInvPhi * (hi - lo);
    if (logv(std::exp(c)) > logv(std::exp(d))) {
      hi = d;
    } else {
      lo = c;
    }
  }
  const double y_hat = std::exp(0.5 * (lo + hi));
  b.peak_location = y_hat;
  b.peak_value = std::exp(std::max(logv(y_hat), best));
  b.integral_value = total.value();

  if (y_hat <= 1.0) {
    b.boundary_peak = true;
    const SignedLog from_one = integrate_log_peaked(in_t, 0.0, kInf, 0.0, thi, opt);
    b.lower = from_one.value();
    b.upper = b.lower + std::exp(logv(1.0));
  } else {
    b.lower = b.integral_value - b.peak_value;
    b.upper = b.integral_value + b.peak_value;
  }
  return b;
}

LogSummand zipf_summand(double alpha, int k, double rate, double x) {
  return [=](double y) { return SignedLog::positive(-(alpha + k) * std::log(y) - rate * x / y); };
}

LogSummand geometric_summand(double q, int k, double rate, double x) {
  const double lq = std::log(q);
  return [=](double y) { return SignedLog::positive(-rate * x / y + y * lq - k * std::log(y)); };
}

SeriesBounds mixture_series_bounds(const MixtureModel& m, double x) {
  const Scaler& h = m.scaler();
  if (!std::holds_alternative<ZipfScaler>(h.family()) &&
      !std::holds_alternative<GeometricScaler>(h.family())) {
    throw Error(ErrorCode::InvalidArgument, "series bounds apply to zipf and geometric scalers, not " + h.name());
  }
  if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "series bounds require x > 0");
  const TailKernel& k = m.kernel();
  // p(y) continued to all y > 0 by the same formula as on the integers.
  double log_norm = 0.0;
  double a = 0.0;
  double b = 0.0;
  if (const auto* z = std::get_if<ZipfScaler>(&h.family())) {
    log_norm = -std::log(riemann_zeta(z->alpha));
    a = -z->alpha;
  } else {
    const auto& g = std::get<GeometricScaler>(h.family());
    log_norm = std::log(g.p) - std::log1p(-g.p);
    b = std::log1p(-g.p);
  }
  auto log_g = [&](double y) -> SignedLog {
    SignedLog v = k.log_tail_derivative(0, x / y);
    if (v.sign != 0) v.log_abs += log_norm + a * std::log(y) + b * y;
    return v;
  };
  return series_bounds(log_g, 1e-6, std::max(1e12, 1e6 * x * m.dominant_rate()));
}

}  // namespace phasemix
