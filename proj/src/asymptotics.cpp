#include "phasemix/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "phasemix/error.hpp"
#include "phasemix/grid.hpp"
#include "phasemix/special_functions.hpp"

namespace phasemix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

const SpectralForm& require_spectral(const MixtureModel& m, const char* what) {
  if (!m.kernel().spectral()) {
    throw Error(ErrorCode::ComplexSpectrum, std::string(what) + " needs a real spectral expansion of G");
  }
  return *m.kernel().spectral();
}

// Indices of grid points in the final decade (at least two points when the grid has them).
std::size_t last_decade_start(const std::vector<double>& x) {
  if (x.size() < 2) return 0;
  const double cut = x.back() / 10.0 * (1.0 - 1e-12);
  std::size_t i = x.size() - 1;
  while (i > 0 && x[i - 1] >= cut) --i;
  return std::min(i, x.size() - 2);
}

SignedLog tail_derivative(const MixtureModel& m, int order, double x) {
  if (auto a = analytic_tail_derivative(m, order, x)) return *a;
  return mixture_tail_derivative(m, order, x).value;
}

double log_aux(const MixtureModel& m, double x) {
  const SignedLog t = tail_derivative(m, 0, x);
  const SignedLog d = tail_derivative(m, 1, x);
  if (t.sign <= 0 || d.sign >= 0) return std::numeric_limits<double>::quiet_NaN();
  return t.log_abs - d.log_abs;
}

bool strictly_monotone(const std::vector<double>& v, std::size_t from, int direction) {
  for (std::size_t i = from + 1; i < v.size(); ++i) {
    if (!(direction * (v[i] - v[i - 1]) > 0.0)) return false;
  }
  return v.size() > from + 1;
}

}  // namespace

TailClass classify_tail(const MixtureModel& m) {
  return m.scaler().support().bounded() ? TailClass::Light : TailClass::Heavy;
}

TrendSummary summarize_trend(const std::vector<double>& v, int min_run, double log_threshold) {
  TrendSummary s;
  if (v.empty()) return s;
  s.final_log = v.back();
  s.final_run = 1;
  int direction = 0;
  for (std::size_t i = v.size() - 1; i > 0; --i) {
    const double d = v[i] - v[i - 1];
    const int dir = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (dir == 0 || std::isnan(d) || (direction != 0 && dir != direction)) break;
    direction = dir;
    ++s.final_run;
  }
  if (s.final_run >= min_run) {
    if (direction < 0 && s.final_log < -log_threshold) s.trend = Trend::ToZero;
    if (direction > 0 && s.final_log > log_threshold) s.trend = Trend::ToInfinity;
  }
  return s;
}

std::vector<double> product_evidence_grid() { return geometric_grid(1.0, 1e30, 8); }

ProductEvidenceReport classify_general_mixture(const LogTailFn& log_tail1, const LogTailFn& log_tail2,
                                               const std::function<double(double)>& xi,
                                               const std::vector<double>& thetas,
                                               const std::vector<double>& x_grid) {
  if (thetas.empty() || x_grid.empty()) {
    throw Error(ErrorCode::InvalidArgument, "classify_general_mixture needs theta and x grids");
  }
  ProductEvidenceReport rep;
  rep.x = x_grid;
  std::vector<double> h1(x_grid.size()), h2(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double s = xi(x_grid[i]);
    if (!(s > 0.0)) throw Error(ErrorCode::DomainError, "xi(x) must be positive");
    h1[i] = log_tail1(x_grid[i] / s);
    h2[i] = log_tail2(s);
  }
  rep.heavy_evidence = true;
  for (double theta : thetas) {
    ProductEvidence e;
    e.theta = theta;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      e.log_sum.push_back(theta * x_grid[i] + log_add(h1[i], h2[i]));
      e.log_product.push_back(theta * x_grid[i] + h1[i] + h2[i]);
    }
    e.sum = summarize_trend(e.log_sum);
    e.product = summarize_trend(e.log_product);
    rep.light_evidence = rep.light_evidence || e.sum.trend == Trend::ToZero;
    rep.heavy_evidence = rep.heavy_evidence && e.product.trend == Trend::ToInfinity;
    rep.per_theta.push_back(std::move(e));
  }
  return rep;
}

TailClass weibull_condition(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw Error(ErrorCode::DomainError, "Weibull shapes must be > 0");
  return 1.0 / p + 1.0 / q < 1.0 ? TailClass::Light : TailClass::Heavy;
}

double weibull_split_exponent(double p, double q) {
  double lo = 1.0 / q;
  double hi = 1.0 - 1.0 / p;
  if (weibull_condition(p, q) == TailClass::Heavy) std::swap(lo, hi);
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  if (hi <= lo) return std::clamp(1.0 / q, 0.0, 1.0);
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

std::string_view to_string(AsymptoteKind kind) {
  switch (kind) {
    case AsymptoteKind::BreimanPower: return "breiman_power";
    case AsymptoteKind::ParetoExact: return "pareto_exact";
    case AsymptoteKind::ZipfPower: return "zipf_power";
    case AsymptoteKind::BesselStretched: return "bessel_stretched";
    case AsymptoteKind::LognormalGumbel: return "lognormal_gumbel";
  }
  return "unknown";
}

bool AsymptoteForm::has_constant(std::string_view name) const {
  return std::any_of(constants.begin(), constants.end(), [&](const NamedConstant& c) { return c.name == name; });
}

double AsymptoteForm::constant(std::string_view name) const {
  for (const auto& c : constants) {
    if (c.name == name) return c.value;
  }
  throw Error(ErrorCode::InvalidArgument, "asymptote has no constant '" + std::string(name) + "'");
}

double AsymptoteForm::log_value(double x) const {
  if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "asymptote requires x > 0");
  switch (kind) {
    case AsymptoteKind::BreimanPower:
      if (!scaler) throw Error(ErrorCode::InvalidArgument, "breiman asymptote without a scaler");
      return std::log(constant("M")) + scaler_log_tail(*scaler, x);
    case AsymptoteKind::ParetoExact:
      return std::log(constant("C")) - constant("alpha") * std::log(x);
    case AsymptoteKind::ZipfPower:
      return std::log(constant("C")) - constant("index") * std::log(x);
    case AsymptoteKind::BesselStretched:
      return std::log(constant("coef")) + constant("power") * std::log(x) +
             log_bessel_k(std::abs(constant("nu")), constant("b") * std::sqrt(x));
    case AsymptoteKind::LognormalGumbel: {
      const double eta = constant("eta");
      const double lambda = constant("lambda");
      const ReciprocalLaplace rl(lognormal_scaler(constant("sigma")));
      return std::log(constant("c")) + (eta - 1.0) * std::log(x / lambda) +
             *rl.log_asymptotic_derivative(static_cast<int>(eta) - 1, lambda * x);
    }
  }
  return kNegInf;
}

double AsymptoteForm::value(double x) const { return std::exp(log_value(x)); }

AsymptoteForm zipf_asymptote(const PhaseTyped& g, double alpha) {
  if (!(alpha >= 2.0)) {
    throw Error(ErrorCode::DomainError, "zipf asymptote requires alpha >= 2, got " + std::to_string(alpha));
  }
  const SpectralForm sf = ph_spectral(g);
  const double zeta = riemann_zeta(alpha);
  double c = 0.0;
  for (const auto& t : sf.terms) {
    for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
      const double a = alpha + static_cast<double>(k) - 1.0;
      c += t.coeffs[k] * std::exp(log_gamma_fn(a) - a * std::log(t.rate));
    }
  }
  c /= zeta;
  AsymptoteForm f;
  f.kind = AsymptoteKind::ZipfPower;
  f.constants = {{"C", c},
                 {"index", alpha - 1.0},
                 {"alpha", alpha},
                 {"zeta", zeta},
                 {"C_breiman", ph_fractional_moment(g, alpha - 1.0) / ((alpha - 1.0) * zeta)}};
  return f;
}

AsymptoteForm frechet_asymptote(const MixtureModel& m) {
  const auto index = scaler_tail_index(m.scaler());
  if (!index) {
    throw Error(ErrorCode::NotRegularlyVarying, m.scaler().name() + " is not regularly varying");
  }
  const ScalerFamily& fam = m.scaler().family();
  if (const auto* z = std::get_if<ZipfScaler>(&fam)) return zipf_asymptote(m.phase_type(), z->alpha);

  const double alpha = *index;
  const double moment = ph_fractional_moment(m.phase_type(), alpha);
  AsymptoteForm f;
  if (std::holds_alternative<ParetoScaler>(fam)) {
    f.kind = AsymptoteKind::ParetoExact;
    f.constants = {{"C", moment}, {"alpha", alpha}};
    if (const auto& sf = m.kernel().spectral()) {
      double c = 0.0;
      for (const auto& t : sf->terms) {
        for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
          const double a = alpha + static_cast<double>(k);
          c += t.coeffs[k] * alpha * std::exp(log_gamma_fn(a) - a * std::log(t.rate));
        }
      }
      f.constants.push_back({"C_spectral", c});
    }
  } else {
    f.kind = AsymptoteKind::BreimanPower;
    f.constants = {{"M", moment}, {"alpha", alpha}};
    f.scaler = m.scaler();
  }
  return f;
}

AsymptoteForm geometric_asymptote(const MixtureModel& m, double calibration_x) {
  const auto* geo = std::get_if<GeometricScaler>(&m.scaler().family());
  if (!geo) throw Error(ErrorCode::InvalidArgument, "geometric asymptote needs a geometric scaler");
  const DominantTerm& d = require_spectral(m, "geometric asymptote").dominant;
  const double p = geo->p;
  const double q = 1.0 - p;
  const double lq = std::abs(std::log(q));
  const double eta = d.eta;
  AsymptoteForm f;
  f.kind = AsymptoteKind::BesselStretched;
  f.constants = {{"coef", 2.0 * p * std::pow(lq / d.rate, 0.5 * (eta - 2.0))},
                 {"power", 0.5 * eta},
                 {"nu", eta - 2.0},
                 {"b", 2.0 * std::sqrt(d.rate * lq)}};
  const double log_c = mixture_log_tail(m, calibration_x) - f.log_value(calibration_x);
  f.constants[0].value *= std::exp(log_c);
  f.constants.push_back({"c", std::exp(log_c)});
  f.constants.push_back({"c_nominal", d.gamma / q});
  f.constants.push_back({"p", p});
  f.constants.push_back({"eta", eta});
  f.constants.push_back({"lambda", d.rate});
  f.calibrated = true;
  f.calibration_x = calibration_x;
  return f;
}

AsymptoteForm exponential_asymptote(const MixtureModel& m) {
  const auto* e = std::get_if<ExponentialScaler>(&m.scaler().family());
  if (!e) throw Error(ErrorCode::InvalidArgument, "exponential asymptote needs an exponential scaler");
  const DominantTerm& d = require_spectral(m, "exponential asymptote").dominant;
  const double beta = e->rate;
  const double eta = d.eta;
  AsymptoteForm f;
  f.kind = AsymptoteKind::BesselStretched;
  f.constants = {{"coef", 2.0 * beta * d.gamma * std::pow(d.rate / beta, 0.5 * (2.0 - eta))},
                 {"power", 0.5 * eta},
                 {"nu", eta - 2.0},
                 {"b", 2.0 * std::sqrt(beta * d.rate)},
                 {"gamma", d.gamma},
                 {"beta", beta},
                 {"eta", eta},
                 {"lambda", d.rate}};
  return f;
}

AsymptoteForm lognormal_asymptote(const MixtureModel& m, double calibration_x) {
  const auto* ln = std::get_if<LognormalScaler>(&m.scaler().family());
  if (!ln) throw Error(ErrorCode::InvalidArgument, "lognormal asymptote needs a lognormal scaler");
  const DominantTerm& d = require_spectral(m, "lognormal asymptote").dominant;
  AsymptoteForm f;
  f.kind = AsymptoteKind::LognormalGumbel;
  f.constants = {{"c", 1.0}, {"eta", static_cast<double>(d.eta)}, {"lambda", d.rate}, {"sigma", ln->sigma}};
  const double c = std::exp(mixture_log_tail(m, calibration_x) - f.log_value(calibration_x));
  f.constants[0].value = c;
  f.constants.push_back({"c_nominal", d.gamma * std::pow(d.rate, d.eta - 1)});
  f.calibrated = true;
  f.calibration_x = calibration_x;
  return f;
}

// ---------------------------------------------------------------------------

std::string_view to_string(RatioTrend trend) {
  switch (trend) {
    case RatioTrend::Converges: return "converges";
    case RatioTrend::Diverges: return "diverges";
    case RatioTrend::Vanishes: return "vanishes";
    case RatioTrend::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Frechet: return "frechet";
    case DomainKind::Gumbel: return "gumbel";
    case DomainKind::Undetermined: return "undetermined";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Undetermined: return "undetermined";
  }
  return "unknown";
}

RatioTrace tail_ratio_trace(const MixtureModel& m, const LogTailFn& reference_log_tail,
                            const std::vector<double>& x_grid) {
  RatioTrace tr;
  tr.x = x_grid;
  for (double x : x_grid) tr.log_ratio.push_back(mixture_log_tail(m, x) - reference_log_tail(x));
  if (x_grid.size() < 2) return tr;
  const std::size_t from = last_decade_start(x_grid);
  for (std::size_t i = from; i < tr.log_ratio.size(); ++i) {
    if (!std::isfinite(tr.log_ratio[i])) return tr;
  }
  const double move = tr.log_ratio.back() - tr.log_ratio[from];
  const int dir = move > 0.0 ? 1 : -1;
  const bool monotone = strictly_monotone(tr.log_ratio, from, dir);
  // Mean ratio of successive increments; shrinking increments project the remaining movement.
  double r = 1.0;
  double remaining = kInf;
  if (monotone && tr.log_ratio.size() - from >= 3) {
    bool shrinking = true;
    double ratio_sum = 0.0;
    int count = 0;
    for (std::size_t i = from + 2; i < tr.log_ratio.size(); ++i) {
      const double a = tr.log_ratio[i - 1] - tr.log_ratio[i - 2];
      const double b = tr.log_ratio[i] - tr.log_ratio[i - 1];
      shrinking = shrinking && std::abs(b) < std::abs(a);
      ratio_sum += b / a;
      ++count;
    }
    r = ratio_sum / count;
    if (shrinking && r <= 0.95) {
      remaining = (tr.log_ratio.back() - tr.log_ratio[tr.log_ratio.size() - 2]) * r / (1.0 - r);
    }
  }
  if (std::abs(move) < 0.02) {
    tr.trend = RatioTrend::Converges;
    tr.limit_estimate = std::exp(tr.log_ratio.back());
  } else if (std::abs(remaining) < 0.05) {
    tr.trend = RatioTrend::Converges;
    tr.limit_estimate = std::exp(tr.log_ratio.back() + remaining);
  } else if (monotone && std::abs(move) > 0.05 && r >= 0.98) {
    tr.trend = move > 0.0 ? RatioTrend::Diverges : RatioTrend::Vanishes;
  }
  return tr;
}

HeavyTailTrace heavy_tail_trace(const MixtureModel& m, double theta, const std::vector<double>& x_grid) {
  HeavyTailTrace tr;
  tr.theta = theta;
  for (double x : x_grid) tr.log_value.push_back(theta * x + mixture_log_tail(m, x));
  tr.summary = summarize_trend(tr.log_value);
  const std::size_t from = last_decade_start(x_grid);
  tr.increasing_last_decade = strictly_monotone(tr.log_value, from, 1);
  tr.decreasing_last_decade = strictly_monotone(tr.log_value, from, -1);
  return tr;
}

std::optional<SignedLog> analytic_tail_derivative(const MixtureModel& m, int order, double x) {
  const auto& sf = m.kernel().spectral();
  if (!sf || !(x > 0.0)) return std::nullopt;
  const ReciprocalLaplace rl(m.scaler(), m.policy().expectation());
  if (rl.availability() != LaplaceAvailability::ClosedForm) return std::nullopt;
  LogSum sum;
  for (const auto& t : sf->derivative_terms(order)) {
    for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
      if (t.coeffs[k] == 0.0) continue;
      SignedLog term = SignedLog::from_value(t.coeffs[k]);
      term.log_abs += static_cast<double>(k) * std::log(x) +
                      rl.log_abs_derivative(static_cast<int>(k) + order, t.rate * x);
      sum.add(term);
    }
  }
  return sum.result();
}

GumbelTrace gumbel_check(const MixtureModel& m, const std::vector<double>& x_grid, const GumbelPolicy& policy) {
  GumbelTrace tr;
  tr.x = x_grid;
  tr.analytic = analytic_tail_derivative(m, 0, 1.0).has_value();
  for (double x : x_grid) {
    SignedLog d0, d1, d2;
    try {
      d0 = tail_derivative(m, 0, x);
      d1 = tail_derivative(m, 1, x);
      d2 = tail_derivative(m, 2, x);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::QuadratureNonconvergence) throw;
      // Central differences of log F-bar with step x 1e-4.
      const double h = x * 1e-4;
      const double lm = mixture_log_tail(m, x - h), l0 = mixture_log_tail(m, x), lp = mixture_log_tail(m, x + h);
      const double g1 = (lp - lm) / (2 * h);
      const double g2 = (lp - 2 * l0 + lm) / (h * h);
      const double noise = 1e-12 * std::abs(l0) / (h * h * std::abs(g2) + 1e-300);
      if (noise > 1e-2) {
        tr.warnings.push_back("DerivativeNoise: finite-difference R(x) at x = " + std::to_string(x) +
                              " has relative noise " + std::to_string(noise));
      }
      tr.r.push_back(-(g2 + g1 * g1) / (g1 * g1));
      continue;
    }
    if (d0.sign <= 0 || d1.sign == 0 || d2.sign == 0) {
      tr.r.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    // F'' = -(F-bar)'' and (F')^2 = ((F-bar)')^2.
    tr.r.push_back(-d2.sign * std::exp(d0.log_abs + d2.log_abs - 2.0 * d1.log_abs));
  }
  if (tr.r.empty()) return tr;
  std::vector<double> gap;
  for (double r : tr.r) gap.push_back(std::abs(r + 1.0));
  tr.final_gap = gap.back();
  // Gaps at rounding level (exponential-type tails reach R = -1 exactly) count as settled.
  constexpr double kNoise = 1e-10;
  const std::size_t from = last_decade_start(x_grid);
  bool settled = true;
  for (std::size_t i = from; i < gap.size(); ++i) settled = settled && gap[i] < kNoise;
  tr.decreasing_last_decade = settled || strictly_monotone(gap, from, -1);
  if (tr.decreasing_last_decade && tr.final_gap < policy.tolerance) tr.verdict = DomainKind::Gumbel;
  return tr;
}

SubexpReport subexp_check(const MixtureModel& m, const std::vector<double>& t_grid,
                          const std::vector<double>& x_grid, double margin) {
  for (double t : t_grid) {
    if (!(t > 1.0)) throw Error(ErrorCode::InvalidArgument, "subexp_check needs t > 1");
  }
  if (x_grid.size() < 2) throw Error(ErrorCode::InvalidArgument, "subexp_check needs at least two grid points");
  SubexpReport rep;
  rep.margin = margin;
  const std::size_t from = last_decade_start(x_grid);
  rep.x.assign(x_grid.begin() + static_cast<long>(from), x_grid.end());

  const ScalerFamily& fam = m.scaler().family();
  const bool light = classify_tail(m) == TailClass::Light;
  const bool log_rate = std::holds_alternative<LognormalScaler>(fam) || scaler_tail_index(m.scaler()).has_value();
  auto u = [&](double x) { return log_rate ? 1.0 / std::log(x) : 1.0 / std::sqrt(x); };

  std::vector<double> base;
  for (double x : rep.x) base.push_back(log_aux(m, x));
  bool all_above = !light;
  for (double t : t_grid) {
    SubexpEstimate e;
    e.t = t;
    for (std::size_t i = 0; i < rep.x.size(); ++i) e.ratio.push_back(std::exp(log_aux(m, t * rep.x[i]) - base[i]));
    e.raw_min = *std::min_element(e.ratio.begin(), e.ratio.end());
    const double ua = u(rep.x.front()), ub = u(rep.x.back());
    const double ra = e.ratio.front(), rb = e.ratio.back();
    e.estimate = (ua != ub) ? (rb * ua - ra * ub) / (ua - ub) : rb;
    if (light) {
      e.analytic_limit = 1.0;
    } else if (std::holds_alternative<ExponentialScaler>(fam) || std::holds_alternative<GeometricScaler>(fam)) {
      e.analytic_limit = std::sqrt(t);
    } else if (log_rate) {
      e.analytic_limit = t;
    }
    if (!(e.estimate > 1.0 + margin)) all_above = false;
    rep.per_t.push_back(std::move(e));
  }
  rep.verdict = light ? Verdict::No : (all_above ? Verdict::Yes : Verdict::Undetermined);
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<double> default_diagnostic_grid(const MixtureModel& m) {
  const double unit = scaler_typical_scale(m.scaler()) / m.dominant_rate();
  return geometric_grid(unit, 1e3 * unit, 8);
}

NormingConstants norming_constants(const MdaReport& report, double n) {
  if (report.mda.kind != DomainKind::Frechet || !report.asymptote) {
    throw Error(ErrorCode::NotFrechet, "norming constants need a Frechet report with an asymptote");
  }
  if (!(n > 1.0)) throw Error(ErrorCode::DomainError, "norming constants need n > 1");
  const AsymptoteForm& f = *report.asymptote;
  const double target = -std::log(n);
  // log asymptote is decreasing in log x; bracket then bisect.
  double lo = 0.0, hi = 0.0;
  auto g = [&](double t) { return f.log_value(std::exp(t)) - target; };
  double step = 1.0;
  if (g(0.0) > 0.0) {
    while (g(hi) > 0.0) {
      lo = hi;
      hi += step;
      step *= 2.0;
      if (hi > 700.0) throw Error(ErrorCode::PrecisionLoss, "norming inversion left the double range");
    }
  } else {
    while (g(lo) <= 0.0) {
      hi = lo;
      lo -= step;
      step *= 2.0;
      if (lo < -700.0) throw Error(ErrorCode::PrecisionLoss, "norming inversion left the double range");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  NormingConstants nc;
  nc.n = n;
  nc.c_n = std::exp(0.5 * (lo + hi));
  nc.d_n = 0.0;
  if (f.kind == AsymptoteKind::ZipfPower) {
    nc.display_c_n = std::pow(f.constant("C") / n, 1.0 / f.constant("index"));
  } else if (f.kind == AsymptoteKind::ParetoExact) {
    const double a = f.constant("alpha");
    nc.display_c_n = std::pow(f.constant("C"), 1.0 / a) * std::pow(n, -1.0 / a);
  }
  return nc;
}

std::optional<AsymptoteForm> closed_form_asymptote(const MixtureModel& m, double calibration_x) {
  const ScalerFamily& fam = m.scaler().family();
  if (scaler_tail_index(m.scaler())) return frechet_asymptote(m);
  if (std::holds_alternative<ExponentialScaler>(fam)) return exponential_asymptote(m);
  if (std::holds_alternative<LognormalScaler>(fam)) return lognormal_asymptote(m, calibration_x);
  if (std::holds_alternative<GeometricScaler>(fam)) return geometric_asymptote(m, calibration_x);
  return std::nullopt;
}

MdaReport mda_report(const MixtureModel& m, const MdaOptions& options) {
  MdaReport rep;
  const std::vector<double> grid = options.x_grid.empty() ? default_diagnostic_grid(m) : options.x_grid;
  const Scaler& h = m.scaler();
  const ScalerFamily& fam = h.family();
  rep.tail_class = classify_tail(m);

  if (rep.tail_class == TailClass::Heavy) {
    const std::vector<double> thetas = options.thetas.empty() ? std::vector<double>{0.1, 1.0, 10.0} : options.thetas;
    for (double theta : thetas) rep.heavy_traces.push_back(heavy_tail_trace(m, theta, grid));
  } else if (!options.thetas.empty()) {
    for (double theta : options.thetas) rep.heavy_traces.push_back(heavy_tail_trace(m, theta, grid));
  } else {
    const double theta = 0.5 * m.dominant_rate() / h.support().upper;
    rep.heavy_traces.push_back(heavy_tail_trace(m, theta, grid));
  }

  auto scaler_log_tail_fn = [&h](double x) { return scaler_log_tail(h, x); };
  if (const auto index = scaler_tail_index(h)) {
    rep.mda = {DomainKind::Frechet, *index};
    rep.route = "frechet theorem";
    rep.asymptote = frechet_asymptote(m);
    rep.scaler_trace = tail_ratio_trace(m, scaler_log_tail_fn, grid);
    rep.notes.push_back("gumbel check skipped: domain is Frechet");
    if (*index <= 1.0) {
      rep.notes.push_back("Frechet index " + std::to_string(*index) +
                          " <= 1 lies outside the alpha > 1 range of the Tauberian step");
    }
  } else {
    rep.gumbel = gumbel_check(m, grid);
    const bool example = std::holds_alternative<ExponentialScaler>(fam) ||
                         std::holds_alternative<LognormalScaler>(fam) ||
                         std::holds_alternative<GeometricScaler>(fam);
    if (example) {
      rep.mda = {DomainKind::Gumbel, 0.0};
      rep.route = "gumbel example";
      if (rep.gumbel->verdict != DomainKind::Gumbel) {
        rep.notes.push_back("von Mises trace has not settled on the grid");
      }
    } else {
      rep.mda = {rep.gumbel->verdict, 0.0};
      rep.route = "numeric trace";
    }
    try {
      rep.asymptote = closed_form_asymptote(m, grid.back());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ComplexSpectrum) throw;
      rep.notes.push_back(std::string("no asymptote: ") + e.what());
    }
    if (rep.tail_class == TailClass::Heavy) rep.scaler_trace = tail_ratio_trace(m, scaler_log_tail_fn, grid);
  }

  if (rep.asymptote) {
    const AsymptoteForm f = *rep.asymptote;
    rep.asymptote_trace = tail_ratio_trace(m, [&f](double x) { return f.log_value(x); }, grid);
  }
  if (rep.mda.kind == DomainKind::Frechet && rep.asymptote) {
    for (double n : options.norming_n) rep.norming.push_back(norming_constants(rep, n));
  }
  rep.subexponential = subexp_check(m, options.t_grid, grid);
  return rep;
}

}  // namespace phasemix
