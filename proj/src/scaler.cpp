#include "phasemix/scaler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "phasemix/error.hpp"
#include "phasemix/special_functions.hpp"

namespace phasemix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidScaler, what); }

void require_positive(double v, const char* field, const char* family) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    bad(std::string(family) + "." + field + " = " + num(v) + ": must be finite and > 0");
  }
}

}  // namespace

bool Support::bounded() const { return std::isfinite(upper); }

ScalerKind Scaler::kind() const {
  return std::visit(Overloaded{
                        [](const ZipfScaler&) { return ScalerKind::Discrete; },
                        [](const GeometricScaler&) { return ScalerKind::Discrete; },
                        [](const FiniteDiscreteScaler&) { return ScalerKind::Discrete; },
                        [](const PointMassScaler&) { return ScalerKind::Discrete; },
                        [](const auto&) { return ScalerKind::Continuous; },
                    },
                    family_);
}

Support Scaler::support() const {
  return std::visit(
      Overloaded{
          [](const ParetoScaler&) { return Support{1.0, kInf}; },
          [](const ZipfScaler&) { return Support{1.0, kInf}; },
          [](const GeometricScaler&) { return Support{1.0, kInf}; },
          [](const FiniteDiscreteScaler& f) {
            double lo = kInf;
            double hi = 0.0;
            for (std::size_t i = 0; i < f.points.size(); ++i) {
              if (f.probs[i] > 0.0) {
                lo = std::min(lo, f.points[i]);
                hi = std::max(hi, f.points[i]);
              }
            }
            return Support{lo, hi};
          },
          [](const PointMassScaler& p) { return Support{p.point, p.point}; },
          [](const auto&) { return Support{0.0, kInf}; },
      },
      family_);
}

std::string Scaler::name() const {
  return std::visit(Overloaded{
                        [](const ExponentialScaler&) { return std::string("exponential"); },
                        [](const ParetoScaler&) { return std::string("pareto"); },
                        [](const LognormalScaler&) { return std::string("lognormal"); },
                        [](const WeibullScaler&) { return std::string("weibull"); },
                        [](const GammaScaler&) { return std::string("gamma"); },
                        [](const ZipfScaler&) { return std::string("zipf"); },
                        [](const GeometricScaler&) { return std::string("geometric"); },
                        [](const FiniteDiscreteScaler&) { return std::string("finite_discrete"); },
                        [](const PointMassScaler&) { return std::string("point_mass"); },
                    },
                    family_);
}

Scaler make_scaler(ScalerFamily family) {
  std::visit(
      Overloaded{
          [](const ExponentialScaler& f) { require_positive(f.rate, "rate", "exponential"); },
          [](const ParetoScaler& f) { require_positive(f.alpha, "alpha", "pareto"); },
          [](const LognormalScaler& f) { require_positive(f.sigma, "sigma", "lognormal"); },
          [](const WeibullScaler& f) {
            require_positive(f.scale, "scale", "weibull");
            require_positive(f.shape, "shape", "weibull");
          },
          [](const GammaScaler& f) {
            require_positive(f.shape, "shape", "gamma");
            require_positive(f.rate, "rate", "gamma");
          },
          [](const ZipfScaler& f) {
            if (!std::isfinite(f.alpha) || !(f.alpha >= 2.0)) {
              bad("zipf.alpha = " + num(f.alpha) + ": Zipf scaling requires alpha >= 2" +
                  (f.alpha > 1.0 && f.alpha < 2.0 ? " (alpha in (1,2) is not supported)" : ""));
            }
          },
          [](const GeometricScaler& f) {
            if (!(f.p > 0.0 && f.p < 1.0)) bad("geometric.p = " + num(f.p) + ": must lie in (0, 1)");
          },
          [](const FiniteDiscreteScaler& f) {
            if (f.points.empty()) bad("finite_discrete.points: must be non-empty");
            if (f.points.size() != f.probs.size()) {
              bad("finite_discrete: points has " + std::to_string(f.points.size()) +
                  " entries but probs has " + std::to_string(f.probs.size()));
            }
            double total = 0.0;
            for (std::size_t i = 0; i < f.points.size(); ++i) {
              if (!(f.points[i] > 0.0) || !std::isfinite(f.points[i])) {
                bad("finite_discrete.points[" + std::to_string(i) + "] = " + num(f.points[i]) +
                    ": must be finite and > 0");
              }
              if (!(f.probs[i] >= 0.0) || !std::isfinite(f.probs[i])) {
                bad("finite_discrete.probs[" + std::to_string(i) + "] = " + num(f.probs[i]) +
                    ": must be finite and >= 0");
              }
              total += f.probs[i];
            }
            if (std::abs(total - 1.0) > 1e-10) {
              bad("finite_discrete.probs sum to " + num(total) + ", not 1");
            }
          },
          [](const PointMassScaler& f) { require_positive(f.point, "point", "point_mass"); },
      },
      family);
  return Scaler(std::move(family));
}

Scaler exponential_scaler(double rate) { return make_scaler(ExponentialScaler{rate}); }
Scaler pareto_scaler(double alpha) { return make_scaler(ParetoScaler{alpha}); }
Scaler lognormal_scaler(double sigma) { return make_scaler(LognormalScaler{sigma}); }
Scaler weibull_scaler(double scale, double shape) { return make_scaler(WeibullScaler{scale, shape}); }
Scaler gamma_scaler(double shape, double rate) { return make_scaler(GammaScaler{shape, rate}); }
Scaler zipf_scaler(double alpha) { return make_scaler(ZipfScaler{alpha}); }
Scaler geometric_scaler(double p) { return make_scaler(GeometricScaler{p}); }
Scaler finite_discrete_scaler(std::vector<double> points, std::vector<double> probs) {
  return make_scaler(FiniteDiscreteScaler{std::move(points), std::move(probs)});
}
Scaler point_mass_scaler(double point) { return make_scaler(PointMassScaler{point}); }

double scaler_log_tail(const Scaler& h, double s) {
  if (std::isnan(s)) throw Error(ErrorCode::DomainError, "scaler_tail at NaN");
  if (s < 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const ExponentialScaler& f) { return -f.rate * s; },
          [&](const ParetoScaler& f) { return s <= 1.0 ? 0.0 : -f.alpha * std::log(s); },
          [&](const LognormalScaler& f) {
            return s == 0.0 ? 0.0 : log_normal_tail(std::log(s) / f.sigma);
          },
          [&](const WeibullScaler& f) { return -std::pow(s / f.scale, f.shape); },
          [&](const GammaScaler& f) { return log_gamma_q(f.shape, f.rate * s); },
          [&](const ZipfScaler& f) {
            if (s < 1.0) return 0.0;
            if (!std::isfinite(s)) return kNegInf;
            return std::log(hurwitz_zeta(f.alpha, std::floor(s) + 1.0)) - std::log(riemann_zeta(f.alpha));
          },
          [&](const GeometricScaler& f) {
            if (s < 1.0) return 0.0;
            return std::floor(s) * std::log1p(-f.p);
          },
          [&](const FiniteDiscreteScaler& f) {
            double t = 0.0;
            for (std::size_t i = 0; i < f.points.size(); ++i) {
              if (f.points[i] > s) t += f.probs[i];
            }
            return t > 0.0 ? std::log(std::min(t, 1.0)) : kNegInf;
          },
          [&](const PointMassScaler& f) { return s < f.point ? 0.0 : kNegInf; },
      },
      h.family());
}

double scaler_tail(const Scaler& h, double s) { return std::exp(scaler_log_tail(h, s)); }

double scaler_log_density(const Scaler& h, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return kNegInf;
  return std::visit(
      Overloaded{
          [&](const ExponentialScaler& f) { return std::log(f.rate) - f.rate * s; },
          [&](const ParetoScaler& f) {
            return s < 1.0 ? kNegInf : std::log(f.alpha) - (f.alpha + 1.0) * std::log(s);
          },
          [&](const LognormalScaler& f) {
            const double z = std::log(s) / f.sigma;
            return -0.5 * z * z - std::log(s * f.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
          },
          [&](const WeibullScaler& f) {
            const double r = s / f.scale;
            return std::log(f.shape / f.scale) + (f.shape - 1.0) * std::log(r) - std::pow(r, f.shape);
          },
          [&](const GammaScaler& f) {
            return f.shape * std::log(f.rate) + (f.shape - 1.0) * std::log(s) - f.rate * s -
                   log_gamma_fn(f.shape);
          },
          [&](const auto&) -> double {
            throw Error(ErrorCode::InvalidArgument, h.name() + " scaler has no density");
          },
      },
      h.family());
}

double scaler_log_pmf(const Scaler& h, double y) {
  return std::visit(Overloaded{
                        [&](const ZipfScaler& f) {
                          if (y < 1.0) return kNegInf;
                          return -f.alpha * std::log(y) - std::log(riemann_zeta(f.alpha));
                        },
                        [&](const GeometricScaler& f) {
                          if (y < 1.0) return kNegInf;
                          return std::log(f.p) + (y - 1.0) * std::log1p(-f.p);
                        },
                        [&](const auto&) -> double {
                          throw Error(ErrorCode::InvalidArgument,
                                      h.name() + " scaler has no series pmf extension");
                        },
                    },
                    h.family());
}

std::vector<Atom> scaler_atoms(const Scaler& h) {
  std::vector<Atom> out;
  if (const auto* f = std::get_if<FiniteDiscreteScaler>(&h.family())) {
    for (std::size_t i = 0; i < f->points.size(); ++i) out.push_back({f->points[i], f->probs[i]});
  } else if (const auto* p = std::get_if<PointMassScaler>(&h.family())) {
    out.push_back({p->point, 1.0});
  }
  return out;
}

double scaler_typical_scale(const Scaler& h) {
  return std::visit(Overloaded{
                        [](const ExponentialScaler& f) { return 1.0 / f.rate; },
                        [](const WeibullScaler& f) { return f.scale; },
                        [](const GammaScaler& f) { return f.shape / f.rate; },
                        [](const PointMassScaler& f) { return f.point; },
                        [](const auto&) { return 1.0; },
                    },
                    h.family());
}

std::optional<double> scaler_tail_index(const Scaler& h) {
  if (const auto* f = std::get_if<ParetoScaler>(&h.family())) return f->alpha;
  // Zipf tail: sum_{i>s} i^{-alpha} / zeta(alpha) ~ s^{1-alpha} / ((alpha-1) zeta(alpha)).
  if (const auto* f = std::get_if<ZipfScaler>(&h.family())) return f->alpha - 1.0;
  return std::nullopt;
}

double scaler_moment(const Scaler& h, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::DomainError, "scaler_moment requires finite alpha > 0");
  }
  return std::visit(
      Overloaded{
          [&](const ExponentialScaler& f) { return gamma_fn(alpha + 1.0) / std::pow(f.rate, alpha); },
          [&](const ParetoScaler& f) { return alpha < f.alpha ? f.alpha / (f.alpha - alpha) : kInf; },
          [&](const LognormalScaler& f) { return std::exp(0.5 * alpha * alpha * f.sigma * f.sigma); },
          [&](const WeibullScaler& f) {
            return std::pow(f.scale, alpha) * gamma_fn(1.0 + alpha / f.shape);
          },
          [&](const GammaScaler& f) {
            return std::exp(log_gamma_fn(f.shape + alpha) - log_gamma_fn(f.shape) -
                            alpha * std::log(f.rate));
          },
          [&](const ZipfScaler& f) {
            return alpha < f.alpha - 1.0 ? riemann_zeta(f.alpha - alpha) / riemann_zeta(f.alpha) : kInf;
          },
          [&](const GeometricScaler&) {
            auto log_phi = [&](double s) { return SignedLog::positive(alpha * std::log(s)); };
            return scaler_expectation(h, log_phi, 1.0).value.value();
          },
          [&](const FiniteDiscreteScaler& f) {
            double m = 0.0;
            for (std::size_t i = 0; i < f.points.size(); ++i) m += f.probs[i] * std::pow(f.points[i], alpha);
            return m;
          },
          [&](const PointMassScaler& f) { return std::pow(f.point, alpha); },
      },
      h.family());
}

std::vector<double> scaler_sample(const Scaler& h, std::mt19937_64& rng, std::size_t count) {
  // Uniform on (0, 1]: 1 - U for U in [0, 1).
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto u01 = [&]() { return 1.0 - unif(rng); };
  std::vector<double> out;
  out.reserve(count);
  std::visit(
      Overloaded{
          [&](const ExponentialScaler& f) {
            for (std::size_t i = 0; i < count; ++i) out.push_back(-std::log(u01()) / f.rate);
          },
          [&](const ParetoScaler& f) {
            for (std::size_t i = 0; i < count; ++i) out.push_back(std::pow(u01(), -1.0 / f.alpha));
          },
          [&](const LognormalScaler& f) {
            std::lognormal_distribution<double> d(0.0, f.sigma);
            for (std::size_t i = 0; i < count; ++i) out.push_back(d(rng));
          },
          [&](const WeibullScaler& f) {
            for (std::size_t i = 0; i < count; ++i) {
              out.push_back(f.scale * std::pow(-std::log(u01()), 1.0 / f.shape));
            }
          },
          [&](const GammaScaler& f) {
            std::gamma_distribution<double> d(f.shape, 1.0 / f.rate);
            for (std::size_t i = 0; i < count; ++i) out.push_back(d(rng));
          },
          [&](const ZipfScaler& f) {
            // Devroye's rejection sampler for the Zipf law.
            const double am1 = f.alpha - 1.0;
            const double b = std::pow(2.0, am1);
            while (out.size() < count) {
              const double u = u01();
              const double v = u01();
              const double x = std::floor(std::pow(u, -1.0 / am1));
              if (!std::isfinite(x) || x < 1.0) continue;
              const double t = std::pow(1.0 + 1.0 / x, am1);
              if (v * x * (t - 1.0) / (b - 1.0) <= t / b) out.push_back(x);
            }
          },
          [&](const GeometricScaler& f) {
            const double lq = std::log1p(-f.p);
            for (std::size_t i = 0; i < count; ++i) {
              out.push_back(1.0 + std::floor(std::log(u01()) / lq));
            }
          },
          [&](const FiniteDiscreteScaler& f) {
            std::vector<double> cum(f.probs.size());
            std::partial_sum(f.probs.begin(), f.probs.end(), cum.begin());
            for (std::size_t i = 0; i < count; ++i) {
              const double u = unif(rng) * cum.back();
              auto it = std::upper_bound(cum.begin(), cum.end(), u);
              if (it == cum.end()) --it;
              out.push_back(f.points[static_cast<std::size_t>(it - cum.begin())]);
            }
          },
          [&](const PointMassScaler& f) { out.assign(count, f.point); },
      },
      h.family());
  return out;
}

std::vector<double> scaler_sample(const Scaler& h, std::uint64_t seed, std::size_t count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  std::mt19937_64 rng(seed);
  return scaler_sample(h, rng, count);
}

ReciprocalLaplace::ReciprocalLaplace(Scaler h, ExpectationPolicy policy)
    : h_(std::move(h)), policy_(policy) {}

LaplaceAvailability ReciprocalLaplace::availability() const {
  return std::holds_alternative<ExponentialScaler>(h_.family()) ? LaplaceAvailability::ClosedForm
                                                                : LaplaceAvailability::Numeric;
}

double ReciprocalLaplace::numeric_log_abs_derivative(int k, double theta) const {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  if (!(theta >= 0.0)) throw Error(ErrorCode::DomainError, "Laplace argument must be >= 0");
  auto log_phi = [&](double s) { return SignedLog::positive(-k * std::log(s) - theta / s); };
  // e^{-theta/s} dH(s) concentrates at s of order sqrt(theta) or larger.
  const double centre = std::max(scaler_typical_scale(h_), std::sqrt(theta));
  const ExpectationResult r = scaler_expectation(h_, log_phi, centre, policy_);
  return r.value.sign == 0 ? kNegInf : r.value.log_abs;
}

double ReciprocalLaplace::log_abs_derivative(int k, double theta) const {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  if (!(theta >= 0.0)) throw Error(ErrorCode::DomainError, "Laplace argument must be >= 0");
  if (const auto* f = std::get_if<ExponentialScaler>(&h_.family())) {
    // E[S^{-k} e^{-theta/S}] = 2 beta (theta/beta)^{(1-k)/2} K_{k-1}(2 sqrt(beta theta)).
    if (theta == 0.0) return k == 0 ? 0.0 : kInf;
    const double beta = f->rate;
    return std::log(2.0 * beta) + 0.5 * (1.0 - k) * std::log(theta / beta) +
           log_bessel_k(k - 1.0, 2.0 * std::sqrt(beta * theta));
  }
  if (theta == 0.0 && k == 0) return 0.0;
  return numeric_log_abs_derivative(k, theta);
}

double ReciprocalLaplace::derivative(int k, double theta) const {
  const double v = std::exp(log_abs_derivative(k, theta));
  return (k % 2 == 0) ? v : -v;
}

LognormalOmega lognormal_omega(int k, double x, double sigma) {
  const double s2 = sigma * sigma;
  const double w = lambert_w(x * s2 * std::exp(k * s2));
  return {w, s2 / (1.0 + w)};
}

std::optional<double> ReciprocalLaplace::log_asymptotic_derivative(int k, double theta) const {
  const auto* f = std::get_if<LognormalScaler>(&h_.family());
  if (f == nullptr) return std::nullopt;
  if (!(theta > 0.0)) throw Error(ErrorCode::DomainError, "asymptotic form needs theta > 0");
  const double s2 = f->sigma * f->sigma;
  const LognormalOmega om = lognormal_omega(0, theta, f->sigma);
  const double log_l = -(om.omega * om.omega + 2.0 * om.omega) / (2.0 * s2) - 0.5 * std::log1p(om.omega);
  return log_l - k * om.omega + 0.5 * om.sigma2 * k * k;
}

double scaler_laplace(const Scaler& h, double theta, const ExpectationPolicy& policy) {
  if (!(theta >= 0.0)) throw Error(ErrorCode::DomainError, "Laplace argument must be >= 0");
  if (theta == 0.0) return 1.0;
  auto log_phi = [&](double s) { return SignedLog::positive(-theta * s); };
  const double centre = std::min(scaler_typical_scale(h), 1.0 / theta);
  return scaler_expectation(h, log_phi, centre, policy).value.value();
}

}  // namespace phasemix
