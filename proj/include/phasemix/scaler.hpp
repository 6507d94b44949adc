#ifndef PHASEMIX_SCALER_HPP
#define PHASEMIX_SCALER_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "phasemix/quadrature.hpp"

namespace phasemix {

struct ExponentialScaler {
  double rate;
};
/// Tail s^{-alpha} on s >= 1.
struct ParetoScaler {
  double alpha;
};
/// log S ~ N(0, sigma^2).
struct LognormalScaler {
  double sigma;
};
/// Tail exp(-(s/scale)^shape).
struct WeibullScaler {
  double scale;
  double shape;
};
struct GammaScaler {
  double shape;
  double rate;
};
/// P(S = i) = i^{-alpha} / zeta(alpha), i >= 1.
struct ZipfScaler {
  double alpha;
};
/// P(S = i) = p (1-p)^{i-1}, i >= 1.
struct GeometricScaler {
  double p;
};
struct FiniteDiscreteScaler {
  std::vector<double> points;
  std::vector<double> probs;
};
struct PointMassScaler {
  double point;
};

using ScalerFamily =
    std::variant<ExponentialScaler, ParetoScaler, LognormalScaler, WeibullScaler, GammaScaler,
                 ZipfScaler, GeometricScaler, FiniteDiscreteScaler, PointMassScaler>;

enum class ScalerKind { Continuous, Discrete };

struct Support {
  double lower;
  double upper;  // +inf when unbounded
  bool bounded() const;
};

/// Law H of the multiplier S in X = S * Y. Construct through make_scaler (or the named
/// helpers), which enforce the family constraints; the value is immutable afterwards.
class Scaler {
 public:
  const ScalerFamily& family() const { return family_; }
  ScalerKind kind() const;
  Support support() const;
  std::string name() const;

  friend Scaler make_scaler(ScalerFamily family);

 private:
  explicit Scaler(ScalerFamily f) : family_(std::move(f)) {}
  ScalerFamily family_;
};

/// Validates the parameters; InvalidScaler on violation.
Scaler make_scaler(ScalerFamily family);

Scaler exponential_scaler(double rate);
Scaler pareto_scaler(double alpha);
Scaler lognormal_scaler(double sigma);
Scaler weibull_scaler(double scale, double shape);
Scaler gamma_scaler(double shape, double rate);
Scaler zipf_scaler(double alpha);
Scaler geometric_scaler(double p);
Scaler finite_discrete_scaler(std::vector<double> points, std::vector<double> probs);
Scaler point_mass_scaler(double point);

/// H-bar(s) = P(S > s).
double scaler_tail(const Scaler& h, double s);
double scaler_log_tail(const Scaler& h, double s);

/// log density of a continuous scaler (-inf outside the support).
double scaler_log_density(const Scaler& h, double s);

/// Atoms of a discrete scaler. For Zipf and Geometric the atoms are s(y) = y at integer y,
/// with pmf given by the continuous extension p(y) (log form).
double scaler_log_pmf(const Scaler& h, double y);

/// Atoms of a finitely supported scaler (FiniteDiscrete, PointMass); empty otherwise.
struct Atom {
  double point;
  double prob;
};
std::vector<Atom> scaler_atoms(const Scaler& h);

/// A typical magnitude of S, used to centre integration windows.
double scaler_typical_scale(const Scaler& h);

/// Index alpha when H-bar is regularly varying with index -alpha.
std::optional<double> scaler_tail_index(const Scaler& h);

/// E[S^alpha]; +infinity when the moment diverges.
double scaler_moment(const Scaler& h, double alpha);

std::vector<double> scaler_sample(const Scaler& h, std::mt19937_64& rng, std::size_t count);
std::vector<double> scaler_sample(const Scaler& h, std::uint64_t seed, std::size_t count);

/// Settings for expectations E[phi(S)] taken against H.
struct ExpectationPolicy {
  double rel_tol = 1e-10;
  int max_subdivisions = 64;
  /// Relative bound on the discarded remainder of an infinite series.
  double series_tol = 1e-10;
  std::size_t max_terms = std::size_t{1} << 26;
};

struct ExpectationResult {
  SignedLog value;
  std::size_t terms = 0;       // series terms summed (0 for quadrature)
  double remainder_bound = 0;  // bound on the truncated remainder relative to |value|
  int evaluations = 0;
};

/// E[phi(S)] with phi supplied in log/sign form. `centre` is a point near which phi(s) dH(s)
/// is expected to concentrate (the routine searches around it and the scaler's typical scale).
/// Continuous scalers: tanh-sinh in t = log s. Infinite discrete scalers: direct summation
/// until the summand is decreasing and convex, then the remaining tail is replaced by its
/// integral from i + 1/2 once the midpoint-rule error |u(i-1) - u(i)| / 24 falls below
/// series_tol relative to the partial sum.
template <class LogPhi>
ExpectationResult scaler_expectation(const Scaler& h, LogPhi&& log_phi, double centre,
                                     const ExpectationPolicy& policy = {});

enum class LaplaceAvailability { ClosedForm, Numeric };

/// Laplace-Stieltjes transform of 1/S: L(theta) = E[e^{-theta/S}], with derivatives
/// L^{(k)}(theta) = (-1)^k E[S^{-k} e^{-theta/S}].
class ReciprocalLaplace {
 public:
  explicit ReciprocalLaplace(Scaler h, ExpectationPolicy policy = {});

  LaplaceAvailability availability() const;
  double value(double theta) const { return derivative(0, theta); }
  double derivative(int k, double theta) const;
  /// log E[S^{-k} e^{-theta/S}] (the derivative magnitude).
  double log_abs_derivative(int k, double theta) const;
  /// Always the quadrature/series value, even when a closed form exists.
  double numeric_log_abs_derivative(int k, double theta) const;

  /// Lognormal only: log of the large-theta approximation
  ///   |L^{(k)}(theta)| ~ L(theta) exp(-k omega_0 + sigma_0^2 k^2 / 2),
  ///   L(theta) ~ exp(-(omega_0^2 + 2 omega_0) / (2 sigma^2)) / sqrt(1 + omega_0),
  /// using lognormal_omega. Empty for other families.
  std::optional<double> log_asymptotic_derivative(int k, double theta) const;

  const Scaler& scaler() const { return h_; }

 private:
  Scaler h_;
  ExpectationPolicy policy_;
};

/// omega_k(x) = W(x sigma^2 e^{k sigma^2}) and sigma_k(x)^2 = sigma^2 / (1 + omega_k(x)).
struct LognormalOmega {
  double omega;
  double sigma2;
};
LognormalOmega lognormal_omega(int k, double x, double sigma);

/// Numeric E[e^{-theta S}].
double scaler_laplace(const Scaler& h, double theta, const ExpectationPolicy& policy = {});

}  // namespace phasemix

#include "phasemix/scaler_expectation.hpp"

#endif  // PHASEMIX_SCALER_HPP
