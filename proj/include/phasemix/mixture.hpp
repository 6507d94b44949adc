#ifndef PHASEMIX_MIXTURE_HPP
#define PHASEMIX_MIXTURE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "phasemix/phase_type.hpp"
#include "phasemix/scaler.hpp"
#include "phasemix/spectral.hpp"

namespace phasemix {

struct MixturePolicy {
  double quad_rel_tol = 1e-10;
  int max_subdivisions = 64;
  double series_tol = 1e-10;
  std::size_t max_terms = std::size_t{1} << 26;

  void validate() const;
  ExpectationPolicy expectation() const;
};

/// Law of X = S * Y with Y ~ G phase-type and S ~ H independent:
/// F(x) = int G(x/s) dH(s).
class MixtureModel {
 public:
  MixtureModel(PhaseTyped g, Scaler h, MixturePolicy policy = {});

  const PhaseTyped& phase_type() const { return kernel_.phase_type(); }
  const Scaler& scaler() const { return h_; }
  const MixturePolicy& policy() const { return policy_; }
  const TailKernel& kernel() const { return kernel_; }
  /// Slowest decay rate of G's tail (dominant spectral rate, or 1/mean without one).
  double dominant_rate() const { return dominant_rate_; }

 private:
  TailKernel kernel_;
  Scaler h_;
  MixturePolicy policy_;
  double dominant_rate_;
};

/// d-th derivative of the tail, E[G-bar^{(d)}(x/S) S^{-d}], in log/sign form with the
/// quadrature or series diagnostics. Requires x > 0 (x >= 0 for order 0).
ExpectationResult mixture_tail_derivative(const MixtureModel& m, int order, double x);

/// F-bar(x); exactly 1 at x = 0.
double mixture_tail(const MixtureModel& m, double x);
double mixture_log_tail(const MixtureModel& m, double x);
/// f(x) = E[g(x/S) / S], x > 0.
double mixture_density(const MixtureModel& m, double x);
double mixture_log_density(const MixtureModel& m, double x);
/// E[X^n] = E[Y^n] E[S^n]; +infinity when the scaler moment diverges.
double mixture_moment(const MixtureModel& m, int n);

/// Draws S * Y with S and Y taken from separate streams derived from the seed.
std::vector<double> mixture_sample(const MixtureModel& m, std::uint64_t seed, std::size_t count);

/// Bracket for sum_{i>=1} g(i) from the integral of a unimodal summand g >= 0:
/// int_0^inf g dy - g(y_hat) <= sum <= int_0^inf g dy + g(y_hat). When the maximum lies
/// at y_hat <= 1 the integral test on [1, inf) is used instead:
/// int_1^inf g <= sum <= g(1) + int_1^inf g.
struct SeriesBounds {
  double lower = 0.0;
  double upper = 0.0;
  double integral_value = 0.0;  // int_0^inf g dy
  double peak_value = 0.0;      // g(y_hat)
  double peak_location = 0.0;   // y_hat
  bool boundary_peak = false;
};

/// log g(y) (sign 0 for g = 0). A 256-point log-spaced scan over [scan_lo, scan_hi] must find
/// at most one interior local maximum, else UnimodalityCheckFailed.
using LogSummand = std::function<SignedLog(double)>;
SeriesBounds series_bounds(const LogSummand& log_g, double scan_lo = 1e-6, double scan_hi = 1e12);

/// y^{-(alpha+k)} e^{-rate x / y}.
LogSummand zipf_summand(double alpha, int k, double rate, double x);
/// exp(-rate x / y + y log q - k log y).
LogSummand geometric_summand(double q, int k, double rate, double x);

/// Bounds for F-bar(x) itself, summand p(y) G-bar(x/y) for Zipf or Geometric scalers.
SeriesBounds mixture_series_bounds(const MixtureModel& m, double x);

}  // namespace phasemix

#endif  // PHASEMIX_MIXTURE_HPP
