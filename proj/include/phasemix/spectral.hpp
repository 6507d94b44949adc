#ifndef PHASEMIX_SPECTRAL_HPP
#define PHASEMIX_SPECTRAL_HPP

#include <optional>
#include <vector>

#include "phasemix/phase_type.hpp"
#include "phasemix/quadrature.hpp"

namespace phasemix {

/// One distinct eigenvalue -rate of Lambda and the polynomial multiplying e^{-rate x}
/// in the tail: sum_k coeffs[k] x^k e^{-rate x}. `block_size` is the Jordan index
/// (largest block) found by rank tests; `coeffs` has that many entries.
struct SpectralTerm {
  double rate = 0.0;
  int block_size = 1;
  std::vector<double> coeffs;
};

/// Leading behaviour of the tail: gamma x^{eta-1} e^{-rate x}, density mu x^{eta-1} e^{-rate x}.
struct DominantTerm {
  double rate = 0.0;
  int eta = 1;
  double gamma = 0.0;
  double mu = 0.0;
  bool constants_positive = true;
};

struct SpectralPolicy {
  double cluster_tol = 1e-8;
  double imag_tol = 1e-8;
  double rank_tol = 1e-8;
  double verify_tol = 1e-8;
  int contour_points = 128;
  int verify_points = 64;
};

/// Real-spectrum tail expansion of a phase-type distribution.
struct SpectralForm {
  std::vector<SpectralTerm> terms;
  DominantTerm dominant;

  /// sum_j sum_k c_jk x^k e^{-lambda_j x}.
  double tail(double x) const;

  /// Terms of the order-th derivative (same rates, differentiated polynomials).
  std::vector<SpectralTerm> derivative_terms(int order) const;

  /// order-th derivative of the expansion in log/sign form, evaluated relative to the
  /// dominant rate so that large x does not underflow.
  SignedLog log_tail_derivative(int order, double x) const;
};

SpectralForm ph_spectral(const PhaseTyped& g, const SpectralPolicy& policy = {});

/// Evaluates d^k/dy^k of the tail of G, preferring the spectral expansion (log-safe for
/// large y) and falling back to the matrix exponential when the spectrum is complex.
class TailKernel {
 public:
  explicit TailKernel(PhaseTyped g);

  SignedLog log_tail_derivative(int order, double y) const;
  double log_tail(double y) const { return log_tail_derivative(0, y).log_abs; }
  /// log density g(y) = -d/dy tail.
  double log_density(double y) const;

  const PhaseTyped& phase_type() const { return g_; }
  const std::optional<SpectralForm>& spectral() const { return spectral_; }

 private:
  PhaseTyped g_;
  std::optional<SpectralForm> spectral_;
};

}  // namespace phasemix

#endif  // PHASEMIX_SPECTRAL_HPP
