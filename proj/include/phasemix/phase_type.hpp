#ifndef PHASEMIX_PHASE_TYPE_HPP
#define PHASEMIX_PHASE_TYPE_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "phasemix/error.hpp"

namespace phasemix {

/// Finite phase-type distribution PH(beta, Lambda): the absorption time of a Markov jump
/// process with transient states 1..p, initial law beta and sub-intensity matrix Lambda.
///
/// Instances are only produced by ph_validate and are immutable afterwards.
template <typename Scalar>
class PhaseType {
 public:
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  const RowVector& initial() const { return beta_; }
  const Matrix& generator() const { return lambda_; }
  /// Exit vector -Lambda e.
  const Vector& exit_rates() const { return exit_; }
  Eigen::Index order() const { return beta_.size(); }

  template <typename S>
  friend PhaseType<S> ph_validate(const Eigen::Matrix<S, 1, Eigen::Dynamic>&,
                                  const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>&);

 private:
  PhaseType(RowVector beta, Matrix lambda, Vector exit)
      : beta_(std::move(beta)), lambda_(std::move(lambda)), exit_(std::move(exit)) {}

  RowVector beta_;
  Matrix lambda_;
  Vector exit_;
};

namespace detail {
template <typename Scalar>
std::string fmt(Scalar v) {
  std::ostringstream os;
  os.precision(17);
  os << static_cast<long double>(v);
  return os.str();
}
}  // namespace detail

/// Validates (beta, Lambda) and returns the phase-type distribution.
///
/// Throws NonStochasticInitial when beta is not a probability vector and NotSubIntensity
/// when Lambda has a sign or row-sum violation or absorption is not certain.
template <typename Scalar>
PhaseType<Scalar> ph_validate(const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>& beta,
                              const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& lambda) {
  using std::abs;
  const Eigen::Index p = beta.size();
  if (p == 0) throw Error(ErrorCode::InvalidArgument, "beta must be non-empty");
  if (lambda.rows() != p || lambda.cols() != p) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be " + std::to_string(p) + "x" +
                                                std::to_string(p) + " to match beta");
  }
  const Scalar tol = Scalar(1e-10);
  Scalar total = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!std::isfinite(static_cast<double>(beta(i)))) {
      throw Error(ErrorCode::NonStochasticInitial, "beta[" + std::to_string(i) + "] is not finite");
    }
    if (beta(i) < 0) {
      throw Error(ErrorCode::NonStochasticInitial,
                  "beta[" + std::to_string(i) + "] = " + detail::fmt(beta(i)) + " is negative");
    }
    total += beta(i);
  }
  if (abs(total - Scalar(1)) > tol) {
    throw Error(ErrorCode::NonStochasticInitial,
                "beta sums to " + detail::fmt(total) + ", expected 1 (no atom at zero)");
  }

  Scalar scale = 0;
  for (Eigen::Index i = 0; i < p; ++i) scale = std::max(scale, Scalar(abs(lambda(i, i))));
  bool some_exit = false;
  for (Eigen::Index i = 0; i < p; ++i) {
    Scalar row = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const Scalar v = lambda(i, j);
      const std::string where = "lambda[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (!std::isfinite(static_cast<double>(v))) {
        throw Error(ErrorCode::NotSubIntensity, where + " is not finite");
      }
      if (i == j && !(v < 0)) {
        throw Error(ErrorCode::NotSubIntensity,
                    where + " = " + detail::fmt(v) + ": diagonal entries must be negative");
      }
      if (i != j && v < 0) {
        throw Error(ErrorCode::NotSubIntensity,
                    where + " = " + detail::fmt(v) + ": off-diagonal entries must be nonnegative");
      }
      row += v;
    }
    if (row > tol * scale) {
      throw Error(ErrorCode::NotSubIntensity, "row " + std::to_string(i) + " of lambda sums to " +
                                                  detail::fmt(row) + " > 0");
    }
    if (row < -tol * scale) some_exit = true;
  }
  if (!some_exit) {
    throw Error(ErrorCode::NotSubIntensity, "every row of lambda sums to 0: absorption is impossible");
  }
  Eigen::FullPivLU<typename PhaseType<Scalar>::Matrix> lu(lambda);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::NotSubIntensity,
                "lambda is singular: some transient class never reaches absorption");
  }
  typename PhaseType<Scalar>::Vector exit = -(lambda * PhaseType<Scalar>::Vector::Ones(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    if (exit(i) < 0) exit(i) = 0;  // rounding within the row-sum tolerance
  }
  return PhaseType<Scalar>(beta, lambda, std::move(exit));
}

namespace detail {
template <typename Scalar>
void require_nonnegative(Scalar x, const char* what) {
  if (!(x >= 0) || !std::isfinite(static_cast<double>(x))) {
    throw Error(ErrorCode::DomainError, std::string(what) + " requires finite x >= 0");
  }
}

template <typename Scalar>
typename PhaseType<Scalar>::Matrix matexp(const PhaseType<Scalar>& g, Scalar x) {
  typename PhaseType<Scalar>::Matrix m = (g.generator() * x).exp();
  if (!m.allFinite()) {
    throw Error(ErrorCode::MatexpFailure,
                "matrix exponential of Lambda*x is not finite at x=" + fmt(x));
  }
  return m;
}
}  // namespace detail

/// Tail probability beta e^{Lambda x} e, clamped to [0, 1].
template <typename Scalar>
Scalar ph_tail(const PhaseType<Scalar>& g, Scalar x) {
  detail::require_nonnegative(x, "ph_tail");
  if (x == 0) return Scalar(1);
  const Scalar v = (g.initial() * detail::matexp(g, x).rowwise().sum()).value();
  return std::min(Scalar(1), std::max(Scalar(0), v));
}

/// Density beta e^{Lambda x} lambda.
template <typename Scalar>
Scalar ph_density(const PhaseType<Scalar>& g, Scalar x) {
  detail::require_nonnegative(x, "ph_density");
  const Scalar v = (x == 0) ? (g.initial() * g.exit_rates()).value()
                            : (g.initial() * (detail::matexp(g, x) * g.exit_rates())).value();
  return std::max(Scalar(0), v);
}

/// d-th derivative of the tail, beta Lambda^d e^{Lambda x} e.
template <typename Scalar>
Scalar ph_tail_derivative(const PhaseType<Scalar>& g, int order, Scalar x) {
  detail::require_nonnegative(x, "ph_tail_derivative");
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  typename PhaseType<Scalar>::Vector v =
      (x == 0) ? typename PhaseType<Scalar>::Vector(
                     PhaseType<Scalar>::Vector::Ones(g.order()))
               : typename PhaseType<Scalar>::Vector(detail::matexp(g, x).rowwise().sum());
  for (int i = 0; i < order; ++i) v = g.generator() * v;
  return (g.initial() * v).value();
}

/// n-th raw moment of s*Y: s^n (-1)^n n! beta Lambda^{-n} e.
template <typename Scalar>
Scalar ph_moment(const PhaseType<Scalar>& g, int n, Scalar s = Scalar(1)) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "moment order must be >= 1");
  if (!(s > 0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
  Eigen::PartialPivLU<typename PhaseType<Scalar>::Matrix> lu(g.generator());
  typename PhaseType<Scalar>::Vector v = PhaseType<Scalar>::Vector::Ones(g.order());
  Scalar factor = 1;
  for (int k = 1; k <= n; ++k) {
    v = lu.solve(v);
    factor *= -Scalar(k) * s;
  }
  const Scalar m = factor * (g.initial() * v).value();
  if (!std::isfinite(static_cast<double>(m)) || !(m > 0)) {
    throw Error(ErrorCode::SingularMatrix, "moment computation broke down (Lambda near singular)");
  }
  return m;
}

/// Absorption times drawn by simulating the Markov jump process.
template <typename Scalar, typename Rng>
std::vector<Scalar> ph_sample(const PhaseType<Scalar>& g, Rng& rng, std::size_t count) {
  const Eigen::Index p = g.order();
  std::vector<double> start(p);
  for (Eigen::Index i = 0; i < p; ++i) start[i] = static_cast<double>(g.initial()(i));
  std::discrete_distribution<Eigen::Index> initial(start.begin(), start.end());

  // Embedded chain: column p is absorption.
  std::vector<std::discrete_distribution<Eigen::Index>> jumps;
  std::vector<double> rates(p);
  jumps.reserve(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    rates[i] = -static_cast<double>(g.generator()(i, i));
    std::vector<double> w(p + 1, 0.0);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (j != i) w[j] = static_cast<double>(g.generator()(i, j));
    }
    w[p] = static_cast<double>(g.exit_rates()(i));
    jumps.emplace_back(w.begin(), w.end());
  }

  std::exponential_distribution<double> holding(1.0);
  std::vector<Scalar> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Eigen::Index state = initial(rng);
    double t = 0.0;
    while (state != p) {
      t += holding(rng) / rates[state];
      state = jumps[state](rng);
    }
    out.push_back(static_cast<Scalar>(t));
  }
  return out;
}

template <typename Scalar>
std::vector<Scalar> ph_sample(const PhaseType<Scalar>& g, std::uint64_t seed, std::size_t count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  std::mt19937_64 rng(seed);
  return ph_sample(g, rng, count);
}

using PhaseTyped = PhaseType<double>;

/// Convenience constructor from nested initializer data (rows of Lambda).
PhaseTyped make_phase_type(const std::vector<double>& beta,
                           const std::vector<std::vector<double>>& lambda);

/// Standard fixtures.
PhaseTyped exponential_ph(double rate);
PhaseTyped erlang_ph(int stages, double rate);
PhaseTyped hyperexponential_ph(const std::vector<double>& weights, const std::vector<double>& rates);

/// M_G(alpha) = E[Y^alpha] by quadrature against the density.
double ph_fractional_moment(const PhaseTyped& g, double alpha);

}  // namespace phasemix

#endif  // PHASEMIX_PHASE_TYPE_HPP
