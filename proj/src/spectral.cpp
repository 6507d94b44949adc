#include "phasemix/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace phasemix {

namespace {

using Matrix = PhaseTyped::Matrix;
using CMatrix = Eigen::MatrixXcd;

bool is_triangular(const Matrix& m) {
  bool upper = true;
  bool lower = true;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i > j && m(i, j) != 0.0) upper = false;
      if (i < j && m(i, j) != 0.0) lower = false;
    }
  }
  return upper || lower;
}

std::vector<double> decay_rates(const Matrix& lambda, const SpectralPolicy& policy) {
  std::vector<double> rates;
  if (is_triangular(lambda)) {
    for (Eigen::Index i = 0; i < lambda.rows(); ++i) rates.push_back(-lambda(i, i));
  } else {
    Eigen::EigenSolver<Matrix> solver(lambda, false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::DefectiveDecompositionFailure, "eigenvalue computation failed");
    }
    for (const auto& ev : solver.eigenvalues()) {
      if (std::abs(ev.imag()) > policy.imag_tol * std::max(1.0, std::abs(ev))) {
        throw Error(ErrorCode::ComplexSpectrum,
                    "Lambda has a complex eigenvalue with imaginary part " +
                        std::to_string(ev.imag()));
      }
      rates.push_back(-ev.real());
    }
  }
  std::sort(rates.begin(), rates.end());
  return rates;
}

struct Cluster {
  double rate;
  int multiplicity;
  double spread;
};

std::vector<Cluster> cluster_rates(const std::vector<double>& rates, double rel_tol) {
  const double scale = std::max(1e-300, std::abs(rates.back()));
  std::vector<Cluster> out;
  std::size_t i = 0;
  while (i < rates.size()) {
    std::size_t j = i + 1;
    while (j < rates.size() && rates[j] - rates[i] <= rel_tol * scale) ++j;
    double sum = 0.0;
    for (std::size_t k = i; k < j; ++k) sum += rates[k];
    out.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i), rates[j - 1] - rates[i]});
    i = j;
  }
  return out;
}

int numerical_rank(const Matrix& m, double cutoff) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > cutoff) ++rank;
  }
  return rank;
}

// Jordan index of eigenvalue -rate: the smallest k >= 1 with rank(A^k) == rank(A^{k+1}),
// A = Lambda + rate I. Returns 0 when A is numerically nonsingular.
int jordan_index(const Matrix& lambda, double rate, int multiplicity, double rank_tol) {
  const Eigen::Index p = lambda.rows();
  const double norm = std::max(1.0, lambda.cwiseAbs().rowwise().sum().maxCoeff());
  const Matrix a = lambda + rate * Matrix::Identity(p, p);
  Matrix power = a;
  int prev_rank = numerical_rank(power, rank_tol * norm);
  if (prev_rank == p) return 0;
  for (int k = 1; k <= multiplicity + 1; ++k) {
    power = power * a;
    const int rank = numerical_rank(power, rank_tol * std::pow(norm, k + 1));
    if (rank == prev_rank) return k;
    prev_rank = rank;
  }
  throw Error(ErrorCode::DefectiveDecompositionFailure,
              "rank sequence of (Lambda + rate I)^k did not stabilise within the multiplicity");
}

// Laurent coefficients a_1..a_order of r(theta) = beta (theta I - Lambda)^{-1} e about
// theta = -rate, by the trapezoid rule on a circle of the given radius.
std::vector<double> laurent_coefficients(const PhaseTyped& g, double rate, double radius, int order,
                                         int points) {
  const Eigen::Index p = g.order();
  const CMatrix lambda = g.generator().cast<std::complex<double>>();
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(p);
  const Eigen::RowVectorXcd beta = g.initial().cast<std::complex<double>>();
  std::vector<std::complex<double>> acc(order, {0.0, 0.0});
  for (int n = 0; n < points; ++n) {
    const double phi = 2.0 * std::numbers::pi * (n + 0.5) / points;
    const std::complex<double> u = std::polar(radius, phi);
    const std::complex<double> theta = -rate + u;
    CMatrix m = theta * CMatrix::Identity(p, p) - lambda;
    const std::complex<double> r = beta * m.partialPivLu().solve(ones);
    std::complex<double> upow = u;
    for (int k = 0; k < order; ++k) {
      acc[k] += upow * r;
      upow *= u;
    }
  }
  std::vector<double> out(order);
  for (int k = 0; k < order; ++k) out[k] = acc[k].real() / points;
  return out;
}

SpectralForm build(const PhaseTyped& g, const std::vector<Cluster>& clusters,
                   const SpectralPolicy& policy) {
  SpectralForm form;
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    const Cluster& c = clusters[j];
    if (!(c.rate > 0.0)) {
      throw Error(ErrorCode::DefectiveDecompositionFailure,
                  "non-positive decay rate " + std::to_string(c.rate));
    }
    int index = jordan_index(g.generator(), c.rate, c.multiplicity, policy.rank_tol);
    if (index > c.multiplicity) {
      throw Error(ErrorCode::DefectiveDecompositionFailure,
                  "Jordan index exceeds algebraic multiplicity");
    }
    if (index == 0) index = c.multiplicity;

    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      if (i != j) gap = std::min(gap, std::abs(clusters[i].rate - c.rate));
    }
    double radius = std::isfinite(gap) ? 0.5 * gap : 0.5 * c.rate;
    radius = std::max(radius, 10.0 * c.spread);

    const std::vector<double> a =
        laurent_coefficients(g, c.rate, radius, index, policy.contour_points);
    SpectralTerm term;
    term.rate = c.rate;
    term.block_size = index;
    term.coeffs.resize(index);
    double factorial = 1.0;
    for (int k = 0; k < index; ++k) {
      if (k > 0) factorial *= k;
      term.coeffs[k] = a[k] / factorial;
    }
    form.terms.push_back(std::move(term));
  }

  // Zero out coefficients that are rounding noise, measured at the natural scale x ~ 1/rate.
  double biggest = 0.0;
  for (const auto& t : form.terms) {
    for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
      biggest = std::max(biggest, std::abs(t.coeffs[k]) * std::pow(1.0 / t.rate, k));
    }
  }
  for (auto& t : form.terms) {
    for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
      if (std::abs(t.coeffs[k]) * std::pow(1.0 / t.rate, k) <= 1e-11 * biggest) t.coeffs[k] = 0.0;
    }
  }

  const SpectralTerm* dom = nullptr;
  for (const auto& t : form.terms) {
    const bool active = std::any_of(t.coeffs.begin(), t.coeffs.end(), [](double v) { return v != 0.0; });
    if (active && (dom == nullptr || t.rate < dom->rate)) dom = &t;
  }
  if (dom == nullptr) {
    throw Error(ErrorCode::DefectiveDecompositionFailure, "all spectral coefficients vanished");
  }
  int eta = static_cast<int>(dom->coeffs.size());
  while (eta > 1 && dom->coeffs[eta - 1] == 0.0) --eta;
  form.dominant.rate = dom->rate;
  form.dominant.eta = eta;
  form.dominant.gamma = dom->coeffs[eta - 1];
  form.dominant.mu = dom->rate * form.dominant.gamma;
  form.dominant.constants_positive = form.dominant.gamma > 0.0;
  return form;
}

bool verify(const PhaseTyped& g, const SpectralForm& form, const SpectralPolicy& policy) {
  const double x_max = 20.0 / form.dominant.rate;
  for (int i = 0; i <= policy.verify_points; ++i) {
    const double x = x_max * i / policy.verify_points;
    const double exact = ph_tail(g, x);
    const double rec = form.tail(x);
    if (std::abs(rec - exact) > policy.verify_tol * exact + 1e-14) return false;
  }
  return true;
}

}  // namespace

double SpectralForm::tail(double x) const { return log_tail_derivative(0, x).value(); }

std::vector<SpectralTerm> SpectralForm::derivative_terms(int order) const {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  std::vector<SpectralTerm> out = terms;
  for (auto& t : out) {
    // Differentiate c_k x^k e^{-rate x} `order` times: c'_k = (k+1) c_{k+1} - rate c_k.
    for (int d = 0; d < order; ++d) {
      std::vector<double> next(t.coeffs.size(), 0.0);
      for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
        next[k] = -t.rate * t.coeffs[k] + (k + 1 < t.coeffs.size() ? (k + 1) * t.coeffs[k + 1] : 0.0);
      }
      t.coeffs = std::move(next);
    }
  }
  return out;
}

SignedLog SpectralForm::log_tail_derivative(int order, double x) const {
  double min_rate = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) min_rate = std::min(min_rate, t.rate);
  double sum = 0.0;
  for (const auto& t : derivative_terms(order)) {
    double poly = 0.0;
    for (std::size_t k = t.coeffs.size(); k-- > 0;) poly = poly * x + t.coeffs[k];
    if (poly != 0.0) sum += poly * std::exp(-(t.rate - min_rate) * x);
  }
  SignedLog out = SignedLog::from_value(sum);
  if (out.sign != 0) out.log_abs -= min_rate * x;
  return out;
}

SpectralForm ph_spectral(const PhaseTyped& g, const SpectralPolicy& policy) {
  const std::vector<double> rates = decay_rates(g.generator(), policy);
  SpectralForm form = build(g, cluster_rates(rates, policy.cluster_tol), policy);
  if (verify(g, form, policy)) return form;
  // Defective eigenvalues computed from a dense matrix split by O(eps^{1/eta});
  // retry with a clustering tolerance that merges such splits.
  const double loose = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / static_cast<double>(g.order()));
  if (loose > policy.cluster_tol) {
    SpectralForm retry = build(g, cluster_rates(rates, 10.0 * loose), policy);
    if (verify(g, retry, policy)) return retry;
  }
  throw Error(ErrorCode::DefectiveDecompositionFailure,
              "spectral expansion does not reproduce the tail within tolerance");
}

TailKernel::TailKernel(PhaseTyped g) : g_(std::move(g)) {
  try {
    spectral_ = ph_spectral(g_);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ComplexSpectrum && e.code() != ErrorCode::DefectiveDecompositionFailure) {
      throw;
    }
  }
}

SignedLog TailKernel::log_tail_derivative(int order, double y) const {
  if (y < 0.0) throw Error(ErrorCode::DomainError, "tail kernel requires y >= 0");
  if (spectral_) {
    if (order == 0 && y == 0.0) return {0.0, 1};
    return spectral_->log_tail_derivative(order, y);
  }
  return SignedLog::from_value(ph_tail_derivative(g_, order, y));
}

double TailKernel::log_density(double y) const {
  SignedLog d = log_tail_derivative(1, y);
  if (d.sign >= 0) return -std::numeric_limits<double>::infinity();
  return d.log_abs;
}

}  // namespace phasemix
