#include "phasemix/phase_type.hpp"

#include <cmath>

#include "phasemix/quadrature.hpp"
#include "phasemix/spectral.hpp"

namespace phasemix {

PhaseTyped make_phase_type(const std::vector<double>& beta,
                           const std::vector<std::vector<double>>& lambda) {
  const auto p = static_cast<Eigen::Index>(beta.size());
  PhaseTyped::RowVector b(p);
  for (Eigen::Index i = 0; i < p; ++i) b(i) = beta[i];
  PhaseTyped::Matrix m(static_cast<Eigen::Index>(lambda.size()),
                       lambda.empty() ? 0 : static_cast<Eigen::Index>(lambda.front().size()));
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (static_cast<Eigen::Index>(lambda[i].size()) != m.cols()) {
      throw Error(ErrorCode::InvalidArgument,
                  "lambda row " + std::to_string(i) + " has inconsistent length");
    }
    for (std::size_t j = 0; j < lambda[i].size(); ++j) m(i, j) = lambda[i][j];
  }
  return ph_validate(b, m);
}

PhaseTyped exponential_ph(double rate) { return make_phase_type({1.0}, {{-rate}}); }

PhaseTyped erlang_ph(int stages, double rate) {
  if (stages < 1) throw Error(ErrorCode::InvalidArgument, "Erlang needs at least one stage");
  std::vector<double> beta(stages, 0.0);
  beta[0] = 1.0;
  std::vector<std::vector<double>> lambda(stages, std::vector<double>(stages, 0.0));
  for (int i = 0; i < stages; ++i) {
    lambda[i][i] = -rate;
    if (i + 1 < stages) lambda[i][i + 1] = rate;
  }
  return make_phase_type(beta, lambda);
}

PhaseTyped hyperexponential_ph(const std::vector<double>& weights, const std::vector<double>& rates) {
  if (weights.size() != rates.size()) {
    throw Error(ErrorCode::InvalidArgument, "hyperexponential weights and rates differ in length");
  }
  std::vector<std::vector<double>> lambda(rates.size(), std::vector<double>(rates.size(), 0.0));
  for (std::size_t i = 0; i < rates.size(); ++i) lambda[i][i] = -rates[i];
  return make_phase_type(weights, lambda);
}

double ph_fractional_moment(const PhaseTyped& g, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::DomainError, "fractional moment requires alpha > 0");
  const TailKernel kernel(g);
  const double mean = ph_moment(g, 1);
  // E[Y^alpha] = int x^alpha g(x) dx, with x = e^t.
  auto log_integrand = [&](double t) {
    const double x = std::exp(t);
    const double ld = kernel.log_density(x);
    return SignedLog::positive(ld + (alpha + 1.0) * t);
  };
  const double centre = std::log(mean);
  QuadratureOptions opt;
  opt.rel_tol = 1e-12;
  const SignedLog r = integrate_log_peaked(log_integrand, -std::numeric_limits<double>::infinity(),
                                           std::numeric_limits<double>::infinity(), centre - 60.0,
                                           centre + 8.0, opt);
  return r.value();
}

}  // namespace phasemix
