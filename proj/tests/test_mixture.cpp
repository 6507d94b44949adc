#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "phasemix/error.hpp"
#include "phasemix/mixture.hpp"
#include "phasemix/special_functions.hpp"

using namespace phasemix;

namespace {

double direct_sum(const std::function<double(double)>& g, long n) {
  long double s = 0.0L;
  for (long i = n; i >= 1; --i) s += g(static_cast<double>(i));
  return static_cast<double>(s);
}

}  // namespace

TEST(MixtureTail, ExponentialExponentialBesselForm) {
  for (double lambda : {0.5, 2.0}) {
    for (double beta : {0.5, 1.0}) {
      const MixtureModel m(exponential_ph(lambda), exponential_scaler(beta));
      for (double x = 0.1; x <= 50.0; x *= 1.6) {
        const double z = 2.0 * std::sqrt(beta * lambda * x);
        EXPECT_NEAR(mixture_tail(m, x) / (z * oracle::bessel_k(1.0, z)), 1.0, 1e-8) << lambda << " " << beta << " " << x;
      }
    }
  }
}

TEST(MixtureTail, BoundaryAndMonotone) {
  const MixtureModel m(erlang_ph(2, 1.0), lognormal_scaler(0.8));
  EXPECT_EQ(mixture_tail(m, 0.0), 1.0);
  double prev = 1.0;
  for (double x = 1e-3; x < 1e4; x *= 1.5) {
    const double t = mixture_tail(m, x);
    EXPECT_LE(t, prev);
    EXPECT_GE(t, 0.0);
    prev = t;
  }
  EXPECT_THROW(mixture_tail(m, -1.0), Error);
  EXPECT_THROW(mixture_density(m, 0.0), Error);
}

TEST(MixtureTail, PointMassIsRescaledKernel) {
  const PhaseTyped g = erlang_ph(3, 2.0);
  const MixtureModel m(g, point_mass_scaler(2.5));
  for (double x : {0.01, 0.7, 3.0, 12.0, 40.0}) {
    EXPECT_NEAR(mixture_tail(m, x) / ph_tail(g, x / 2.5), 1.0, 1e-12) << x;
    EXPECT_NEAR(mixture_density(m, x) / (ph_density(g, x / 2.5) / 2.5), 1.0, 1e-10) << x;
  }
}

TEST(MixtureTail, FiniteDiscreteIsExactFiniteSum) {
  const PhaseTyped g = hyperexponential_ph({0.4, 0.6}, {1.0, 3.0});
  const std::vector<double> pts = {0.5, 1.0, 4.0};
  const std::vector<double> pr = {0.2, 0.5, 0.3};
  const MixtureModel m(g, finite_discrete_scaler(pts, pr));
  for (double x : {0.2, 1.0, 5.0, 20.0}) {
    double want = 0.0;
    for (int i = 0; i < 3; ++i) want += pr[i] * (0.4 * std::exp(-x / pts[i]) + 0.6 * std::exp(-3.0 * x / pts[i]));
    EXPECT_NEAR(mixture_tail(m, x) / want, 1.0, 1e-13) << x;
  }
}

TEST(MixtureTail, StochasticDominanceByRightEndpoint) {
  const PhaseTyped g = erlang_ph(2, 1.0);
  const MixtureModel m(g, finite_discrete_scaler({0.5, 1.5, 3.0}, {0.3, 0.3, 0.4}));
  for (double x = 0.05; x < 200.0; x *= 1.4) EXPECT_LE(mixture_tail(m, x), ph_tail(g, x / 3.0) * (1 + 1e-12));
}

TEST(MixtureTail, HeavierParetoGivesHeavierMixture) {
  const PhaseTyped g = exponential_ph(1.0);
  const MixtureModel light(g, pareto_scaler(3.0));
  const MixtureModel heavy(g, pareto_scaler(1.5));
  for (double x = 0.1; x < 1e3; x *= 2.0) EXPECT_GT(mixture_tail(heavy, x), mixture_tail(light, x));
}

TEST(MixtureTail, ParetoAgainstSimpson) {
  // u = 1/s: F-bar(x) = int_0^1 e^{-x u} alpha u^{alpha-1} du.
  const MixtureModel m(exponential_ph(1.0), pareto_scaler(2.0));
  for (double x : {0.5, 5.0, 50.0}) {
    const double ref = oracle::simpson([&](double u) { return std::exp(-x * u) * 2.0 * u; }, 0.0, 1.0, 200000);
    EXPECT_NEAR(mixture_tail(m, x) / ref, 1.0, 1e-10) << x;
  }
}

TEST(MixtureTail, ParetoAgainstMonteCarlo) {
  const MixtureModel m(exponential_ph(1.0), pareto_scaler(2.0));
  const std::size_t n = 2000000;
  const auto xs = mixture_sample(m, 99u, n);
  const double x = 50.0;
  const double hits = static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double v) { return v > x; }));
  const auto [lo, hi] = oracle::wilson(hits, static_cast<double>(n), 3.2905);
  const double v = mixture_tail(m, x);
  EXPECT_GE(v, lo);
  EXPECT_LE(v, hi);
}

TEST(MixtureTail, ZipfSeriesAgainstPartialSum) {
  const MixtureModel m(exponential_ph(1.0), zipf_scaler(3.0));
  const double z3 = riemann_zeta(3.0);
  for (double x : {1.0, 10.0, 100.0}) {
    const long n = 1000000;
    // remainder int_{n+1/2}^inf y^{-3} (1 - x/y) dy
    const double a = n + 0.5;
    const double tail = 1.0 / (2 * a * a) - x / (3 * a * a * a);
    const double ref = (direct_sum([&](double i) { return std::pow(i, -3.0) * std::exp(-x / i); }, n) + tail) / z3;
    const ExpectationResult r = mixture_tail_derivative(m, 0, x);
    EXPECT_NEAR(r.value.value() / ref, 1.0, 1e-9) << x;
    EXPECT_LE(r.remainder_bound, 1e-10);
  }
}

TEST(MixtureTail, GeometricSeriesAgainstPartialSum) {
  const MixtureModel m(erlang_ph(2, 1.0), geometric_scaler(0.3));
  for (double x : {0.5, 10.0, 300.0}) {
    const double ref = direct_sum(
        [&](double i) { return 0.3 * std::pow(0.7, i - 1) * (1 + x / i) * std::exp(-x / i); }, 20000);
    EXPECT_NEAR(mixture_tail(m, x) / ref, 1.0, 1e-10) << x;
  }
}

TEST(MixtureDensity, MatchesDerivativeOfClosedForm) {
  const MixtureModel m(exponential_ph(1.0), exponential_scaler(1.0));
  auto closed = [](double x) {
    const double z = 2.0 * std::sqrt(x);
    return z * oracle::bessel_k(1.0, z);
  };
  const double h = 1e-4;
  const double fd = -(closed(1.0 + h) - closed(1.0 - h)) / (2 * h);
  EXPECT_NEAR(mixture_density(m, 1.0), fd, 1e-4);
}

TEST(MixtureDensity, ConsistentWithTailDifferences) {
  for (const Scaler& h : {lognormal_scaler(0.6), gamma_scaler(2.0, 1.5), geometric_scaler(0.4)}) {
    const MixtureModel m(erlang_ph(2, 1.0), h);
    for (double x : {0.3, 2.0, 15.0}) {
      const double step = 1e-4 * x;
      const double fd = (mixture_tail(m, x - step) - mixture_tail(m, x + step)) / (2 * step);
      EXPECT_NEAR(mixture_density(m, x) / fd, 1.0, 1e-6) << h.name() << " " << x;
    }
  }
}

TEST(MixtureDensity, ZipfAgainstMonteCarloHistogram) {
  const MixtureModel m(erlang_ph(2, 1.0), zipf_scaler(3.0));
  const std::size_t n = 4000000;
  const auto xs = mixture_sample(m, 2024u, n);
  const double a = 4.75, b = 5.25;
  const double hits = static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double v) { return v > a && v <= b; }));
  const double mass = oracle::simpson([&](double x) { return mixture_density(m, x); }, a, b, 16);
  const auto [lo, hi] = oracle::wilson(hits, static_cast<double>(n), 3.2905);
  EXPECT_GE(mass, lo);
  EXPECT_LE(mass, hi);
}

TEST(MixtureMoment, ProductOfMoments) {
  EXPECT_NEAR(mixture_moment(MixtureModel(exponential_ph(1.0), exponential_scaler(1.0)), 1), 1.0, 1e-13);
  EXPECT_TRUE(std::isinf(mixture_moment(MixtureModel(exponential_ph(1.0), pareto_scaler(2.0)), 3)));
  EXPECT_NEAR(mixture_moment(MixtureModel(erlang_ph(2, 1.0), geometric_scaler(0.5)), 1), 4.0, 1e-8);
}

TEST(MixtureSample, PointMassKolmogorovSmirnov) {
  const MixtureModel m(exponential_ph(1.0), point_mass_scaler(2.0));
  const std::size_t n = 100000;
  auto xs = mixture_sample(m, 5u, n);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-xs[i] / 2.0);
    d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

TEST(MixtureSample, MeanAndDeterminism) {
  const MixtureModel m(exponential_ph(1.0), exponential_scaler(1.0));
  const std::size_t n = 200000;
  const auto xs = mixture_sample(m, 77u, n);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  // Var(SY) = E[S^2] E[Y^2] - 1 = 3
  EXPECT_NEAR(mean, mixture_moment(m, 1), 3.0 * std::sqrt(3.0 / n));
  EXPECT_EQ(mixture_sample(m, 77u, 100), std::vector<double>(xs.begin(), xs.begin() + 100));
  EXPECT_NE(mixture_sample(m, 78u, 100), std::vector<double>(xs.begin(), xs.begin() + 100));
}

TEST(SeriesBounds, ZipfSummandBracketsPartialSum) {
  const LogSummand g = zipf_summand(3.0, 0, 1.0, 10.0);
  const SeriesBounds b = series_bounds(g);
  EXPECT_NEAR(b.peak_location, 10.0 / 3.0, 1e-6);
  EXPECT_FALSE(b.boundary_peak);
  const long n = 1000000;
  const double a = n + 0.5;
  const double sum = direct_sum([](double i) { return std::pow(i, -3.0) * std::exp(-10.0 / i); }, n) +
                     1.0 / (2 * a * a) - 10.0 / (3 * a * a * a);
  EXPECT_LE(b.lower, sum);
  EXPECT_GE(b.upper, sum);
  EXPECT_LE(b.upper - b.lower, 2 * b.peak_value * (1 + 1e-12));
  // int_0^inf y^{-3} e^{-10/y} dy = Gamma(2) / 10^2
  EXPECT_NEAR(b.integral_value, 0.01, 1e-12);
}

TEST(SeriesBounds, GeometricSummandBracketsPartialSum) {
  for (double x : {1.0, 30.0, 500.0}) {
    const SeriesBounds b = series_bounds(geometric_summand(0.6, 0, 1.0, x));
    const double sum = direct_sum([&](double i) { return std::exp(-x / i) * std::pow(0.6, i); }, 5000);
    EXPECT_LE(b.lower, sum) << x;
    EXPECT_GE(b.upper, sum) << x;
    // int_0^inf e^{-x/y} q^y dy = 2 sqrt(x/|log q|) K_1(2 sqrt(x |log q|))
    const double lq = -std::log(0.6);
    EXPECT_NEAR(b.integral_value / (2 * std::sqrt(x / lq) * oracle::bessel_k(1.0, 2 * std::sqrt(x * lq))), 1.0, 1e-8);
  }
}

TEST(SeriesBounds, ZeroAndBimodalSummands) {
  const SeriesBounds z = series_bounds([](double) { return SignedLog{}; });
  EXPECT_EQ(z.lower, 0.0);
  EXPECT_EQ(z.upper, 0.0);
  auto bimodal = [](double y) {
    return SignedLog::from_value(std::exp(-std::pow(std::log(y / 10.0), 2)) + std::exp(-std::pow(std::log(y / 1e6), 2)));
  };
  try {
    series_bounds(bimodal);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnimodalityCheckFailed);
  }
}

TEST(SeriesBounds, MixtureTailIsBracketed) {
  for (const Scaler& h : {zipf_scaler(3.0), zipf_scaler(2.0), geometric_scaler(0.5), geometric_scaler(0.05)}) {
    const MixtureModel m(exponential_ph(1.0), h);
    for (double x : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
      const SeriesBounds b = mixture_series_bounds(m, x);
      const double v = mixture_tail(m, x);
      EXPECT_LE(b.lower, v * (1 + 1e-9)) << h.name() << " " << x;
      EXPECT_GE(b.upper, v * (1 - 1e-9)) << h.name() << " " << x;
    }
  }
  EXPECT_THROW(mixture_series_bounds(MixtureModel(exponential_ph(1.0), pareto_scaler(2.0)), 1.0), Error);
}

TEST(MixturePolicy, RejectsNonPositiveTolerances) {
  MixturePolicy p;
  p.series_tol = 0.0;
  EXPECT_THROW(MixtureModel(exponential_ph(1.0), exponential_scaler(1.0), p), Error);
}
