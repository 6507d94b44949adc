#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "phasemix/error.hpp"
#include "phasemix/phase_type.hpp"
#include "phasemix/spectral.hpp"

using namespace phasemix;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

// Three-phase fixture with a feedback loop but real spectrum.
PhaseTyped coxian3() {
  return make_phase_type({0.6, 0.3, 0.1}, {{-3.0, 2.0, 0.5}, {0.0, -2.0, 1.0}, {0.0, 0.0, -1.5}});
}

}  // namespace

TEST(PhValidate, AcceptsCanonicalFixtures) {
  const PhaseTyped e = exponential_ph(2.5);
  EXPECT_EQ(e.order(), 1);
  EXPECT_DOUBLE_EQ(e.exit_rates()(0), 2.5);
  const PhaseTyped er = erlang_ph(2, 1.0);
  EXPECT_DOUBLE_EQ(er.exit_rates()(0), 0.0);
  EXPECT_DOUBLE_EQ(er.exit_rates()(1), 1.0);
}

TEST(PhValidate, RejectsBadInput) {
  EXPECT_EQ(code_of([] { make_phase_type({0.5, 0.5}, {{-1, 0}, {0, 2}}); }), ErrorCode::NotSubIntensity);
  EXPECT_EQ(code_of([] { make_phase_type({0.5, 0.6}, {{-1, 0}, {0, -1}}); }),
            ErrorCode::NonStochasticInitial);
  EXPECT_EQ(code_of([] { make_phase_type({1.2, -0.2}, {{-1, 0}, {0, -1}}); }),
            ErrorCode::NonStochasticInitial);
  EXPECT_EQ(code_of([] { make_phase_type({1.0, 0.0}, {{-1, -0.5}, {0, -1}}); }),
            ErrorCode::NotSubIntensity);
  EXPECT_EQ(code_of([] { make_phase_type({1.0, 0.0}, {{-1, 2}, {0, -1}}); }), ErrorCode::NotSubIntensity);
  // closed class: rows sum to zero everywhere
  EXPECT_EQ(code_of([] { make_phase_type({1.0, 0.0}, {{-1, 1}, {1, -1}}); }), ErrorCode::NotSubIntensity);
  EXPECT_EQ(code_of([] { make_phase_type({1.0}, {{-1, 0}, {0, -1}}); }), ErrorCode::InvalidArgument);
}

TEST(PhValidate, MessageNamesTheEntry) {
  try {
    make_phase_type({0.5, 0.5}, {{-1, 0}, {0, 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("lambda[1][1]"), std::string::npos) << e.what();
  }
}

TEST(PhTail, ClosedForms) {
  EXPECT_NEAR(ph_tail(exponential_ph(1.0), 2.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(ph_tail(erlang_ph(2, 1.0), 1.0), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(ph_tail(hyperexponential_ph({0.5, 0.5}, {1.0, 2.0}), 1.0),
              0.5 * std::exp(-1.0) + 0.5 * std::exp(-2.0), 1e-15);
  EXPECT_EQ(ph_tail(coxian3(), 0.0), 1.0);
  EXPECT_THROW(ph_tail(coxian3(), -1.0), Error);
}

TEST(PhTail, ErlangFiveAcrossRange) {
  const PhaseTyped g = erlang_ph(5, 1.3);
  for (double x = 0.0; x <= 30.0; x += 0.75) {
    double s = 0.0;
    double term = 1.0;
    for (int k = 0; k < 5; ++k) {
      if (k > 0) term *= 1.3 * x / k;
      s += term;
    }
    const double exact = s * std::exp(-1.3 * x);
    EXPECT_NEAR(ph_tail(g, x) / exact, 1.0, 1e-10) << x;
    const double dens = std::pow(1.3, 5) * std::pow(x, 4) * std::exp(-1.3 * x) / 24.0;
    if (x > 0) EXPECT_NEAR(ph_density(g, x) / dens, 1.0, 1e-10) << x;
  }
}

TEST(PhDensity, Values) {
  EXPECT_NEAR(ph_density(exponential_ph(3.0), 0.0), 3.0, 1e-15);
  EXPECT_EQ(ph_density(erlang_ph(2, 1.0), 0.0), 0.0);
  EXPECT_NEAR(ph_density(erlang_ph(2, 1.0), 2.0), 2.0 * std::exp(-2.0), 1e-15);
}

TEST(PhDensity, IntegratesToOneAndMatchesTailDerivative) {
  const PhaseTyped g = coxian3();
  const double mass = oracle::simpson([&](double x) { return ph_density(g, x); }, 0.0, 40.0, 4000);
  EXPECT_NEAR(mass, 1.0 - ph_tail(g, 40.0), 1e-9);
  for (double x : {0.3, 1.0, 2.7, 6.0}) {
    const double h = 1e-5;
    const double fd = -(ph_tail(g, x + h) - ph_tail(g, x - h)) / (2 * h);
    EXPECT_NEAR(fd / ph_density(g, x), 1.0, 1e-6);
  }
}

TEST(PhTail, MonotoneAndBounded) {
  const PhaseTyped g = coxian3();
  double prev = 1.0;
  for (double x = 0.0; x < 60.0; x += 0.37) {
    const double t = ph_tail(g, x);
    EXPECT_GE(t, 0.0);
    EXPECT_LE(t, prev);
    prev = t;
  }
}

TEST(PhMoment, Values) {
  EXPECT_NEAR(ph_moment(exponential_ph(2.0), 3), 6.0 / 8.0, 1e-14);
  EXPECT_NEAR(ph_moment(erlang_ph(2, 1.0), 1), 2.0, 1e-14);
  EXPECT_NEAR(ph_moment(exponential_ph(1.0), 2, 3.0), 18.0, 1e-12);
  EXPECT_THROW(ph_moment(exponential_ph(1.0), 0), Error);
}

TEST(PhFractionalMoment, ExponentialGamma) {
  for (double a : {0.3, 1.0, 2.5, 4.0}) {
    EXPECT_NEAR(ph_fractional_moment(exponential_ph(2.0), a) / (std::tgamma(a + 1) / std::pow(2.0, a)),
                1.0, 1e-9);
  }
}

TEST(PhFractionalMoment, IntegerOrderAgreesWithMoment) {
  const PhaseTyped g = coxian3();
  EXPECT_NEAR(ph_fractional_moment(g, 1.0) / ph_moment(g, 1), 1.0, 1e-8);
  EXPECT_NEAR(ph_fractional_moment(g, 3.0) / ph_moment(g, 3), 1.0, 1e-8);
}

TEST(PhFractionalMoment, ErlangAgainstSimpson) {
  // x = u^2 removes the non-smooth endpoint behaviour of x^{3.5}.
  const double ref = oracle::simpson(
      [](double u) {
        const double x = u * u;
        return 2 * u * std::pow(x, 2.5) * x * std::exp(-x);
      },
      0.0, 12.0, 400000);
  EXPECT_NEAR(ph_fractional_moment(erlang_ph(2, 1.0), 2.5) / ref, 1.0, 1e-8);
}

TEST(PhSample, MeansAndDeterminism) {
  const auto a = ph_sample(exponential_ph(1.0), 42u, 100000);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  EXPECT_NEAR(mean, 1.0, 3.0 * 1.0 / std::sqrt(1e5));
  const auto b = ph_sample(erlang_ph(2, 1.0), 7u, 100000);
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
  EXPECT_NEAR(mb, 2.0, 3.0 * std::sqrt(2.0) / std::sqrt(1e5));
  EXPECT_EQ(ph_sample(coxian3(), 99u, 1000), ph_sample(coxian3(), 99u, 1000));
}

TEST(PhaseType, TemplatedOnScalar) {
  Eigen::Matrix<long double, 1, Eigen::Dynamic> beta(2);
  beta << 1.0L, 0.0L;
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> lambda(2, 2);
  lambda << -1.0L, 1.0L, 0.0L, -1.0L;
  const PhaseType<long double> g = ph_validate(beta, lambda);
  EXPECT_NEAR(static_cast<double>(ph_tail(g, 1.0L)), 2.0 * std::exp(-1.0), 1e-15);
}
