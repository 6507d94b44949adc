#include <gtest/gtest.h>

#include <cmath>

#include "phasemix/error.hpp"
#include "phasemix/phase_type.hpp"
#include "phasemix/spectral.hpp"

using namespace phasemix;

TEST(Spectral, Exponential) {
  const SpectralForm f = ph_spectral(exponential_ph(2.0));
  ASSERT_EQ(f.terms.size(), 1u);
  EXPECT_NEAR(f.terms[0].rate, 2.0, 1e-14);
  EXPECT_EQ(f.terms[0].block_size, 1);
  EXPECT_NEAR(f.terms[0].coeffs[0], 1.0, 1e-12);
  EXPECT_EQ(f.dominant.eta, 1);
  EXPECT_NEAR(f.dominant.gamma, 1.0, 1e-12);
  EXPECT_NEAR(f.dominant.mu, 2.0, 1e-12);
}

TEST(Spectral, ErlangJordanBlock) {
  const SpectralForm f = ph_spectral(erlang_ph(2, 1.0));
  ASSERT_EQ(f.terms.size(), 1u);
  EXPECT_EQ(f.terms[0].block_size, 2);
  EXPECT_NEAR(f.terms[0].coeffs[0], 1.0, 1e-10);
  EXPECT_NEAR(f.terms[0].coeffs[1], 1.0, 1e-10);
  EXPECT_EQ(f.dominant.eta, 2);

  const SpectralForm f5 = ph_spectral(erlang_ph(5, 0.7));
  EXPECT_EQ(f5.dominant.eta, 5);
  // c_k = rate^k / k!
  double c = 1.0;
  for (int k = 0; k < 5; ++k) {
    if (k > 0) c *= 0.7 / k;
    EXPECT_NEAR(f5.terms[0].coeffs[k], c, 1e-9 * std::max(1.0, c));
  }
}

TEST(Spectral, Hyperexponential) {
  const SpectralForm f = ph_spectral(hyperexponential_ph({0.5, 0.5}, {1.0, 2.0}));
  ASSERT_EQ(f.terms.size(), 2u);
  for (const auto& t : f.terms) {
    EXPECT_EQ(t.block_size, 1);
    EXPECT_NEAR(t.coeffs[0], 0.5, 1e-12);
  }
  EXPECT_NEAR(f.dominant.rate, 1.0, 1e-14);
}

TEST(Spectral, ReconstructionAndDominantAsymptote) {
  const PhaseTyped g =
      make_phase_type({0.6, 0.3, 0.1}, {{-3.0, 2.0, 0.5}, {0.0, -2.0, 1.0}, {0.0, 0.0, -1.5}});
  const SpectralForm f = ph_spectral(g);
  const double lam = f.dominant.rate;
  for (double x = 0.0; x <= 20.0 / lam; x += 0.2) {
    EXPECT_NEAR(f.tail(x), ph_tail(g, x), 1e-8 * ph_tail(g, x) + 1e-15) << x;
  }
  const double x = 40.0 / lam;
  const double asym = f.dominant.gamma * std::pow(x, f.dominant.eta - 1) * std::exp(-lam * x);
  EXPECT_NEAR(ph_tail(g, x) / asym, 1.0, 0.01);
  EXPECT_TRUE(f.dominant.constants_positive);
}

TEST(Spectral, DenseMatrixWithRepeatedEigenvalue) {
  // Erlang(3) conjugated by a permutation-free similarity keeps a 3-block at rate 2,
  // plus an independent exponential phase.
  const PhaseTyped g = make_phase_type(
      {0.5, 0.0, 0.0, 0.5}, {{-2, 2, 0, 0}, {0, -2, 2, 0}, {0, 0, -2, 0}, {0.5, 0, 0, -0.5}});
  const SpectralForm f = ph_spectral(g);
  EXPECT_NEAR(f.dominant.rate, 0.5, 1e-10);
  for (double x = 0.0; x < 30.0; x += 0.5) {
    EXPECT_NEAR(f.tail(x), ph_tail(g, x), 1e-8 * ph_tail(g, x) + 1e-15);
  }
}

TEST(Spectral, RejectsComplexSpectrum) {
  // cyclic three-state chain: eigenvalues of a circulant are complex
  const PhaseTyped g = make_phase_type({1, 0, 0}, {{-2, 2, 0}, {0, -2, 2}, {1.5, 0, -2}});
  try {
    ph_spectral(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ComplexSpectrum);
  }
}

TEST(Spectral, LogDerivativeAvoidsUnderflow) {
  const SpectralForm f = ph_spectral(erlang_ph(2, 1.0));
  const SignedLog v = f.log_tail_derivative(0, 2000.0);
  EXPECT_EQ(v.sign, 1);
  EXPECT_NEAR(v.log_abs, std::log1p(2000.0) - 2000.0, 1e-10);
  const SignedLog d1 = f.log_tail_derivative(1, 2000.0);  // -x e^{-x}
  EXPECT_EQ(d1.sign, -1);
  EXPECT_NEAR(d1.log_abs, std::log(2000.0) - 2000.0, 1e-10);
}

TEST(TailKernel, FallsBackForComplexSpectrum) {
  const PhaseTyped g = make_phase_type({1, 0, 0}, {{-2, 2, 0}, {0, -2, 2}, {1.5, 0, -2}});
  const TailKernel k(g);
  EXPECT_FALSE(k.spectral().has_value());
  EXPECT_NEAR(std::exp(k.log_tail(1.3)), ph_tail(g, 1.3), 1e-14);
  EXPECT_NEAR(std::exp(k.log_density(1.3)), ph_density(g, 1.3), 1e-13);
}

TEST(PhLightTail, ExponentialMomentDecays) {
  const PhaseTyped g = erlang_ph(3, 2.0);
  const double theta = 1.5;  // below the dominant rate 2
  double prev = 1e300;
  for (double x = 10.0; x < 200.0; x += 10.0) {
    const double v = std::exp(theta * x) * ph_tail(g, x);
    EXPECT_LT(v, prev);
    prev = v;
  }
}
