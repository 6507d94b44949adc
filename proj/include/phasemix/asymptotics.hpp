#ifndef PHASEMIX_ASYMPTOTICS_HPP
#define PHASEMIX_ASYMPTOTICS_HPP

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phasemix/mixture.hpp"

namespace phasemix {

enum class TailClass { Light, Heavy };

/// Heavy iff the scaler has unbounded support. Exact, no numerics.
TailClass classify_tail(const MixtureModel& m);

// ---------------------------------------------------------------------------
// Trends of log-valued traces

enum class Trend { ToZero, ToInfinity, Inconclusive };

/// Summary of the end of a log-valued trace: the trend is ToZero when the final strictly
/// decreasing run has at least `min_run` points and ends below -log_threshold, ToInfinity
/// for the mirror case, else Inconclusive.
struct TrendSummary {
  Trend trend = Trend::Inconclusive;
  int final_run = 0;  // length of the final strictly monotone run (either direction)
  double final_log = 0.0;
};
TrendSummary summarize_trend(const std::vector<double>& log_values, int min_run = 5,
                             double log_threshold = 10.0);

using LogTailFn = std::function<double(double)>;

struct ProductEvidence {
  double theta = 0.0;
  std::vector<double> log_sum;      // log e^{theta x} (H1(x/xi) + H2(xi))
  std::vector<double> log_product;  // log e^{theta x} H1(x/xi) H2(xi)
  TrendSummary sum;
  TrendSummary product;
};

struct ProductEvidenceReport {
  std::vector<double> x;
  std::vector<ProductEvidence> per_theta;
  /// Some theta drives the sum to zero.
  bool light_evidence = false;
  /// Every theta drives the product to infinity.
  bool heavy_evidence = false;
};

/// Numeric evidence for the two sufficient conditions on the product S1 * S2 of two
/// unbounded scalers with log tails h1, h2 and split point xi(x). Evidence only.
ProductEvidenceReport classify_general_mixture(const LogTailFn& log_tail1, const LogTailFn& log_tail2,
                                               const std::function<double(double)>& xi,
                                               const std::vector<double>& thetas,
                                               const std::vector<double>& x_grid);
/// Default x grid for the above: 1 to 1e30, 8 points per decade.
std::vector<double> product_evidence_grid();

/// Product of Weibull(., p) and Weibull(., q) scalers: light iff 1/p + 1/q < 1, as the
/// condition is stated. On the boundary 1/p + 1/q = 1 this reports heavy although the product
/// tail is then exponential (p = q = 2 gives 2 sqrt(u) K_1(2 sqrt(u)), u = x / (lambda beta)),
/// so the numeric evidence shows e^{theta x} H-bar -> 0 for small theta there.
TailClass weibull_condition(double p, double q);
/// Exponent gamma of xi(x) = x^gamma: the midpoint of (1/q, 1 - 1/p) in the light case and
/// of (1 - 1/p, 1/q) in the heavy case, both clipped to (0, 1); the common endpoint when the
/// interval is empty (1/p + 1/q = 1).
double weibull_split_exponent(double p, double q);

// ---------------------------------------------------------------------------
// Asymptotes

enum class AsymptoteKind { BreimanPower, ParetoExact, ZipfPower, BesselStretched, LognormalGumbel };
std::string_view to_string(AsymptoteKind kind);

struct NamedConstant {
  std::string name;
  double value = 0.0;
};

/// Closed-form tail asymptote. Kinds and the constants log_value reads:
///   BreimanPower     M * Hbar(x)                              M (needs `scaler`)
///   ParetoExact      C x^{-alpha}                             C, alpha
///   ZipfPower        C x^{-index}, index = alpha - 1          C, index
///   BesselStretched  coef x^power K_nu(b sqrt(x))             coef, power, nu, b
///   LognormalGumbel  c (x / lambda)^{eta-1} V(lambda x)       c, eta, lambda, sigma
/// with V the large-argument form of the (eta-1)-th reciprocal Laplace derivative.
struct AsymptoteForm {
  AsymptoteKind kind = AsymptoteKind::ParetoExact;
  std::vector<NamedConstant> constants;
  /// The leading constant was fitted at one large x rather than derived.
  bool calibrated = false;
  double calibration_x = 0.0;
  std::optional<Scaler> scaler;

  double constant(std::string_view name) const;
  bool has_constant(std::string_view name) const;
  double log_value(double x) const;
  double value(double x) const;
};

/// Breiman asymptote for a regularly varying scaler: ParetoExact C = M_G(alpha) for Pareto
/// (also reporting the spectral sum), ZipfPower for Zipf, BreimanPower otherwise.
/// NotRegularlyVarying when the scaler has no tail index.
AsymptoteForm frechet_asymptote(const MixtureModel& m);

/// C x^{-(alpha-1)} with C = sum_jk c_jk Gamma(alpha+k-1) / (zeta(alpha) lambda_j^{alpha+k-1}).
AsymptoteForm zipf_asymptote(const PhaseTyped& g, double alpha);

/// 2 p c x^{eta-1} (|log q| / (lambda x))^{(eta-2)/2} K_{eta-2}(2 sqrt(lambda x |log q|)),
/// q = 1 - p, with (lambda, eta) the dominant spectral pair. c is fitted against the
/// numeric tail at calibration_x; c_nominal = gamma / q is reported alongside (the scaler's
/// pmf p q^{i-1} is p q^i / q).
AsymptoteForm geometric_asymptote(const MixtureModel& m, double calibration_x);

/// Exponential scaler: gamma x^{eta-1} ell_{eta-1}(lambda x) with the Bessel closed form of
/// ell_k(theta) = E[S^{-k} e^{-theta/S}]; no fitted constant.
AsymptoteForm exponential_asymptote(const MixtureModel& m);

/// Lognormal scaler: c (x/lambda)^{eta-1} V(lambda x), c fitted at calibration_x;
/// c_nominal = gamma lambda^{eta-1}.
AsymptoteForm lognormal_asymptote(const MixtureModel& m, double calibration_x);

/// The family's closed-form asymptote: frechet_asymptote for regularly varying scalers, the
/// exponential, lognormal and geometric forms (fitted at calibration_x where needed);
/// nullopt for other families.
std::optional<AsymptoteForm> closed_form_asymptote(const MixtureModel& m, double calibration_x);

// ---------------------------------------------------------------------------
// Traces

enum class RatioTrend { Converges, Diverges, Vanishes, Inconclusive };
std::string_view to_string(RatioTrend trend);

struct RatioTrace {
  std::vector<double> x;
  std::vector<double> log_ratio;
  RatioTrend trend = RatioTrend::Inconclusive;
  double limit_estimate = 0.0;  // exp(final log ratio) when Converges
};

/// F-bar(x) / reference(x) over the grid, reference given as a log tail. The last decade
/// decides: Converges when the log ratio moves by less than 0.02 there, or when its
/// increments shrink geometrically (mean ratio <= 0.95) and the projected remaining
/// movement is below 0.05; Diverges / Vanishes when it moves monotonically by more than 0.05
/// up / down without its increments shrinking (mean successive ratio >= 0.98).
RatioTrace tail_ratio_trace(const MixtureModel& m, const LogTailFn& reference_log_tail,
                            const std::vector<double>& x_grid);

struct HeavyTailTrace {
  double theta = 0.0;
  std::vector<double> log_value;  // theta x + log F-bar(x)
  TrendSummary summary;
  bool increasing_last_decade = false;
  bool decreasing_last_decade = false;
};
HeavyTailTrace heavy_tail_trace(const MixtureModel& m, double theta, const std::vector<double>& x_grid);

enum class DomainKind { Frechet, Gumbel, Undetermined };
std::string_view to_string(DomainKind kind);

struct Domain {
  DomainKind kind = DomainKind::Undetermined;
  double alpha = 0.0;  // Frechet index
};

struct GumbelTrace {
  std::vector<double> x;
  std::vector<double> r;  // F-bar F'' / (F')^2
  bool analytic = false;  // spectral terms times closed-form Laplace derivatives
  bool decreasing_last_decade = false;  // |R + 1| over the final decade
  double final_gap = 0.0;               // |R + 1| at the largest x
  DomainKind verdict = DomainKind::Undetermined;
  std::vector<std::string> warnings;
};

struct GumbelPolicy {
  /// |R + 1| at the largest x must fall below this for a Gumbel verdict.
  double tolerance = 0.25;
};

/// von Mises ratio R(x) over the grid. Gumbel when |R + 1| is strictly decreasing over the
/// last decade (or stays below 1e-10 there) and ends below the tolerance, else Undetermined.
GumbelTrace gumbel_check(const MixtureModel& m, const std::vector<double>& x_grid, const GumbelPolicy& policy = {});

/// d-th derivative of F-bar as sum_jk c^{(d)}_jk x^k ell_{k+d}(lambda_j x), available when
/// the reciprocal Laplace transform has a closed form and G has a spectral expansion.
std::optional<SignedLog> analytic_tail_derivative(const MixtureModel& m, int order, double x);

enum class Verdict { Yes, No, Undetermined };
std::string_view to_string(Verdict v);

struct SubexpEstimate {
  double t = 0.0;
  std::vector<double> ratio;            // a(tx)/a(x) over the final decade
  double raw_min = 0.0;                 // minimum over the final decade
  double estimate = 0.0;                // extrapolated limit
  std::optional<double> analytic_limit;  // where a closed form gives the limit
};

struct SubexpReport {
  Verdict verdict = Verdict::Undetermined;
  std::vector<double> x;  // final-decade grid points
  std::vector<SubexpEstimate> per_t;
  double margin = 0.05;
};

/// Goldie-Resnick ratio a(tx)/a(x), a = F-bar / f. The limit is extrapolated linearly from
/// the first and last point of the final decade in u = 1/log x (regularly varying and
/// lognormal scalers, error ~ 1/log x) or u = x^{-1/2} (other unbounded scalers).
/// Yes when every estimate exceeds 1 + margin; No for light tails (subexponential
/// distributions are heavy-tailed).
SubexpReport subexp_check(const MixtureModel& m, const std::vector<double>& t_grid, const std::vector<double>& x_grid,
                          double margin = 0.05);

// ---------------------------------------------------------------------------
// Report

struct NormingConstants {
  double n = 0.0;
  double c_n = 0.0;  // inversion of 1 / asymptote
  double d_n = 0.0;
  /// The closed form as displayed for the family, when it differs from the inversion.
  std::optional<double> display_c_n;
};

struct MdaReport {
  TailClass tail_class = TailClass::Light;
  Domain mda;
  std::string route;  // "frechet theorem", "gumbel example", "numeric trace"
  std::optional<AsymptoteForm> asymptote;
  std::optional<RatioTrace> asymptote_trace;  // F-bar / asymptote
  std::optional<RatioTrace> scaler_trace;     // F-bar / H-bar
  std::vector<HeavyTailTrace> heavy_traces;
  std::optional<GumbelTrace> gumbel;
  SubexpReport subexponential;
  std::vector<NormingConstants> norming;
  std::vector<std::string> notes;
};

struct MdaOptions {
  std::vector<double> x_grid;  // empty: default_diagnostic_grid
  std::vector<double> t_grid = {2.0, 4.0, 9.0};
  std::vector<double> norming_n = {1e2, 1e4, 1e6};
  /// theta values of the e^{theta x} F-bar traces; empty: {0.1, 1, 10} for heavy tails and
  /// 0.5 * dominant_rate / sup S for bounded scalers.
  std::vector<double> thetas;
};

/// 8 points per decade over [1, 1e3] in units of typical_scale / dominant_rate.
std::vector<double> default_diagnostic_grid(const MixtureModel& m);

MdaReport mda_report(const MixtureModel& m, const MdaOptions& options = {});

/// d_n = 0 and c_n solving n * asymptote(c_n) = 1 by bisection in log x. NotFrechet unless
/// the report is Frechet with an asymptote.
NormingConstants norming_constants(const MdaReport& report, double n);

}  // namespace phasemix

#endif  // PHASEMIX_ASYMPTOTICS_HPP
