#include "phasemix/io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "phasemix/error.hpp"

namespace phasemix {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

std::string type_name(const Json& j) { return j.type_name(); }

void require_object(const Json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(path, "expected an object, got " + type_name(j));
  for (const auto& item : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || item.key() == a;
    if (!ok) fail(path + "." + item.key(), "unknown field");
  }
}

const Json& field(const Json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number, got " + type_name(j));
  return j.get<double>();
}

std::vector<double> as_numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers, got " + type_name(j));
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

double number_field(const Json& j, const std::string& path, const char* key) {
  return as_number(field(j, path, key), path + "." + key);
}

// Re-throws a model validation error with the JSON path in front.
template <typename F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw Error(e.code(), path + ": " + msg);
  }
}

Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

PhaseTyped ph_from_json(const Json& j, const std::string& path) {
  require_object(j, path, {"beta", "lambda"});
  const std::vector<double> beta = as_numbers(field(j, path, "beta"), path + ".beta");
  const Json& lj = field(j, path, "lambda");
  if (!lj.is_array()) fail(path + ".lambda", "expected an array of rows, got " + type_name(lj));
  std::vector<std::vector<double>> lambda;
  for (std::size_t i = 0; i < lj.size(); ++i) {
    const std::string rp = path + ".lambda[" + std::to_string(i) + "]";
    lambda.push_back(as_numbers(lj[i], rp));
    if (lambda.back().size() != beta.size()) {
      fail(rp, "row has " + std::to_string(lambda.back().size()) + " entries, beta has " +
                   std::to_string(beta.size()));
    }
  }
  if (lambda.size() != beta.size()) {
    fail(path + ".lambda", "has " + std::to_string(lambda.size()) + " rows, beta has " + std::to_string(beta.size()));
  }
  return with_path(path, [&] { return make_phase_type(beta, lambda); });
}

Json ph_to_json(const PhaseTyped& g) {
  Json beta = Json::array();
  Json lambda = Json::array();
  for (Eigen::Index i = 0; i < g.order(); ++i) {
    beta.push_back(g.initial()(i));
    Json row = Json::array();
    for (Eigen::Index k = 0; k < g.order(); ++k) row.push_back(g.generator()(i, k));
    lambda.push_back(row);
  }
  return {{"beta", beta}, {"lambda", lambda}};
}

Scaler scaler_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object, got " + type_name(j));
  const Json& fj = field(j, path, "family");
  if (!fj.is_string()) fail(path + ".family", "expected a string, got " + type_name(fj));
  const std::string family = fj.get<std::string>();
  auto build = [&](ScalerFamily f) { return with_path(path, [&] { return make_scaler(std::move(f)); }); };
  auto num_of = [&](const char* key) { return number_field(j, path, key); };

  if (family == "exponential") {
    require_object(j, path, {"family", "rate"});
    return build(ExponentialScaler{num_of("rate")});
  }
  if (family == "pareto") {
    require_object(j, path, {"family", "alpha"});
    return build(ParetoScaler{num_of("alpha")});
  }
  if (family == "lognormal") {
    require_object(j, path, {"family", "sigma"});
    return build(LognormalScaler{num_of("sigma")});
  }
  if (family == "weibull") {
    require_object(j, path, {"family", "scale", "shape"});
    return build(WeibullScaler{num_of("scale"), num_of("shape")});
  }
  if (family == "gamma") {
    require_object(j, path, {"family", "shape", "rate"});
    return build(GammaScaler{num_of("shape"), num_of("rate")});
  }
  if (family == "zipf") {
    require_object(j, path, {"family", "alpha"});
    return build(ZipfScaler{num_of("alpha")});
  }
  if (family == "geometric") {
    require_object(j, path, {"family", "p"});
    return build(GeometricScaler{num_of("p")});
  }
  if (family == "finite_discrete") {
    require_object(j, path, {"family", "points", "probs"});
    return build(FiniteDiscreteScaler{as_numbers(field(j, path, "points"), path + ".points"),
                                      as_numbers(field(j, path, "probs"), path + ".probs")});
  }
  if (family == "point_mass") {
    require_object(j, path, {"family", "point"});
    return build(PointMassScaler{num_of("point")});
  }
  fail(path + ".family", "unknown family \"" + family +
                             "\" (expected exponential, pareto, lognormal, weibull, gamma, zipf, geometric, "
                             "finite_discrete or point_mass)");
}

Json scaler_to_json(const Scaler& h) {
  Json j = {{"family", h.name()}};
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialScaler>) {
          j["rate"] = f.rate;
        } else if constexpr (std::is_same_v<T, ParetoScaler> || std::is_same_v<T, ZipfScaler>) {
          j["alpha"] = f.alpha;
        } else if constexpr (std::is_same_v<T, LognormalScaler>) {
          j["sigma"] = f.sigma;
        } else if constexpr (std::is_same_v<T, WeibullScaler>) {
          j["scale"] = f.scale;
          j["shape"] = f.shape;
        } else if constexpr (std::is_same_v<T, GammaScaler>) {
          j["shape"] = f.shape;
          j["rate"] = f.rate;
        } else if constexpr (std::is_same_v<T, GeometricScaler>) {
          j["p"] = f.p;
        } else if constexpr (std::is_same_v<T, FiniteDiscreteScaler>) {
          j["points"] = f.points;
          j["probs"] = f.probs;
        } else {
          j["point"] = f.point;
        }
      },
      h.family());
  return j;
}

MixturePolicy policy_from_json(const Json& j, const std::string& path) {
  require_object(j, path, {"quad_rel_tol", "max_subdivisions", "series_tol", "max_terms"});
  MixturePolicy p;
  auto integer = [&](const char* key) -> long long {
    const Json& v = j.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer, got " + type_name(v));
    return v.get<long long>();
  };
  if (j.contains("quad_rel_tol")) p.quad_rel_tol = number_field(j, path, "quad_rel_tol");
  if (j.contains("series_tol")) p.series_tol = number_field(j, path, "series_tol");
  if (j.contains("max_subdivisions")) {
    const long long v = integer("max_subdivisions");
    if (v < 1 || v > 1 << 20) fail(path + ".max_subdivisions", "must lie in [1, 2^20]");
    p.max_subdivisions = static_cast<int>(v);
  }
  if (j.contains("max_terms")) {
    const long long v = integer("max_terms");
    if (v < 1) fail(path + ".max_terms", "must be >= 1");
    p.max_terms = static_cast<std::size_t>(v);
  }
  with_path(path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

Json policy_to_json(const MixturePolicy& p) {
  return {{"quad_rel_tol", p.quad_rel_tol},
          {"max_subdivisions", p.max_subdivisions},
          {"series_tol", p.series_tol},
          {"max_terms", p.max_terms}};
}

MixtureModel mixture_from_json(const Json& j) {
  require_object(j, "model", {"ph", "scaler", "policy"});
  PhaseTyped g = ph_from_json(field(j, "model", "ph"), "ph");
  Scaler h = scaler_from_json(field(j, "model", "scaler"), "scaler");
  MixturePolicy p;
  if (j.contains("policy")) p = policy_from_json(j.at("policy"), "policy");
  return with_path("model", [&] { return MixtureModel(std::move(g), std::move(h), p); });
}

Json mixture_to_json(const MixtureModel& m) {
  return {{"ph", ph_to_json(m.phase_type())},
          {"scaler", scaler_to_json(m.scaler())},
          {"policy", policy_to_json(m.policy())}};
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // byte offset -> line and column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorCode::ParseError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

MixtureModel load_mixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const Json j = parse_json_text(ss.str(), path);
  try {
    return mixture_from_json(j);
  } catch (const Error& e) {
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    throw Error(e.code(), path + ": " + (colon == std::string::npos ? msg : msg.substr(colon + 2)));
  }
}

Json to_json(const AsymptoteForm& f) {
  Json c = Json::object();
  for (const auto& k : f.constants) c[k.name] = num(k.value);
  Json j = {{"kind", std::string(to_string(f.kind))}, {"constants", c}, {"calibrated", f.calibrated}};
  if (f.calibrated) j["calibration_x"] = num(f.calibration_x);
  if (f.scaler) j["scaler"] = scaler_to_json(*f.scaler);
  return j;
}

Json to_json(const RatioTrace& t) {
  return {{"x", nums(t.x)},
          {"log_ratio", nums(t.log_ratio)},
          {"trend", std::string(to_string(t.trend))},
          {"limit_estimate", num(t.limit_estimate)}};
}

namespace {

std::string_view trend_name(Trend t) {
  switch (t) {
    case Trend::ToZero: return "to_zero";
    case Trend::ToInfinity: return "to_infinity";
    case Trend::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

}  // namespace

Json to_json(const GumbelTrace& g) {
  return {{"x", nums(g.x)},
          {"r", nums(g.r)},
          {"analytic", g.analytic},
          {"decreasing_last_decade", g.decreasing_last_decade},
          {"final_gap", num(g.final_gap)},
          {"verdict", std::string(to_string(g.verdict))},
          {"warnings", g.warnings}};
}

Json to_json(const SubexpReport& r) {
  Json per = Json::array();
  for (const auto& e : r.per_t) {
    Json je = {{"t", num(e.t)}, {"ratio", nums(e.ratio)}, {"raw_min", num(e.raw_min)}, {"estimate", num(e.estimate)}};
    je["analytic_limit"] = e.analytic_limit ? num(*e.analytic_limit) : Json(nullptr);
    per.push_back(je);
  }
  return {{"verdict", std::string(to_string(r.verdict))}, {"margin", num(r.margin)}, {"x", nums(r.x)}, {"per_t", per}};
}

Json to_json(const NormingConstants& n) {
  Json j = {{"n", num(n.n)}, {"c_n", num(n.c_n)}, {"d_n", num(n.d_n)}};
  j["display_c_n"] = n.display_c_n ? num(*n.display_c_n) : Json(nullptr);
  return j;
}

Json to_json(const MdaReport& r) {
  Json j;
  j["tail_class"] = r.tail_class == TailClass::Heavy ? "heavy" : "light";
  j["mda"] = {{"kind", std::string(to_string(r.mda.kind))}};
  if (r.mda.kind == DomainKind::Frechet) j["mda"]["alpha"] = num(r.mda.alpha);
  j["route"] = r.route;
  j["asymptote"] = r.asymptote ? to_json(*r.asymptote) : Json(nullptr);
  j["asymptote_trace"] = r.asymptote_trace ? to_json(*r.asymptote_trace) : Json(nullptr);
  j["scaler_trace"] = r.scaler_trace ? to_json(*r.scaler_trace) : Json(nullptr);
  Json heavy = Json::array();
  for (const auto& h : r.heavy_traces) {
    heavy.push_back({{"theta", num(h.theta)},
                     {"log_value", nums(h.log_value)},
                     {"trend", std::string(trend_name(h.summary.trend))},
                     {"increasing_last_decade", h.increasing_last_decade},
                     {"decreasing_last_decade", h.decreasing_last_decade}});
  }
  j["heavy_traces"] = heavy;
  j["gumbel"] = r.gumbel ? to_json(*r.gumbel) : Json(nullptr);
  j["subexponential"] = to_json(r.subexponential);
  Json norming = Json::array();
  for (const auto& n : r.norming) norming.push_back(to_json(n));
  j["norming"] = norming;
  j["notes"] = r.notes;
  return j;
}

}  // namespace phasemix
