#ifndef PHASEMIX_IO_HPP
#define PHASEMIX_IO_HPP

#include <string>

#include <json.hpp>

#include "phasemix/asymptotics.hpp"
#include "phasemix/mixture.hpp"

namespace phasemix {

using Json = nlohmann::json;

/// Parsers are strict: unknown keys, missing keys and wrong types are ParseError with the
/// offending field path (e.g. "ph.lambda[1][0]"). Model invariants are then checked by the
/// usual constructors (NotSubIntensity, InvalidScaler, ...), with the path prefixed.

/// {"beta": [..], "lambda": [[..], ..]}
PhaseTyped ph_from_json(const Json& j, const std::string& path = "ph");
Json ph_to_json(const PhaseTyped& g);

/// {"family": "pareto", "alpha": 2.5}, one shape per family.
Scaler scaler_from_json(const Json& j, const std::string& path = "scaler");
Json scaler_to_json(const Scaler& h);

/// {"quad_rel_tol", "max_subdivisions", "series_tol", "max_terms"}, all optional.
MixturePolicy policy_from_json(const Json& j, const std::string& path = "policy");
Json policy_to_json(const MixturePolicy& p);

/// {"ph": .., "scaler": .., "policy": {..}}; "policy" optional.
MixtureModel mixture_from_json(const Json& j);
Json mixture_to_json(const MixtureModel& m);

/// Parses text, reporting syntax errors by line and column.
Json parse_json_text(const std::string& text, const std::string& source);
MixtureModel load_mixture(const std::string& path);

Json to_json(const AsymptoteForm& f);
Json to_json(const RatioTrace& t);
Json to_json(const GumbelTrace& g);
Json to_json(const SubexpReport& r);
Json to_json(const NormingConstants& n);
Json to_json(const MdaReport& r);

}  // namespace phasemix

#endif  // PHASEMIX_IO_HPP
