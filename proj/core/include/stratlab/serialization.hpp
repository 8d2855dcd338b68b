#pragma once

#include <string>

#include <json.hpp>

#include "stratlab/common.hpp"
#include "stratlab/geometry.hpp"
#include "stratlab/neighborhoods.hpp"
#include "stratlab/regularity.hpp"
#include "stratlab/strata.hpp"
#include "stratlab/subspace.hpp"
#include "stratlab/transversality.hpp"
#include "stratlab/witness.hpp"

namespace stratlab {

/// Insertion-ordered JSON keeps emitted key order deterministic, so equal
/// inputs produce byte-identical documents. Doubles round-trip exactly;
/// non-finite values are emitted as null.
using Json = nlohmann::ordered_json;

Field field_from_name(const std::string& name);

/// Parses text, turning syntax errors into MalformedInput with the byte
/// offset where parsing stopped.
Json parse_json(const std::string& text);
Json load_json_file(const std::string& path);

// --- domain types, both directions ---------------------------------------

Json to_json(const Box& box);
Box box_from_json(const Json& j);

/// {field, ambient_dim, basis}: basis is the flat row-major entry list of the
/// column-orthonormal basis matrix, each entry [re] or [re, im]. Loading
/// re-orthonormalizes, so hand-edited bases are tolerated.
Json to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j);

Json to_json(const PolynomialMap& p);
PolynomialMap polynomial_from_json(const Json& j);

Json to_json(const Stratum& s);
Stratum stratum_from_json(const Json& j);

Json to_json(const Stratification& sigma);
Stratification stratification_from_json(const Json& j);

Json to_json(const Schedule& s);
Schedule schedule_from_json(const Json& j);

// --- reports, emit only ---------------------------------------------------

Json to_json(const RankDecision& r);
Json to_json(const TransversalityVerdict& v);
Json to_json(const StratificationVerdict& v);
Json to_json(const CompactReport& r);
Json to_json(const ConditionAReport& r);
Json to_json(const WitnessFamily& w);
Json to_json(const ProbeReport& r);

// --- CSV ------------------------------------------------------------------

/// Numbers rounded to 12 significant digits; non-finite spelled inf/-inf/nan.
std::string csv_number(double x);

std::string to_csv(const CompactReport& r);
std::string to_csv(const ConditionAReport& r);
std::string to_csv(const WitnessFamily& w);
std::string to_csv(const ProbeReport& r);

}  // namespace stratlab
