#include "stratlab/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace stratlab {

namespace {

[[noreturn]] void malformed(const std::string& context, const std::string& detail) {
  throw MalformedInput(context + ": " + detail);
}

const Json& require(const Json& j, const char* key, const char* context) {
  if (!j.is_object()) malformed(context, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) malformed(context, std::string("missing key '") + key + "'");
  return *it;
}

double number_at(const Json& j, const char* key, const char* context) {
  const Json& v = require(j, key, context);
  if (!v.is_number()) malformed(context, std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

int int_at(const Json& j, const char* key, const char* context) {
  const Json& v = require(j, key, context);
  if (!v.is_number_integer()) malformed(context, std::string("key '") + key + "' must be an integer");
  return v.get<int>();
}

bool bool_at(const Json& j, const char* key, const char* context) {
  const Json& v = require(j, key, context);
  if (!v.is_boolean()) malformed(context, std::string("key '") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string string_at(const Json& j, const char* key, const char* context) {
  const Json& v = require(j, key, context);
  if (!v.is_string()) malformed(context, std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

Json bound_to_json(double x) {
  if (std::isinf(x)) return nullptr;
  return x;
}

double bound_from_json(const Json& v, double infinite, const char* context) {
  if (v.is_null()) return infinite;
  if (!v.is_number()) malformed(context, "bounds must be numbers or null");
  return v.get<double>();
}

/// One matrix entry under the given field: a bare number over the reals,
/// an [re, im] pair over the complexes.
Json entry_to_json(Field field, const Complex& value) {
  if (field == Field::Real) return value.real();
  return Json::array({value.real(), value.imag()});
}

Complex entry_from_json(Field field, const Json& v, const char* context) {
  if (field == Field::Real) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 1 && v[0].is_number()) return Complex(v[0].get<double>(), 0.0);
    malformed(context, "real entries must be numbers or [re]");
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return Complex(v[0].get<double>(), v[1].get<double>());
  }
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  malformed(context, "complex entries must be [re, im] pairs");
}

Json cvec_to_json(Field field, const CVec& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(entry_to_json(field, v(i)));
  return out;
}

CVec cvec_from_json(Field field, const Json& j, const char* context) {
  if (!j.is_array()) malformed(context, "expected an array of entries");
  CVec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<int>(i)) = entry_from_json(field, j[i], context);
  }
  return v;
}

Json vec_to_json(const Vec& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json cmat_to_json(Field field, const CMat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(entry_to_json(field, m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json coeff_to_json(Field field, const Complex& c) { return entry_to_json(field, c); }

const char* region_kind_name(RegionKind k) {
  return k == RegionKind::Positive ? "positive" : "nonzero";
}

RegionKind region_kind_from_name(const std::string& name, const char* context) {
  if (name == "positive") return RegionKind::Positive;
  if (name == "nonzero") return RegionKind::Nonzero;
  malformed(context, "region kind must be 'positive' or 'nonzero'");
}

const char* verdict_reason_text(VerdictReason r) { return verdict_reason_name(r); }

Json record_to_json(const CompactCheckRecord& rec) {
  Json j;
  j["grid_index"] = rec.grid_index;
  j["x"] = vec_to_json(rec.x);
  j["stratum"] = rec.stratum;
  j["verdict"] = to_json(rec.verdict);
  return j;
}

}  // namespace

Field field_from_name(const std::string& name) {
  if (name == "real") return Field::Real;
  if (name == "complex") return Field::Complex;
  throw MalformedInput("field must be 'real' or 'complex', got '" + name + "'");
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedInput("JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedInput(path + ": JSON parse error at byte " + std::to_string(e.byte) + ": " +
                         e.what());
  }
}

Json to_json(const Box& box) {
  Json lo = Json::array(), hi = Json::array();
  for (int i = 0; i < box.dim(); ++i) {
    lo.push_back(bound_to_json(box.lo(i)));
    hi.push_back(bound_to_json(box.hi(i)));
  }
  Json j;
  j["lo"] = std::move(lo);
  j["hi"] = std::move(hi);
  return j;
}

Box box_from_json(const Json& j) {
  const char* ctx = "box";
  const Json& lo = require(j, "lo", ctx);
  const Json& hi = require(j, "hi", ctx);
  if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size()) {
    malformed(ctx, "'lo' and 'hi' must be arrays of equal length");
  }
  const double inf = std::numeric_limits<double>::infinity();
  Vec l(static_cast<int>(lo.size())), h(static_cast<int>(hi.size()));
  for (std::size_t i = 0; i < lo.size(); ++i) {
    l(static_cast<int>(i)) = bound_from_json(lo[i], -inf, ctx);
    h(static_cast<int>(i)) = bound_from_json(hi[i], inf, ctx);
  }
  return Box(std::move(l), std::move(h));
}

Json to_json(const Subspace& s) {
  Json basis = Json::array();
  for (int i = 0; i < s.ambient_dim(); ++i) {
    for (int j = 0; j < s.dim(); ++j) {
      const Complex e = s.basis()(i, j);
      if (s.field() == Field::Real) {
        basis.push_back(Json::array({e.real()}));
      } else {
        basis.push_back(Json::array({e.real(), e.imag()}));
      }
    }
  }
  Json j;
  j["field"] = field_name(s.field());
  j["ambient_dim"] = s.ambient_dim();
  j["basis"] = std::move(basis);
  return j;
}

Subspace subspace_from_json(const Json& j) {
  const char* ctx = "subspace";
  const Field field = field_from_name(string_at(j, "field", ctx));
  const int ambient = int_at(j, "ambient_dim", ctx);
  if (ambient < 0) malformed(ctx, "ambient_dim must be nonnegative");
  const Json& basis = require(j, "basis", ctx);
  if (!basis.is_array()) malformed(ctx, "'basis' must be an array");
  if (ambient == 0) {
    if (!basis.empty()) malformed(ctx, "ambient dimension zero admits no basis entries");
    return Subspace::zero(field, 0);
  }
  if (basis.size() % static_cast<std::size_t>(ambient) != 0) {
    malformed(ctx, "basis length must be a multiple of ambient_dim");
  }
  const int cols = static_cast<int>(basis.size()) / ambient;
  if (cols == 0) return Subspace::zero(field, ambient);
  CMat m(ambient, cols);
  std::size_t idx = 0;
  for (int i = 0; i < ambient; ++i) {
    for (int c = 0; c < cols; ++c) m(i, c) = entry_from_json(field, basis[idx++], ctx);
  }
  try {
    return Subspace::from_span(field, m);
  } catch (const Error& e) {
    malformed(ctx, e.what());
  }
}

Json to_json(const PolynomialMap& p) {
  Json coords = Json::array();
  for (const auto& coord : p.terms()) {
    Json terms = Json::array();
    for (const Monomial& t : coord) {
      Json powers = Json::array();
      for (int e : t.powers) powers.push_back(e);
      terms.push_back(Json::array({std::move(powers), coeff_to_json(p.field(), t.coeff)}));
    }
    coords.push_back(std::move(terms));
  }
  Json j;
  j["m"] = p.source_dim();
  j["n"] = p.target_dim();
  j["field"] = field_name(p.field());
  j["coords"] = std::move(coords);
  return j;
}

PolynomialMap polynomial_from_json(const Json& j) {
  const char* ctx = "polynomial map";
  const int m = int_at(j, "m", ctx);
  const int n = int_at(j, "n", ctx);
  const Field field = field_from_name(string_at(j, "field", ctx));
  const Json& coords = require(j, "coords", ctx);
  if (!coords.is_array() || coords.size() != static_cast<std::size_t>(n)) {
    malformed(ctx, "'coords' must hold one term list per target coordinate");
  }
  std::vector<std::vector<Monomial>> table;
  table.reserve(coords.size());
  for (const Json& coord : coords) {
    if (!coord.is_array()) malformed(ctx, "each coordinate must be an array of terms");
    std::vector<Monomial> terms;
    terms.reserve(coord.size());
    for (const Json& term : coord) {
      if (!term.is_array() || term.size() != 2 || !term[0].is_array()) {
        malformed(ctx, "each term must be [[powers...], coeff]");
      }
      Monomial mono;
      mono.powers.reserve(term[0].size());
      for (const Json& e : term[0]) {
        if (!e.is_number_integer()) malformed(ctx, "powers must be integers");
        mono.powers.push_back(e.get<int>());
      }
      if (static_cast<int>(mono.powers.size()) != m) {
        malformed(ctx, "each power list must have one entry per source variable");
      }
      mono.coeff = entry_from_json(field, term[1], ctx);
      terms.push_back(std::move(mono));
    }
    table.push_back(std::move(terms));
  }
  try {
    return PolynomialMap(m, n, field, std::move(table));
  } catch (const Error& e) {
    malformed(ctx, e.what());
  }
}

Json to_json(const Stratum& s) {
  Json repr;
  if (s.is_implicit()) {
    const ImplicitRepr& r = s.implicit_repr();
    repr["type"] = "implicit";
    repr["map"] = to_json(r.constraint);
    Json region = Json::array();
    for (const RegionInequality& q : r.region) {
      Json one;
      one["poly"] = to_json(q.poly);
      one["kind"] = region_kind_name(q.kind);
      region.push_back(std::move(one));
    }
    repr["region"] = std::move(region);
  } else {
    const ParametricRepr& r = s.parametric_repr();
    repr["type"] = "parametric";
    repr["map"] = to_json(r.immersion);
    repr["param_box"] = to_json(r.param_box);
    repr["lo_open"] = r.lo_open;
    repr["hi_open"] = r.hi_open;
  }
  Json j;
  j["name"] = s.name();
  j["ambient_dim"] = s.ambient_dim();
  j["dim"] = s.dim();
  j["field"] = field_name(s.field());
  j["repr"] = std::move(repr);
  j["sample_box"] = to_json(s.sample_box());
  return j;
}

Stratum stratum_from_json(const Json& j) {
  const char* ctx = "stratum";
  const std::string name = string_at(j, "name", ctx);
  const int ambient = int_at(j, "ambient_dim", ctx);
  const int dim = int_at(j, "dim", ctx);
  const Field field = field_from_name(string_at(j, "field", ctx));
  const Json& repr = require(j, "repr", ctx);
  const std::string type = string_at(repr, "type", ctx);
  std::optional<Box> sample;
  if (j.contains("sample_box") && !j["sample_box"].is_null()) {
    sample = box_from_json(j["sample_box"]);
  }
  try {
    if (type == "implicit") {
      ImplicitRepr r{polynomial_from_json(require(repr, "map", ctx)), {}};
      if (repr.contains("region")) {
        const Json& region = repr["region"];
        if (!region.is_array()) malformed(ctx, "'region' must be an array");
        for (const Json& one : region) {
          r.region.push_back(
              RegionInequality{polynomial_from_json(require(one, "poly", ctx)),
                               region_kind_from_name(string_at(one, "kind", ctx), ctx)});
        }
      }
      return Stratum(name, ambient, dim, field, std::move(r), std::move(sample));
    }
    if (type == "parametric") {
      ParametricRepr r{polynomial_from_json(require(repr, "map", ctx)),
                       box_from_json(require(repr, "param_box", ctx)),
                       {},
                       {}};
      if (repr.contains("lo_open")) r.lo_open = repr["lo_open"].get<std::vector<bool>>();
      if (repr.contains("hi_open")) r.hi_open = repr["hi_open"].get<std::vector<bool>>();
      return Stratum(name, ambient, dim, std::move(r), std::move(sample));
    }
  } catch (const MalformedInput&) {
    throw;
  } catch (const Error& e) {
    malformed(std::string(ctx) + " '" + name + "'", e.what());
  }
  malformed(ctx, "repr type must be 'implicit' or 'parametric'");
}

Json to_json(const Stratification& sigma) {
  Json strata = Json::array();
  for (const Stratum& s : sigma.strata) strata.push_back(to_json(s));
  Json j;
  j["name"] = sigma.name;
  j["ambient_dim"] = sigma.ambient_dim;
  j["field"] = field_name(sigma.field);
  j["strata"] = std::move(strata);
  j["union_closed"] = sigma.union_closed;
  j["declared_a_regular"] =
      sigma.declared_a_regular ? Json(*sigma.declared_a_regular) : Json(nullptr);
  return j;
}

Stratification stratification_from_json(const Json& j) {
  const char* ctx = "stratification";
  Stratification sigma;
  sigma.name = string_at(j, "name", ctx);
  sigma.ambient_dim = int_at(j, "ambient_dim", ctx);
  sigma.field = field_from_name(string_at(j, "field", ctx));
  const Json& strata = require(j, "strata", ctx);
  if (!strata.is_array()) malformed(ctx, "'strata' must be an array");
  for (const Json& s : strata) sigma.strata.push_back(stratum_from_json(s));
  sigma.union_closed = bool_at(j, "union_closed", ctx);
  if (j.contains("declared_a_regular") && !j["declared_a_regular"].is_null()) {
    sigma.declared_a_regular = j["declared_a_regular"].get<bool>();
  }
  for (const Stratum& s : sigma.strata) {
    if (s.ambient_dim() != sigma.ambient_dim || s.field() != sigma.field) {
      malformed(ctx, "stratum '" + s.name() + "' does not match the ambient declaration");
    }
  }
  return sigma;
}

Json to_json(const Schedule& s) {
  Json j;
  switch (s.kind) {
    case Schedule::Kind::Geometric:
      j["kind"] = "geometric";
      j["t0"] = s.t0;
      j["rho"] = s.rho;
      j["count"] = s.count;
      break;
    case Schedule::Kind::Harmonic:
      j["kind"] = "harmonic";
      j["t0"] = s.t0;
      j["count"] = s.count;
      break;
    case Schedule::Kind::Explicit:
      j["kind"] = "explicit";
      j["values"] = s.values;
      break;
  }
  return j;
}

Schedule schedule_from_json(const Json& j) {
  const char* ctx = "schedule";
  const std::string kind = string_at(j, "kind", ctx);
  if (kind == "geometric") {
    return Schedule::geometric(number_at(j, "t0", ctx), number_at(j, "rho", ctx),
                               int_at(j, "count", ctx));
  }
  if (kind == "harmonic") {
    return Schedule::harmonic(number_at(j, "t0", ctx), int_at(j, "count", ctx));
  }
  if (kind == "explicit") {
    const Json& values = require(j, "values", ctx);
    if (!values.is_array()) malformed(ctx, "'values' must be an array");
    return Schedule::explicit_times(values.get<std::vector<double>>());
  }
  malformed(ctx, "kind must be 'geometric', 'harmonic', or 'explicit'");
}

Json to_json(const RankDecision& r) {
  Json j;
  j["rank"] = r.rank;
  j["smallest_kept"] = r.smallest_kept;
  j["largest_dropped"] = r.largest_dropped;
  j["conclusive"] = r.conclusive;
  return j;
}

Json to_json(const TransversalityVerdict& v) {
  Json j;
  j["transverse"] = v.transverse;
  j["reason"] = verdict_reason_text(v.reason);
  j["margin"] = v.margin ? Json(*v.margin) : Json(nullptr);
  j["conclusive"] = v.conclusive;
  j["rank"] = to_json(v.rank_decision);
  return j;
}

Json to_json(const StratificationVerdict& v) {
  Json per = Json::array();
  for (const auto& [name, verdict] : v.per_stratum) {
    Json one;
    one["stratum"] = name;
    one["verdict"] = to_json(verdict);
    per.push_back(std::move(one));
  }
  Json j;
  j["transverse"] = v.transverse;
  j["conclusive"] = v.conclusive;
  j["per_stratum"] = std::move(per);
  return j;
}

Json to_json(const CompactReport& r) {
  Json j;
  j["transverse"] = r.transverse;
  j["conclusive"] = r.conclusive;
  j["points"] = r.points;
  j["min_margin"] = bound_to_json(r.min_margin);
  j["margin_argmin_index"] = r.margin_argmin_index ? Json(*r.margin_argmin_index) : Json(nullptr);
  j["margin_argmin_stratum"] = r.margin_argmin_stratum;
  j["min_clearance"] = bound_to_json(r.min_clearance);
  j["clearance_argmin_index"] =
      r.clearance_argmin_index ? Json(*r.clearance_argmin_index) : Json(nullptr);
  Json failures = Json::array();
  for (const CompactCheckRecord& rec : r.failures) failures.push_back(record_to_json(rec));
  j["failures"] = std::move(failures);
  Json inconclusive = Json::array();
  for (const CompactCheckRecord& rec : r.inconclusive_points) {
    inconclusive.push_back(record_to_json(rec));
  }
  j["inconclusive_points"] = std::move(inconclusive);
  return j;
}

Json to_json(const ConditionAReport& r) {
  Json j;
  j["outcome"] = condition_a_outcome_name(r.outcome);
  j["converged"] = r.converged;
  j["holds"] = r.holds;
  j["containment_residual"] = bound_to_json(r.containment_residual);
  j["max_tail_distance"] = r.max_tail_distance;
  j["approach_first"] = r.approach_first;
  j["approach_last"] = r.approach_last;
  j["tau_limit"] = r.tau_limit ? to_json(*r.tau_limit) : Json(nullptr);
  j["tail_distances"] = r.tail_distances;
  j["per_step_residuals"] = r.per_step_residuals;
  return j;
}

Json to_json(const WitnessFamily& w) {
  Json j;
  j["field"] = field_name(w.field);
  j["ambient_dim"] = w.fault.ambient;
  j["x"] = cvec_to_json(w.field, w.fault.x);
  j["min_dim"] = w.fault.min_dim;
  Json dec;
  dec["e"] = to_json(w.decomposition.e);
  dec["w1"] = to_json(w.decomposition.w1);
  dec["w2"] = to_json(w.decomposition.w2);
  dec["t1"] = to_json(w.decomposition.t1);
  dec["t2"] = to_json(w.decomposition.t2);
  j["decomposition"] = std::move(dec);
  j["h"] = to_json(w.h);
  j["frame"] = cmat_to_json(w.field, w.frame);
  if (w.field == Field::Real) {
    j["plateau"] = to_json(w.plateau);
    j["support"] = to_json(w.support);
  }
  j["base_verdict"] = to_json(w.base_verdict);
  j["c1_constant"] = w.c1_constant;
  j["nontransverse_from"] = w.nontransverse_from;
  Json members = Json::array();
  const int h_dim = w.h.dim();
  for (const WitnessMember& m : w.members) {
    Json one;
    one["k"] = m.k;
    one["y"] = cvec_to_json(w.field, m.y);
    Json directions = Json::array();
    for (int c = 0; c < h_dim; ++c) {
      directions.push_back(cvec_to_json(w.field, m.frame.col(c)));
    }
    one["directions"] = std::move(directions);
    one["frame_residual"] = m.frame_residual;
    one["margin"] = m.margin;
    one["c1_distance"] = m.c1_gap;
    one["verdict"] = to_json(m.verdict);
    members.push_back(std::move(one));
  }
  j["members"] = std::move(members);
  return j;
}

Json to_json(const ProbeReport& r) {
  Json j;
  j["samples"] = r.samples;
  j["transverse_count"] = r.transverse_count;
  j["min_margin_seen"] = bound_to_json(r.min_margin_seen);
  if (r.counterexample) {
    Json c;
    c["description"] = r.counterexample->description;
    c["parameter"] = r.counterexample->parameter ? Json(*r.counterexample->parameter) : Json(nullptr);
    c["failure_point"] = vec_to_json(r.counterexample->failure_point);
    c["verdict"] = to_json(r.counterexample->verdict);
    c["escapes_compact"] = r.counterexample->escapes_compact;
    j["counterexample"] = std::move(c);
  } else {
    j["counterexample"] = nullptr;
  }
  return j;
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string to_csv(const CompactReport& r) {
  std::ostringstream out;
  out << "transverse,conclusive,points,min_margin,min_clearance,failures,inconclusive\n";
  out << (r.transverse ? 1 : 0) << ',' << (r.conclusive ? 1 : 0) << ',' << r.points << ','
      << csv_number(r.min_margin) << ',' << csv_number(r.min_clearance) << ','
      << r.failures.size() << ',' << r.inconclusive_points.size() << '\n';
  return out.str();
}

std::string to_csv(const ConditionAReport& r) {
  std::ostringstream out;
  out << "# outcome=" << condition_a_outcome_name(r.outcome) << " holds=" << (r.holds ? 1 : 0)
      << " containment_residual=" << csv_number(r.containment_residual)
      << " max_tail_distance=" << csv_number(r.max_tail_distance) << '\n';
  out << "step,per_step_residual,tail_distance\n";
  const std::size_t rows = std::max(r.per_step_residuals.size(), r.tail_distances.size());
  for (std::size_t i = 0; i < rows; ++i) {
    out << (i + 1) << ',';
    if (i < r.per_step_residuals.size()) out << csv_number(r.per_step_residuals[i]);
    out << ',';
    if (i < r.tail_distances.size()) out << csv_number(r.tail_distances[i]);
    out << '\n';
  }
  return out.str();
}

std::string to_csv(const WitnessFamily& w) {
  std::ostringstream out;
  out << "# field=" << field_name(w.field) << " h_dim=" << w.h.dim()
      << " c1_constant=" << csv_number(w.c1_constant)
      << " nontransverse_from=" << w.nontransverse_from << '\n';
  out << "k,margin,c1_distance,frame_residual,transverse,conclusive\n";
  for (const WitnessMember& m : w.members) {
    out << m.k << ',' << csv_number(m.margin) << ',' << csv_number(m.c1_gap) << ','
        << csv_number(m.frame_residual) << ',' << (m.verdict.transverse ? 1 : 0) << ','
        << (m.verdict.conclusive ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string to_csv(const ProbeReport& r) {
  std::ostringstream out;
  out << "samples,transverse_count,min_margin_seen,has_counterexample,parameter,escapes_compact\n";
  out << r.samples << ',' << r.transverse_count << ',' << csv_number(r.min_margin_seen) << ',';
  if (r.counterexample) {
    out << 1 << ',';
    if (r.counterexample->parameter) out << csv_number(*r.counterexample->parameter);
    out << ',' << (r.counterexample->escapes_compact ? 1 : 0);
  } else {
    out << "0,,";
  }
  out << '\n';
  return out.str();
}

}  // namespace stratlab
