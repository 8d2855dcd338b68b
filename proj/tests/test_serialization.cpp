#include <doctest.h>

#include "stratlab/serialization.hpp"

#include <cmath>
#include <limits>

#include "stratlab/neighborhoods.hpp"
#include "stratlab/regularity.hpp"
#include "stratlab/witness.hpp"

using namespace stratlab;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

CVec cv2(Complex a, Complex b) {
  CVec v(2);
  v << a, b;
  return v;
}

Stratum unit_circle() {
  PolynomialMap g(2, 1, Field::Real, {{{{2, 0}, 1.0}, {{0, 2}, 1.0}, {{0, 0}, -1.0}}});
  return Stratum("circle", 2, 1, Field::Real, ImplicitRepr{std::move(g), {}});
}

Stratum positive_x_axis() {
  PolynomialMap g(2, 1, Field::Real, {{{{0, 1}, 1.0}}});
  PolynomialMap region(2, 1, Field::Real, {{{{1, 0}, 1.0}}});
  return Stratum("positive-x-axis", 2, 1, Field::Real,
                 ImplicitRepr{std::move(g), {{std::move(region), RegionKind::Positive}}});
}

Stratum y_axis() {
  PolynomialMap g(2, 1, Field::Real, {{{{1, 0}, 1.0}}});
  return Stratum("y-axis", 2, 1, Field::Real, ImplicitRepr{std::move(g), {}});
}

DifferentiableMap horizontal_curve() {  // t -> (t, 0)
  PolynomialMap c(1, 2, Field::Real, {{{{1}, 1.0}}, {}});
  return c.as_map();
}

}  // namespace

TEST_CASE("boxes round-trip, with null for unbounded sides") {
  const Box b(v2(-1.0, 0.5), v2(2.0, 3.5));
  const Box back = box_from_json(to_json(b));
  CHECK(back.lo == b.lo);
  CHECK(back.hi == b.hi);

  Json j = to_json(Box::unbounded(2));
  CHECK(j["lo"][0].is_null());
  CHECK(j["hi"][1].is_null());
  const Box u = box_from_json(j);
  CHECK(std::isinf(u.lo(0)));
  CHECK(std::isinf(u.hi(1)));
  CHECK(u.lo(0) < 0.0);
  CHECK(u.hi(1) > 0.0);

  CHECK_THROWS_AS(box_from_json(parse_json("{\"lo\": [0]}")), MalformedInput);
  CHECK_THROWS_AS(box_from_json(parse_json("{\"lo\": [0], \"hi\": [1, 2]}")), MalformedInput);
}

TEST_CASE("subspaces round-trip and re-orthonormalize on load") {
  const Subspace s = Subspace::from_span_real((Mat(3, 2) << 1, 0, 0, 1, 0, 0).finished());
  const Subspace back = subspace_from_json(to_json(s));
  CHECK(back.field() == Field::Real);
  CHECK(back.dim() == 2);
  CHECK(subspace_distance(s, back) <= 1e-12);

  const Subspace cline = Subspace::line(Field::Complex, cv2(Complex(1, 1), Complex(0, -2)));
  const Subspace cback = subspace_from_json(to_json(cline));
  CHECK(cback.field() == Field::Complex);
  CHECK(subspace_distance(cline, cback) <= 1e-12);

  // A hand-written skewed basis is accepted: only its span survives loading.
  const Json skew = parse_json(
      "{\"field\": \"real\", \"ambient_dim\": 2, \"basis\": [[3], [3]]}");
  const Subspace diag = subspace_from_json(skew);
  CHECK(diag.dim() == 1);
  CHECK(subspace_distance(diag, Subspace::line(Field::Real, cv2(1.0, 1.0))) <= 1e-12);

  CHECK_THROWS_AS(
      subspace_from_json(parse_json("{\"field\": \"real\", \"ambient_dim\": 2, \"basis\": [[1]]}")),
      MalformedInput);
  CHECK_THROWS_AS(
      subspace_from_json(parse_json("{\"field\": \"green\", \"ambient_dim\": 2, \"basis\": []}")),
      MalformedInput);
}

TEST_CASE("polynomial maps round-trip over both fields") {
  PolynomialMap circle(2, 1, Field::Real, {{{{2, 0}, 1.0}, {{0, 2}, 1.0}, {{0, 0}, -1.0}}});
  const PolynomialMap back = polynomial_from_json(to_json(circle));
  CHECK(back.source_dim() == 2);
  CHECK(back.target_dim() == 1);
  for (double x : {-1.5, 0.25, 2.0}) {
    for (double y : {-0.5, 1.0}) {
      CHECK(back.eval(v2(x, y)) == circle.eval(v2(x, y)));
    }
  }

  PolynomialMap twist(1, 1, Field::Complex, {{{{1}, Complex(0.0, 1.0)}, {{0}, Complex(2.0, -0.5)}}});
  const PolynomialMap tback = polynomial_from_json(to_json(twist));
  CVec z(1);
  z << Complex(0.3, 0.7);
  CHECK((tback.eval(z) - twist.eval(z)).norm() == 0.0);

  CHECK_THROWS_AS(polynomial_from_json(parse_json("{\"m\": 1, \"n\": 1, \"field\": \"real\", "
                                                  "\"coords\": [[[[0, 0], 1.0]]]}")),
                  MalformedInput);
}

TEST_CASE("strata and stratifications round-trip with membership intact") {
  const Stratum ray = positive_x_axis();
  const Stratum rback = stratum_from_json(to_json(ray));
  CHECK(rback.name() == "positive-x-axis");
  CHECK(rback.dim() == 1);
  CHECK(membership(rback, v2(1.0, 0.0)) == Membership::Yes);
  CHECK(membership(rback, v2(-1.0, 0.0)) == Membership::No);

  PolynomialMap arc(1, 2, Field::Real, {{{{1}, 1.0}}, {{{2}, 1.0}}});
  const Stratum para("arc", 2, 1,
                     ParametricRepr{std::move(arc), Box(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)),
                                    {false}, {true}});
  const Stratum pback = stratum_from_json(to_json(para));
  CHECK_FALSE(pback.is_implicit());
  CHECK(membership(pback, v2(0.5, 0.25)) == Membership::Yes);

  const Stratification axes{"axes", 2, Field::Real, {positive_x_axis(), y_axis()}, true, false};
  const Stratification sback = stratification_from_json(to_json(axes));
  CHECK(sback.name == "axes");
  CHECK(sback.strata.size() == 2);
  CHECK(sback.min_dim() == 1);
  CHECK(sback.union_closed);
  REQUIRE(sback.declared_a_regular.has_value());
  CHECK_FALSE(*sback.declared_a_regular);

  Json bad = to_json(axes);
  bad["strata"][0]["ambient_dim"] = 3;
  CHECK_THROWS_AS(stratification_from_json(bad), MalformedInput);
}

TEST_CASE("schedules round-trip through their JSON form") {
  for (const Schedule& s : {Schedule::geometric(0.5, 0.5, 12), Schedule::harmonic(1.0, 7),
                            Schedule::explicit_times({0.5, 0.25, 0.1})}) {
    const Schedule back = schedule_from_json(to_json(s));
    CHECK(back.times() == s.times());
  }
  CHECK_THROWS_AS(schedule_from_json(parse_json("{\"kind\": \"fibonacci\"}")), MalformedInput);
}

TEST_CASE("parse errors carry a byte location") {
  try {
    parse_json("{\"a\": 1,,}");
    FAIL("expected MalformedInput");
  } catch (const MalformedInput& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK_THROWS_AS(load_json_file("/no/such/file.json"), MalformedInput);
}

TEST_CASE("verdicts and compact reports serialize with stable keys") {
  const Stratum s = unit_circle();
  PolynomialMap f(1, 2, Field::Real, {{{{1}, 1.0}}, {{{2}, 1.0}, {{0}, 1.0}}});
  const DifferentiableMap map = f.as_map();

  const TransversalityVerdict miss = is_transverse_at(map, Vec::Constant(1, 0.7), s);
  Json j = to_json(miss);
  CHECK(j["transverse"] == true);
  CHECK(j["reason"] == "misses-stratum");
  CHECK(j["margin"].is_null());
  CHECK(j["rank"]["conclusive"].is_boolean());

  const CompactReport report =
      transverse_on_compact(map, Box(Vec::Constant(1, 0.5), Vec::Constant(1, 2.0)),
                            Stratification{"circle", 2, Field::Real, {unit_circle()}, true, {}}, 101);
  Json r = to_json(report);
  CHECK(r["transverse"] == true);
  CHECK(r["points"] == 101);
  CHECK(r["min_margin"].is_null());  // no image point lands on the circle
  CHECK(r["min_clearance"].is_number());
  CHECK(r["failures"].is_array());
  CHECK(r.dump() == to_json(report).dump());
  CHECK(r.dump().rfind("{\"transverse\":", 0) == 0);  // insertion order survives
}

TEST_CASE("condition-a reports include the diagnostic trail") {
  const Schedule sched = Schedule::harmonic(1.0, 12);
  const TangentSequence seq =
      sequence_from_curve(positive_x_axis(), horizontal_curve(), v2(0.0, 0.0), sched);
  const ConditionAReport rep = check_condition_a(y_axis(), v2(0.0, 0.0), seq);
  CHECK(rep.outcome == ConditionAOutcome::Refuted);
  REQUIRE(rep.per_step_residuals.size() == 12);
  for (double r : rep.per_step_residuals) CHECK(std::abs(r - 1.0) <= 1e-12);
  CHECK(!rep.tail_distances.empty());

  Json j = to_json(rep);
  CHECK(j["outcome"] == "refuted");
  CHECK(j["holds"] == false);
  CHECK(j["per_step_residuals"].size() == 12);
  CHECK(j["tau_limit"]["field"] == "real");

  const std::string csv = to_csv(rep);
  CHECK(csv.find("# outcome=refuted") == 0);
  CHECK(csv.find("step,per_step_residual,tail_distance") != std::string::npos);
}

TEST_CASE("witness bundles serialize every member's data") {
  const Stratum lower("vertical-line", 2, 1, Field::Real,
                      ImplicitRepr{PolynomialMap(2, 1, Field::Real, {{{{1, 0}, 1.0}}}), {}});
  const TangentSequence seq = sequence_from_curve(positive_x_axis(), horizontal_curve(),
                                                  v2(0.0, 0.0), Schedule::harmonic(1.0, 5));
  const FaultInstance fault = make_fault(lower, positive_x_axis(), v2(0.0, 0.0), seq, 1, 1);
  const WitnessFamily family = build_witness(fault);

  Json j = to_json(family);
  CHECK(j["field"] == "real");
  CHECK(j["h"]["ambient_dim"] == 2);
  REQUIRE(j["members"].size() == 5);
  CHECK(j["members"][0]["y"][0] == 1.0);
  CHECK(j["members"][0]["y"][1] == 0.0);
  CHECK(j["members"][4]["y"][0] == 0.2);
  CHECK(j["members"][0]["directions"].size() == 1);
  CHECK(j["members"][0]["verdict"]["transverse"] == false);
  CHECK(j["c1_constant"].get<double>() > 0.0);

  const std::string csv = to_csv(family);
  CHECK(csv.find("k,margin,c1_distance,frame_residual,transverse,conclusive") != std::string::npos);
  CHECK(csv.find("\n1,") != std::string::npos);
}

TEST_CASE("probe reports serialize their counterexample when present") {
  ProbeReport clean;
  clean.samples = 4;
  clean.transverse_count = 4;
  Json cj = to_json(clean);
  CHECK(cj["counterexample"].is_null());
  CHECK(cj["min_margin_seen"].is_null());
  CHECK(to_csv(clean) ==
        "samples,transverse_count,min_margin_seen,has_counterexample,parameter,escapes_compact\n"
        "4,4,inf,0,,\n");

  ProbeReport hit = clean;
  hit.transverse_count = 3;
  hit.min_margin_seen = 0.25;
  TransversalityVerdict v;
  v.transverse = false;
  v.reason = VerdictReason::RankDeficient;
  v.margin = 0.0;
  v.conclusive = true;
  hit.counterexample = ProbeCounterexample{"slide", 0.025, Vec::Constant(1, 0.025), v, true};
  Json hj = to_json(hit);
  CHECK(hj["counterexample"]["parameter"] == 0.025);
  CHECK(hj["counterexample"]["escapes_compact"] == true);
  CHECK(hj["counterexample"]["verdict"]["reason"] == "rank-deficient");
  const std::string csv = to_csv(hit);
  CHECK(csv.find("4,3,0.25,1,0.025,1") != std::string::npos);
}

TEST_CASE("csv numbers hold twelve significant digits") {
  CHECK(csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(csv_number(123456789012345.0) == "1.23456789012e+14");
  CHECK(csv_number(0.5) == "0.5");
  CHECK(csv_number(std::numeric_limits<double>::infinity()) == "inf");
}
