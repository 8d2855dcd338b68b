#include "stratlab/gallery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>
#include <utility>

#include "stratlab/exact.hpp"
#include "stratlab/neighborhoods.hpp"
#include "stratlab/regularity.hpp"
#include "stratlab/serialization.hpp"
#include "stratlab/witness.hpp"

namespace stratlab {

namespace {

Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

/// Collects named expectations; every miss records an expected/actual pair
/// so the caller can print a diff.
class Checker {
 public:
  explicit Checker(std::string fixture) { result_.fixture = std::move(fixture); }

  void flag(const std::string& name, bool ok, std::string expected, std::string actual) {
    result_.checks.push_back({name, ok, std::move(expected), std::move(actual)});
    result_.passed = result_.passed && ok;
  }

  void expect(const std::string& name, bool ok) {
    flag(name, ok, "true", ok ? "true" : "false");
  }

  void close(const std::string& name, double actual, double expected, double tol) {
    flag(name, std::abs(actual - expected) <= tol,
         csv_number(expected) + " within " + csv_number(tol), csv_number(actual));
  }

  void at_most(const std::string& name, double actual, double bound) {
    flag(name, actual <= bound, "<= " + csv_number(bound), csv_number(actual));
  }

  void at_least(const std::string& name, double actual, double bound) {
    flag(name, actual >= bound, ">= " + csv_number(bound), csv_number(actual));
  }

  void equal_int(const std::string& name, long actual, long expected) {
    flag(name, actual == expected, std::to_string(expected), std::to_string(actual));
  }

  FixtureResult take() { return std::move(result_); }

 private:
  FixtureResult result_;
};

// --- shared geometry -------------------------------------------------------

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

Stratum negative_x_axis() {
  PolynomialMap g(2, 1, Field::Real, {{{{0, 1}, 1.0}}});
  PolynomialMap region(2, 1, Field::Real, {{{{1, 0}, -1.0}}});
  return Stratum("negative-x-axis", 2, 1, Field::Real,
                 ImplicitRepr{std::move(g), {{std::move(region), RegionKind::Positive}}});
}

Stratum y_axis() {
  PolynomialMap g(2, 1, Field::Real, {{{{1, 0}, 1.0}}});
  return Stratum("y-axis", 2, 1, Field::Real, ImplicitRepr{std::move(g), {}});
}

Stratum x_axis() {
  PolynomialMap g(2, 1, Field::Real, {{{{0, 1}, 1.0}}});
  return Stratum("x-axis", 2, 1, Field::Real, ImplicitRepr{std::move(g), {}});
}

Stratum origin_point() {
  PolynomialMap g(2, 2, Field::Real, {{{{1, 0}, 1.0}}, {{{0, 1}, 1.0}}});
  return Stratum("origin", 2, 0, Field::Real, ImplicitRepr{std::move(g), {}});
}

DifferentiableMap horizontal_curve() {  // t -> (t, 0)
  PolynomialMap c(1, 2, Field::Real, {{{{1}, 1.0}}, {}});
  return c.as_map();
}

// x -> (x, x^2 + 1): polynomial, so the exact oracle can consume it too.
PolynomialMap hirsch_base_poly() {
  return PolynomialMap(1, 2, Field::Real, {{{{1}, 1.0}}, {{{2}, 1.0}, {{0}, 1.0}}});
}

// x -> (x - c, (x - c)^2 + 1): tangent to the unit circle at x = c.
DifferentiableMap slide_member(double c) {
  auto eval = [c](const Vec& z) {
    Vec y(2);
    y << z(0) - c, (z(0) - c) * (z(0) - c) + 1.0;
    return y;
  };
  auto jac = [c](const Vec& z) {
    Mat j(2, 1);
    j << 1.0, 2.0 * (z(0) - c);
    return j;
  };
  return DifferentiableMap(1, 2, eval, jac, "parabola slid left by " + csv_number(c));
}

// x -> (x + c, x^2): tangent to the positive ray at its vertex for c > 0.
DifferentiableMap shift_member(double c) {
  auto eval = [c](const Vec& z) {
    Vec y(2);
    y << z(0) + c, z(0) * z(0);
    return y;
  };
  auto jac = [](const Vec& z) {
    Mat j(2, 1);
    j << 1.0, 2.0 * z(0);
    return j;
  };
  return DifferentiableMap(1, 2, eval, jac, "parabola shifted right by " + csv_number(c));
}

DifferentiableMap oscillation_curve() {  // t -> (t, t^2 sin(1/t)), t > 0
  return DifferentiableMap(
      1, 2,
      [](const Vec& t) {
        const double u = t(0);
        return v2(u, u * u * std::sin(1.0 / u));
      },
      [](const Vec& t) {
        const double u = t(0);
        Mat j(2, 1);
        j << 1.0, 2.0 * u * std::sin(1.0 / u) - std::cos(1.0 / u);
        return j;
      },
      "t -> (t, t^2 sin(1/t))");
}

exact::RMat rcol(std::initializer_list<double> entries) {
  Vec v(static_cast<int>(entries.size()));
  int i = 0;
  for (double e : entries) v(i++) = e;
  return exact::RMat::from_real(v);
}

}  // namespace

Fixture fixture_hirsch_circle() {
  Fixture f;
  f.name = "hirsch_circle";
  f.notes =
      "A parabola over the unit circle: transversality survives every compact "
      "check while a one-parameter slide defeats it off the checked box, so "
      "the transverse set is not open over the whole domain.";
  f.run = [] {
    Checker c("hirsch_circle");
    const Stratification sigma{"circle", 2, Field::Real, {unit_circle()}, true, std::nullopt};
    const Stratum circle = unit_circle();
    const DifferentiableMap base = hirsch_base_poly().as_map();
    const Box k(v1(0.5), v1(2.0));

    const CompactReport over_k = transverse_on_compact(base, k, sigma);
    c.expect("base transverse over the box", over_k.transverse && over_k.conclusive);
    c.at_least("clearance over the box", over_k.min_clearance, 0.3);

    const TransversalityVerdict tangent = is_transverse_at(slide_member(0.5), v1(0.5), circle);
    c.flag("half-unit slide tangent at x = 0.5",
           !tangent.transverse && tangent.conclusive &&
               tangent.reason == VerdictReason::RankDeficient,
           "rank-deficient", verdict_reason_name(tangent.reason));
    c.at_most("margin at the tangency", tangent.margin.value_or(1.0), 1e-9);

    const Chart src{"half-line", 1,
                    Box(v1(1e-8), v1(std::numeric_limits<double>::infinity()))};
    const Chart tgt{"plane", 2, Box::unbounded(2)};
    const WeakNeighborhoodSpec spec(base, src, tgt, k, 0.1);
    DirectedFamily fam;
    fam.name = "leftward slide";
    fam.c_max = 0.1;
    fam.member = [](double c0) { return slide_member(c0); };
    fam.failure_hint = [](double c0) { return v1(c0); };

    const ProbeReport probe = probe_openness(spec, sigma, 20, 2024, &fam);
    c.equal_int("probe samples", probe.samples, 21);
    c.equal_int("random members transverse", probe.transverse_count, 20);
    c.expect("directed member breaks transversality", probe.counterexample.has_value());
    if (probe.counterexample) {
      const ProbeCounterexample& cex = *probe.counterexample;
      c.at_most("slide parameter found", cex.parameter.value_or(1.0), 0.025);
      c.expect("failure escapes the box",
               cex.escapes_compact && !k.contains(cex.failure_point));
      const double c0 = cex.parameter.value_or(0.0);
      c.expect("counterexample stays inside the neighborhood",
               nbhd_contains(spec, slide_member(c0)));
      const double gap = c1_distance(base, slide_member(c0), k);
      c.at_most("counterexample C1 distance", gap, 0.1);
      c.at_most("margin at the escaped tangency",
                margin_eta(slide_member(c0), cex.failure_point, circle), 1e-9);
    }
    return c.take();
  };
  return f;
}

Fixture fixture_golubitsky_axes() {
  Fixture f;
  f.name = "golubitsky_axes";
  f.notes =
      "The positive ray next to the vertical line: the classic failure of "
      "condition (a) at the origin, with the perturbation family that breaks "
      "transversality in every neighborhood of the identity.";
  f.run = [] {
    Checker c("golubitsky_axes");
    const Stratum ray = positive_x_axis();
    const Stratum wall = y_axis();
    const Vec origin = v2(0.0, 0.0);

    const TangentSequence seq =
        sequence_from_curve(ray, horizontal_curve(), origin, Schedule::harmonic(1.0, 40));
    const ConditionAReport rep = check_condition_a(wall, origin, seq);
    c.flag("condition (a) refuted at the origin", rep.outcome == ConditionAOutcome::Refuted,
           "refuted", condition_a_outcome_name(rep.outcome));
    c.close("containment residual", rep.containment_residual, 1.0, 1e-6);

    const TransversalityVerdict shifted = is_transverse_at(shift_member(0.25), v1(0.0), ray);
    c.flag("shifted parabola tangent at its vertex",
           !shifted.transverse && shifted.conclusive &&
               shifted.reason == VerdictReason::RankDeficient,
           "rank-deficient", verdict_reason_name(shifted.reason));

    const FaultInstance fault = make_fault(wall, ray, origin, seq, 1, 1);
    const WitnessFamily family = build_witness(fault);
    c.at_most("direction plane is the horizontal axis",
              subspace_distance(family.h, Subspace::from_span_real(v2(1.0, 0.0))), 1e-12);

    const auto facts = exact::h_construction_facts(rcol({0, 1}), rcol({1, 0}), rcol({0, 1}), 1);
    c.expect("exact oracle confirms the construction",
             facts.feasible && facts.dim_h == 1 && facts.sum_with_source_full &&
                 facts.sum_with_limit_proper && exact::spans_equal(facts.h, rcol({1, 0})));

    c.expect("base map transverse at the origin",
             family.base_verdict.transverse && family.base_verdict.conclusive);
    c.equal_int("family members", static_cast<long>(family.members.size()), 40);
    bool targets_exact = true;
    bool margins_capped = true;
    bool all_refuted = true;
    for (const WitnessMember& m : family.members) {
      targets_exact = targets_exact && m.y(0).real() == 1.0 / m.k && m.y(1) == Complex(0.0);
      margins_capped = margins_capped && m.margin <= 1e-10;
      all_refuted = all_refuted && !m.verdict.transverse && m.verdict.conclusive;
    }
    c.expect("every member hits its target exactly", targets_exact);
    c.expect("every member margin below 1e-10", margins_capped);
    c.expect("every member conclusively non-transverse", all_refuted);
    c.equal_int("settled non-transverse from the first member", family.nontransverse_from, 1);
    for (int k : {1, 7, 40}) {
      const WitnessMember& m = family.members[static_cast<std::size_t>(k - 1)];
      const double gap = c1_distance(*m.map, *family.base, family.plateau, 101);
      c.close("C1 distance of member " + std::to_string(k), gap, 1.0 / k, 1e-9);
    }
    return c.take();
  };
  return f;
}

Fixture fixture_nonclosed_union() {
  Fixture f;
  f.name = "nonclosed_union";
  f.notes =
      "Two open rays plus the origin: no piece is closed, the union is the "
      "closed horizontal axis. A stand-in wearing its construction openly; "
      "the smallest stratum has dimension zero, so the family construction's "
      "dimension guards trip by design.";
  f.run = [] {
    Checker c("nonclosed_union");
    const Stratification sigma{
        "nonclosed-union", 2, Field::Real,
        {positive_x_axis(), negative_x_axis(), origin_point()}, true, true};

    const StratificationReport report = validate(sigma);
    c.expect("validates: pairwise disjoint, ranks regular",
             report.valid && report.overlaps.empty() && report.rank_failures.empty());
    c.expect("union closed under sampled limits", report.escaped_limits.empty());
    c.equal_int("smallest stratum dimension", sigma.min_dim(), 0);

    const Vec origin = v2(0.0, 0.0);
    const TangentSequence seq = sequence_from_curve(positive_x_axis(), horizontal_curve(),
                                                    origin, Schedule::harmonic(1.0, 20));
    const ConditionAReport vacuous = check_condition_a(origin_point(), origin, seq);
    c.flag("condition (a) vacuous over the point stratum",
           vacuous.outcome == ConditionAOutcome::Certified, "certified",
           condition_a_outcome_name(vacuous.outcome));
    c.at_most("vacuous containment residual", vacuous.containment_residual, 1e-12);

    c.expect("span shortcut applies against the point stratum",
             codim_shortcut_applies(origin_point(), 1));
    bool guard_trips = false;
    try {
      make_fault(origin_point(), positive_x_axis(), origin, seq, 1, 1);
    } catch (const NotAFault&) {
      guard_trips = true;
    }
    c.expect("dimension guard rejects the point-stratum fault", guard_trips);
    return c.take();
  };
  return f;
}

Fixture fixture_oscillation() {
  Fixture f;
  f.name = "oscillation";
  f.notes =
      "A curve spiraling into the origin with tangent directions that depend "
      "on the approach: condition (a) is refuted along one time schedule and "
      "certified along another, so verdicts are per-sequence claims.";
  f.run = [] {
    Checker c("oscillation");
    const Stratum axis = x_axis();
    const Vec origin = v2(0.0, 0.0);
    const DifferentiableMap curve = oscillation_curve();

    std::vector<double> refuting;
    for (int k = 1; k <= 40; ++k) refuting.push_back(1.0 / (2.0 * M_PI * k));
    const TangentSequence seq_r = sequence_from_velocities(
        curve, origin, Schedule::explicit_times(std::move(refuting)));
    c.close("slope along the refuting times", curve.jacobian(v1(1.0 / (2.0 * M_PI)))(1, 0),
            -1.0, 1e-12);
    const ConditionAReport refuted = check_condition_a(axis, origin, seq_r);
    c.flag("refuted along 1/(2 pi k)", refuted.outcome == ConditionAOutcome::Refuted, "refuted",
           condition_a_outcome_name(refuted.outcome));
    c.close("residual is 1/sqrt(2)", refuted.containment_residual, std::sqrt(0.5), 1e-3);
    if (refuted.tau_limit) {
      c.at_most("limit plane is the anti-diagonal",
                subspace_distance(*refuted.tau_limit, Subspace::from_span_real(v2(1.0, -1.0))),
                1e-3);
    } else {
      c.expect("limit plane present", false);
    }

    std::vector<double> certifying;
    for (int i = 0; i < 64; ++i) {
      const double k = 3.0e5 + std::floor((1.0e5 * i) / 63.0);
      certifying.push_back(1.0 / ((2.0 * k + 0.5) * M_PI));
    }
    std::sort(certifying.begin(), certifying.end(), std::greater<double>());
    const TangentSequence seq_c = sequence_from_velocities(
        curve, origin, Schedule::explicit_times(std::move(certifying)));
    const ConditionAReport certified = check_condition_a(axis, origin, seq_c);
    c.flag("certified along 1/((2k+0.5) pi)", certified.outcome == ConditionAOutcome::Certified,
           "certified", condition_a_outcome_name(certified.outcome));
    c.at_most("certified residual", certified.containment_residual, 1e-6);
    if (certified.tau_limit) {
      c.at_most("limit plane is horizontal",
                subspace_distance(*certified.tau_limit, Subspace::from_span_real(v2(1.0, 0.0))),
                1e-5);
    } else {
      c.expect("certified limit plane present", false);
    }
    c.expect("the two approaches disagree", refuted.outcome != certified.outcome);
    return c.take();
  };
  return f;
}

Fixture fixture_complex_axes() {
  Fixture f;
  f.name = "complex_axes";
  f.notes =
      "The two coordinate lines in C^2 with an affine family along the first: "
      "the punctured line is modeled by its closure, which changes no verdict "
      "checked here.";
  f.run = [] {
    Checker c("complex_axes");
    PolynomialMap first(2, 1, Field::Complex, {{{{1, 0}, 1.0}}});
    PolynomialMap second(2, 1, Field::Complex, {{{{0, 1}, 1.0}}});
    const Stratum wall("complex-wall", 2, 1, Field::Complex, ImplicitRepr{std::move(first), {}});
    const Stratum line("complex-line", 2, 1, Field::Complex, ImplicitRepr{std::move(second), {}});

    const CVec origin = CVec::Zero(2);
    std::vector<CVec> points;
    std::vector<Subspace> tangents;
    for (int k = 1; k <= 40; ++k) {
      CVec p(2);
      p << Complex(1.0 / k, 0.0), Complex(0.0, 0.0);
      points.push_back(p);
      tangents.push_back(Subspace::line(Field::Complex, CVec::Unit(2, 0)));
    }
    const TangentSequence seq =
        TangentSequence::from_data(Field::Complex, points, tangents, origin, "first-axis steps");

    const FaultInstance fault =
        make_complex_fault(wall, line, origin, seq, 1, Subspace::full(Field::Complex, 1));
    const WitnessFamily family = complex_witness(fault);

    c.at_most("direction plane is the first complex axis",
              subspace_distance(family.h, Subspace::line(Field::Complex, CVec::Unit(2, 0))),
              1e-12);
    c.expect("base map transverse at the origin",
             family.base_verdict.transverse && family.base_verdict.conclusive);
    c.equal_int("family members", static_cast<long>(family.members.size()), 40);
    bool targets_exact = true;
    bool margins_capped = true;
    bool all_refuted = true;
    for (const WitnessMember& m : family.members) {
      targets_exact =
          targets_exact && m.y(0) == Complex(1.0 / m.k, 0.0) && m.y(1) == Complex(0.0);
      margins_capped = margins_capped && m.margin <= 1e-10;
      all_refuted = all_refuted && !m.verdict.transverse && m.verdict.conclusive;
    }
    c.expect("every member hits its target exactly", targets_exact);
    c.expect("every member margin below 1e-10", margins_capped);
    c.expect("every member conclusively non-transverse", all_refuted);
    c.at_most("affine gap shrinks to zero", family.members.back().c1_gap,
              family.members.front().c1_gap);
    return c.take();
  };
  return f;
}

std::vector<Fixture> gallery() {
  std::vector<Fixture> all;
  all.push_back(fixture_complex_axes());
  all.push_back(fixture_golubitsky_axes());
  all.push_back(fixture_hirsch_circle());
  all.push_back(fixture_nonclosed_union());
  all.push_back(fixture_oscillation());
  std::sort(all.begin(), all.end(),
            [](const Fixture& a, const Fixture& b) { return a.name < b.name; });
  return all;
}

Fixture fixture_by_name(const std::string& name) {
  for (Fixture& f : gallery()) {
    if (f.name == name) return std::move(f);
  }
  throw MalformedInput("unknown fixture '" + name + "'");
}

std::vector<FixtureResult> run_gallery(const std::vector<std::string>& names) {
  std::vector<Fixture> picked;
  if (names.empty()) {
    picked = gallery();
  } else {
    picked.reserve(names.size());
    for (const std::string& n : names) picked.push_back(fixture_by_name(n));
    std::sort(picked.begin(), picked.end(),
              [](const Fixture& a, const Fixture& b) { return a.name < b.name; });
  }

  std::vector<std::future<FixtureResult>> futures;
  futures.reserve(picked.size());
  for (const Fixture& f : picked) {
    futures.push_back(std::async(std::launch::async, [run = f.run] {
      const auto start = std::chrono::steady_clock::now();
      FixtureResult r = run();
      r.elapsed_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start).count();
      return r;
    }));
  }
  std::vector<FixtureResult> results;
  results.reserve(futures.size());
  for (auto& fut : futures) results.push_back(fut.get());
  std::sort(results.begin(), results.end(),
            [](const FixtureResult& a, const FixtureResult& b) { return a.fixture < b.fixture; });
  return results;
}

Json to_json(const FixtureResult& r) {
  Json checks = Json::array();
  for (const FixtureCheck& c : r.checks) {
    Json one;
    one["name"] = c.name;
    one["passed"] = c.passed;
    one["expected"] = c.expected;
    one["actual"] = c.actual;
    checks.push_back(std::move(one));
  }
  Json j;
  j["fixture"] = r.fixture;
  j["passed"] = r.passed;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["checks"] = std::move(checks);
  return j;
}

std::string render_text(const FixtureResult& r) {
  std::ostringstream out;
  out << (r.passed ? "[PASS] " : "[FAIL] ") << r.fixture << " (" << r.checks.size()
      << " checks)\n";
  for (const FixtureCheck& c : r.checks) {
    if (c.passed) {
      out << "  ok   " << c.name << '\n';
    } else {
      out << "  MISS " << c.name << ": expected " << c.expected << ", got " << c.actual << '\n';
    }
  }
  return out.str();
}

}  // namespace stratlab
