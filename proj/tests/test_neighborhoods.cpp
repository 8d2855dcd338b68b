#include <doctest.h>

#include "stratlab/neighborhoods.hpp"

#include <cmath>
#include <limits>

using namespace stratlab;

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

Stratum vertical_axis() {
  PolynomialMap g(2, 1, Field::Real, {{{{1, 0}, 1.0}}});
  return Stratum("vertical-axis", 2, 1, Field::Real, ImplicitRepr{std::move(g), {}});
}

// x -> (x, x^2 + 1); its image stays above the unit circle for x > 0.
DifferentiableMap parabola_above() {
  auto eval = [](const Vec& z) {
    Vec y(2);
    y << z(0), z(0) * z(0) + 1.0;
    return y;
  };
  auto jac = [](const Vec& z) {
    Mat j(2, 1);
    j << 1.0, 2.0 * z(0);
    return j;
  };
  return DifferentiableMap(1, 2, eval, jac, "parabola one above the origin");
}

// x -> (x - c, (x - c)^2 + 1); tangent to the unit circle at x = c.
DifferentiableMap shifted_parabola(double c) {
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
  return DifferentiableMap(1, 2, eval, jac, "parabola slid left");
}

// x -> (x, x^2); kisses the positive axis after a rightward shift.
DifferentiableMap parabola_at_origin() {
  auto eval = [](const Vec& z) {
    Vec y(2);
    y << z(0), z(0) * z(0);
    return y;
  };
  auto jac = [](const Vec& z) {
    Mat j(2, 1);
    j << 1.0, 2.0 * z(0);
    return j;
  };
  return DifferentiableMap(1, 2, eval, jac, "parabola through the origin");
}

Chart line_chart(Box domain) { return Chart{"line", 1, std::move(domain)}; }

Chart plane_chart() { return Chart{"plane", 2, Box::unbounded(2)}; }

Box positive_half_line() { return Box(v1(1e-8), v1(std::numeric_limits<double>::infinity())); }

WeakNeighborhoodSpec slide_spec(double eps) {
  return WeakNeighborhoodSpec(parabola_above(), line_chart(positive_half_line()), plane_chart(),
                              Box(v1(0.5), v1(2.0)), eps);
}

DirectedFamily slide_family(double c_max) {
  DirectedFamily fam;
  fam.name = "leftward slide";
  fam.c_max = c_max;
  fam.member = [](double c) { return shifted_parabola(c); };
  fam.failure_hint = [](double c) { return v1(c); };
  return fam;
}

}  // namespace

TEST_CASE("spec construction validates its inputs") {
  const Box k(v1(0.5), v1(2.0));
  CHECK_THROWS_AS(WeakNeighborhoodSpec(parabola_above(), line_chart(positive_half_line()),
                                       plane_chart(), k, 0.0),
                  InvalidOperands);
  CHECK_THROWS_AS(WeakNeighborhoodSpec(parabola_above(), line_chart(positive_half_line()),
                                       plane_chart(), k, -0.5),
                  InvalidOperands);
  CHECK_THROWS_AS(WeakNeighborhoodSpec(parabola_above(), line_chart(positive_half_line()),
                                       plane_chart(), Box::unbounded(1), 0.1),
                  NoncompactDomain);
  CHECK_THROWS_AS(WeakNeighborhoodSpec(parabola_above(), line_chart(Box(v1(1.0), v1(3.0))),
                                       plane_chart(), k, 0.1),
                  NotContained);
  CHECK_THROWS_AS(WeakNeighborhoodSpec(parabola_above(), line_chart(positive_half_line()),
                                       plane_chart(), k, 0.1, 2),
                  InvalidOperands);
  CHECK_THROWS_AS(WeakNeighborhoodSpec(parabola_above(), plane_chart(), plane_chart(), k, 0.1),
                  DimensionMismatch);
  CHECK_THROWS_AS(WeakNeighborhoodSpec(parabola_above(), line_chart(positive_half_line()),
                                       line_chart(positive_half_line()), k, 0.1),
                  DimensionMismatch);

  const WeakNeighborhoodSpec spec = slide_spec(0.1);
  CHECK(spec.jet_order == 1);
  CHECK(spec.epsilon == 0.1);
}

TEST_CASE("membership accepts the base and measures the slide family") {
  const WeakNeighborhoodSpec spec = slide_spec(0.1);
  CHECK(nbhd_contains(spec, spec.base));

  // Slid by c, the map sits at C1 distance 4c - c^2 over [0.5, 2]: the value
  // gap peaks at the right endpoint, the slope gap is the smaller 2c.
  const double near = c1_distance(spec.base, shifted_parabola(0.01), spec.k);
  CHECK(std::abs(near - 0.0399) <= 1e-12);
  CHECK(nbhd_contains(spec, shifted_parabola(0.01)));

  const double far = c1_distance(spec.base, shifted_parabola(1.0), spec.k);
  CHECK(std::abs(far - 3.0) <= 1e-12);
  CHECK_FALSE(nbhd_contains(spec, shifted_parabola(1.0)));

  const DifferentiableMap wrong = DifferentiableMap::linear(Mat::Identity(2, 2));
  CHECK_THROWS_AS(nbhd_contains(spec, wrong), DimensionMismatch);
}

TEST_CASE("image containment can fail even when the distance is small") {
  // Target chart boxed tightly around the base image over [0.5, 2].
  const Chart tight{"window", 2, Box(v2(0.4, 1.2), v2(2.1, 5.1))};
  const WeakNeighborhoodSpec spec(parabola_above(), line_chart(positive_half_line()), tight,
                                  Box(v1(0.5), v1(2.0)), 0.5);
  CHECK(nbhd_contains(spec, spec.base));

  auto eval = [](const Vec& z) {
    Vec y(2);
    y << z(0) + 0.15, z(0) * z(0) + 1.0;
    return y;
  };
  auto jac = [](const Vec& z) {
    Mat j(2, 1);
    j << 1.0, 2.0 * z(0);
    return j;
  };
  const DifferentiableMap nudged(1, 2, eval, jac, "nudged right");
  CHECK(c1_distance(spec.base, nudged, spec.k) < spec.epsilon);
  CHECK_FALSE(nbhd_contains(spec, nudged));
}

TEST_CASE("perturbation draws are seeded, contained, and reproducible") {
  const WeakNeighborhoodSpec spec = slide_spec(0.05);
  const auto draws = sample_perturbations(spec, 25, 77, 101);
  REQUIRE(draws.size() == 25);
  for (const auto& g : draws) CHECK(nbhd_contains(spec, g, 101));

  const auto again = sample_perturbations(spec, 25, 77, 101);
  const auto other = sample_perturbations(spec, 25, 78, 101);
  bool seeds_differ = false;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    for (double x : {0.6, 1.1, 1.9}) {
      CHECK((draws[i](v1(x)) - again[i](v1(x))).norm() == 0.0);
      if ((draws[i](v1(x)) - other[i](v1(x))).norm() > 0.0) seeds_differ = true;
    }
  }
  CHECK(seeds_differ);

  CHECK(sample_perturbations(spec, 0, 77).empty());
  CHECK_THROWS_AS(sample_perturbations(spec, -1, 77), InvalidOperands);
}

TEST_CASE("a boxed-in target makes sampling fail") {
  // The target chart hugs the base image exactly, so every scaled-down draw
  // still pokes outside at some boundary grid point.
  const Chart hull{"hull", 2, Box(v2(0.5, 1.25), v2(2.0, 5.0))};
  const WeakNeighborhoodSpec spec(parabola_above(), line_chart(positive_half_line()), hull,
                                  Box(v1(0.5), v1(2.0)), 0.5);
  CHECK(nbhd_contains(spec, spec.base, 101));
  CHECK_THROWS_AS(sample_perturbations(spec, 20, 424242, 101), SamplingFailure);
}

TEST_CASE("bisection finds the largest contained slide") {
  const WeakNeighborhoodSpec spec = slide_spec(0.1);
  const DirectedFamily fam = slide_family(0.1);

  const double c = directed_parameter(spec, fam);
  CHECK(c <= 0.025);
  CHECK(c >= 0.0245);
  CHECK(nbhd_contains(spec, fam.member(c)));
  const double dist = c1_distance(spec.base, fam.member(c), spec.k);
  CHECK(dist < 0.1);
  CHECK(dist >= 0.098);

  // A family that always fits is pinned at its search bound.
  DirectedFamily gentle = slide_family(1.0);
  gentle.member = [](double c) { return shifted_parabola(1e-3 * c); };
  CHECK(directed_parameter(spec, gentle) == 1.0);

  // A family that never fits is rejected.
  DirectedFamily hopeless = slide_family(1.0);
  hopeless.member = [](double) { return shifted_parabola(2.0); };
  CHECK_THROWS_AS(directed_parameter(spec, hopeless), SamplingFailure);

  DirectedFamily unarmed;
  unarmed.c_max = 1.0;
  CHECK_THROWS_AS(directed_parameter(spec, unarmed), InvalidOperands);
  DirectedFamily backwards = slide_family(-1.0);
  CHECK_THROWS_AS(directed_parameter(spec, backwards), InvalidOperands);
}

TEST_CASE("openness probe certifies a robustly transverse base") {
  const WeakNeighborhoodSpec spec = slide_spec(0.05);
  const Stratification sigma{"circle", 2, Field::Real, {unit_circle()}, true, std::nullopt};

  const ProbeReport report = probe_openness(spec, sigma, 30, 99, nullptr, 101);
  CHECK(report.samples == 30);
  CHECK(report.transverse_count == 30);
  CHECK_FALSE(report.counterexample.has_value());
  CHECK(std::isinf(report.min_margin_seen));  // every image point misses the circle

  const ProbeReport rerun = probe_openness(spec, sigma, 30, 99, nullptr, 101);
  CHECK(rerun.samples == report.samples);
  CHECK(rerun.transverse_count == report.transverse_count);
  CHECK(rerun.min_margin_seen == report.min_margin_seen);
  CHECK_FALSE(rerun.counterexample.has_value());
}

TEST_CASE("the slide family exposes a tangency outside the box") {
  const WeakNeighborhoodSpec spec = slide_spec(0.1);
  const Stratification sigma{"circle", 2, Field::Real, {unit_circle()}, true, std::nullopt};
  const DirectedFamily fam = slide_family(0.1);

  const ProbeReport report = probe_openness(spec, sigma, 8, 5, &fam, 101);
  CHECK(report.samples == 9);
  CHECK(report.transverse_count == 8);
  REQUIRE(report.counterexample.has_value());
  const ProbeCounterexample& cex = *report.counterexample;
  CHECK(cex.description == "leftward slide");
  REQUIRE(cex.parameter.has_value());
  CHECK(*cex.parameter <= 0.025);
  CHECK(*cex.parameter >= 0.0245);
  CHECK(cex.failure_point(0) == *cex.parameter);  // tangency sits at x = c
  CHECK(cex.escapes_compact);                     // and c is below the box
  CHECK_FALSE(cex.verdict.transverse);
  REQUIRE(cex.verdict.margin.has_value());
  CHECK(*cex.verdict.margin <= 1e-9);
  CHECK(report.transverse_count < report.samples);

  const ProbeReport rerun = probe_openness(spec, sigma, 8, 5, &fam, 101);
  REQUIRE(rerun.counterexample.has_value());
  CHECK(rerun.counterexample->parameter == cex.parameter);
  CHECK(rerun.counterexample->failure_point(0) == cex.failure_point(0));
  CHECK(rerun.min_margin_seen == report.min_margin_seen);
}

TEST_CASE("a tangent base map is refused") {
  // Around x = 0 the base itself kisses the circle at (0, 1), so the
  // openness question is not even well posed there.
  const WeakNeighborhoodSpec spec(parabola_above(), line_chart(Box::unbounded(1).clipped(10.0)),
                                  plane_chart(), Box(v1(-1.0), v1(1.0)), 0.1);
  const Stratification sigma{"circle", 2, Field::Real, {unit_circle()}, true, std::nullopt};
  CHECK_THROWS_AS(probe_openness(spec, sigma, 3, 1, nullptr, 101), InvalidOperands);
}

TEST_CASE("the shifted parabola fails inside the box over the axis pair") {
  const Stratification axes{"axes", 2, Field::Real, {positive_x_axis(), vertical_axis()}, true, false};

  const WeakNeighborhoodSpec spec(parabola_at_origin(), line_chart(Box::unbounded(1).clipped(10.0)),
                                  plane_chart(), Box(v1(-1.0), v1(1.0)), 0.5);

  DirectedFamily fam;
  fam.name = "rightward shift";
  fam.c_max = 0.3;
  fam.member = [](double c) {
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
    return DifferentiableMap(1, 2, eval, jac, "parabola slid right");
  };
  fam.failure_hint = [](double) { return v1(0.0); };

  const ProbeReport report = probe_openness(spec, axes, 5, 11, &fam, 101);
  CHECK(report.samples == 6);
  CHECK(report.transverse_count == 5);
  REQUIRE(report.counterexample.has_value());
  const ProbeCounterexample& cex = *report.counterexample;
  CHECK(cex.description == "rightward shift");
  REQUIRE(cex.parameter.has_value());
  CHECK(*cex.parameter == 0.3);  // the whole family fits a 0.5-wide neighborhood
  CHECK(cex.failure_point(0) == 0.0);
  CHECK_FALSE(cex.escapes_compact);  // the vertex tangency happens at x = 0, inside the box
  CHECK_FALSE(cex.verdict.transverse);
  CHECK(report.min_margin_seen <= 1e-9);
}
