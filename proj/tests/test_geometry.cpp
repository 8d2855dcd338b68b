#include <doctest.h>

#include "stratlab/exact.hpp"
#include "stratlab/geometry.hpp"

#include <cmath>

using namespace stratlab;

TEST_CASE("polynomial evaluation matches the exact route") {
  // (x^2 + y^2 - 1, x*y) with small rational inputs.
  const PolynomialMap p(2, 2, Field::Real,
                        {{{{2, 0}, 1.0}, {{0, 2}, 1.0}, {{0, 0}, -1.0}}, {{{1, 1}, 1.0}}});

  Vec z(2);
  z << 0.5, 0.25;
  const Vec v = p.eval(z);
  CHECK(v(0) == doctest::Approx(0.25 + 0.0625 - 1.0).epsilon(1e-15));
  CHECK(v(1) == doctest::Approx(0.125).epsilon(1e-15));

  std::vector<exact::Scalar> ez = {exact::Scalar::from_double(0.5),
                                   exact::Scalar::from_double(0.25)};
  const auto ev = exact::eval_polynomial(p, ez);
  CHECK(ev[0].re == exact::Rational(-11, 16));
  CHECK(ev[1].re == exact::Rational(1, 8));

  const Mat j = p.jacobian(z);
  const auto ej = exact::polynomial_jacobian(p, ez);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      CHECK(exact::Scalar::from_double(j(i, k)) == ej.at(i, k));
    }
  }
}

TEST_CASE("finite differences recover analytic jacobians") {
  const PolynomialMap p(
      3, 1, Field::Real,
      {{{{3, 0, 0}, 2.0}, {{1, 1, 0}, -1.0}, {{0, 0, 2}, 0.5}}});
  const auto f = p.as_map().with_test_box(Box::cube(3, 1.5));
  Vec z(3);
  z << 0.3, -1.2, 0.7;
  const Mat fd = fd_jacobian(f, z);
  const Mat an = p.jacobian(z);
  CHECK((fd - an).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(jacobian_consistent(f));
}

TEST_CASE("declared jacobians are audited") {
  // A deliberately wrong jacobian must be flagged.
  const DifferentiableMap lying =
      DifferentiableMap(1, 1, [](const Vec& z) { return Vec::Constant(1, z(0) * z(0)); },
                        [](const Vec&) { return Mat::Constant(1, 1, 1.0); },
                        "x^2 with a bad derivative")
          .with_test_box(Box::cube(1, 1.0));
  CHECK_FALSE(jacobian_consistent(lying));
}

TEST_CASE("linear and affine factories") {
  Mat a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  Vec b(2);
  b << -1, 1;
  const auto f = DifferentiableMap::affine(a, b);
  Vec z(3);
  z << 1, 0, -1;
  CHECK(((f(z) - (a * z + b)).cwiseAbs().maxCoeff()) == 0.0);
  CHECK((f.jacobian(z) - a).cwiseAbs().maxCoeff() == 0.0);
  CHECK(f.source_dim() == 3);
  CHECK(f.target_dim() == 2);
}

TEST_CASE("domain escapes throw") {
  const auto f =
      DifferentiableMap::linear(Mat::Identity(2, 2)).with_domain(Box::cube(2, 1.0));
  Vec inside(2), outside(2);
  inside << 0.5, -0.5;
  outside << 1.5, 0.0;
  CHECK_NOTHROW(f(inside));
  CHECK_THROWS_AS(f(outside), DomainEscape);
  // Finite differences near the edge would sample outside.
  Vec edge(2);
  edge << 1.0, 0.0;
  CHECK_THROWS_AS(fd_jacobian(f, edge), DomainEscape);
}

TEST_CASE("bump function plateau and support are exact") {
  const Box inner = Box::cube(2, 1.0);
  const Box outer = Box::cube(2, 2.0);
  const BumpFunction bump(inner, outer);

  Vec center = Vec::Zero(2);
  Vec on_plateau(2);
  on_plateau << 0.9, -0.9;
  Vec outside(2);
  outside << 2.5, 0.0;
  Vec shoulder(2);
  shoulder << 1.5, 0.0;

  CHECK(bump.eval(center) == 1.0);
  CHECK(bump.eval(on_plateau) == 1.0);
  CHECK(bump.eval(outside) == 0.0);
  CHECK(bump.grad(on_plateau).cwiseAbs().maxCoeff() == 0.0);
  CHECK(bump.grad(outside).cwiseAbs().maxCoeff() == 0.0);
  const double mid = bump.eval(shoulder);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);

  // Monotone decay along a ray through the shoulder.
  double prev = 1.0;
  for (double t = 1.0; t <= 2.0; t += 0.05) {
    Vec z(2);
    z << t, 0.0;
    const double v = bump.eval(z);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }

  // Gradient audit on the shoulder.
  const auto as_map = DifferentiableMap(
      2, 1, [&](const Vec& z) { return Vec::Constant(1, bump.eval(z)); },
      [&](const Vec& z) { return bump.grad(z).transpose().eval(); }, "bump");
  const Mat fd = fd_jacobian(as_map, shoulder);
  CHECK((fd - bump.grad(shoulder).transpose()).cwiseAbs().maxCoeff() <= 1e-7);

  CHECK_THROWS_AS(BumpFunction(Box::cube(2, 1.0), Box::cube(2, 1.0)), InvalidOperands);
}

TEST_CASE("grid iteration order and midpoint rule") {
  GridSpec g{Box::cube(2, 1.0), 3};
  CHECK(g.total() == 9);
  // Row-major: axis 0 outermost.
  CHECK((g.point(0) - (Vec(2) << -1, -1).finished()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.point(1) - (Vec(2) << -1, 0).finished()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.point(3) - (Vec(2) << 0, -1).finished()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.point(8) - (Vec(2) << 1, 1).finished()).cwiseAbs().maxCoeff() == 0.0);

  GridSpec single{Box::cube(1, 2.0), 1};
  CHECK(single.point(0)(0) == 0.0);
}

TEST_CASE("c1 distance separates maps by value and slope") {
  const auto f = DifferentiableMap::linear(Mat::Identity(1, 1));
  const auto g = DifferentiableMap::affine(Mat::Identity(1, 1), Vec::Constant(1, 0.25));
  const Box k = Box::cube(1, 1.0);
  CHECK(c1_distance(f, g, k, 41) == doctest::Approx(0.25).epsilon(1e-12));

  // Slope gap dominates value gap: h(x) = 1.1 x on [-1, 1].
  const auto h = DifferentiableMap::linear(Mat::Constant(1, 1, 1.1));
  CHECK(c1_distance(f, h, k, 41) == doctest::Approx(0.1).epsilon(1e-9));

  CHECK(c1_distance(f, f, k, 11) == 0.0);
}

TEST_CASE("random polynomials are reproducible and degree-bounded") {
  Rng a(123u), b(123u);
  const auto p = PolynomialMap::random(a, 3, 2, 3, 1.0);
  const auto q = PolynomialMap::random(b, 3, 2, 3, 1.0);
  Vec z(3);
  z << 0.2, -0.4, 0.9;
  CHECK((p.eval(z) - q.eval(z)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.degree() <= 3);
}

TEST_CASE("chart-local representative rejects image escapes") {
  Chart source{"u", 1, Box::cube(1, 1.0)};
  Chart small_target{"v", 1, Box::cube(1, 0.5)};
  Chart big_target{"w", 1, Box::cube(1, 3.0)};
  const auto doubling = DifferentiableMap::linear(Mat::Constant(1, 1, 2.0));
  const GridSpec samples{source.domain, 33};
  CHECK_NOTHROW(local_representative(doubling, source, big_target, samples));
  CHECK_THROWS_AS(local_representative(doubling, source, small_target, samples), ChartMismatch);
}
