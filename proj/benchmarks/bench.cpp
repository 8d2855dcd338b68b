// Micro-benchmarks for the hot numeric paths: subspace construction and the
// Grassmannian metric, pointwise verdicts, compact grid sweeps, the witness
// pipeline, and the rational oracle. Numbers here set expectations for the
// grid resolutions the tools default to.

#include <benchmark/benchmark.h>

#include "stratlab/exact.hpp"
#include "stratlab/regularity.hpp"
#include "stratlab/subspace.hpp"
#include "stratlab/transversality.hpp"
#include "stratlab/witness.hpp"

using namespace stratlab;

namespace {

CMat gaussian(Rng& rng, int rows, int cols) {
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(rng.normal(), 0.0);
  }
  return m;
}

Stratum unit_circle() {
  PolynomialMap g(2, 1, Field::Real, {{{{2, 0}, 1.0}, {{0, 2}, 1.0}, {{0, 0}, -1.0}}});
  return Stratum("circle", 2, 1, Field::Real, ImplicitRepr{std::move(g), {}});
}

PolynomialMap hirsch_base() {
  return PolynomialMap(1, 2, Field::Real, {{{{1}, 1.0}}, {{{2}, 1.0}, {{0}, 1.0}}});
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

DifferentiableMap horizontal_curve() {
  PolynomialMap c(1, 2, Field::Real, {{{{1}, 1.0}}, {}});
  return c.as_map();
}

Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}

}  // namespace

static void BM_Orthonormalize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(11u);
  const CMat m = gaussian(rng, n, n / 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Subspace::from_span(Field::Real, m));
  }
}
BENCHMARK(BM_Orthonormalize)->Arg(4)->Arg(16)->Arg(64);

static void BM_SubspaceDistance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(12u);
  const Subspace a = Subspace::from_span(Field::Real, gaussian(rng, n, n / 2));
  const Subspace b = Subspace::from_span(Field::Real, gaussian(rng, n, n / 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(subspace_distance(a, b));
  }
}
BENCHMARK(BM_SubspaceDistance)->Arg(4)->Arg(16)->Arg(64);

static void BM_SumAndIntersect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(13u);
  const Subspace a = Subspace::from_span(Field::Real, gaussian(rng, n, (2 * n) / 3));
  const Subspace b = Subspace::from_span(Field::Real, gaussian(rng, n, (2 * n) / 3));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sum(a, b));
    benchmark::DoNotOptimize(intersect(a, b));
  }
}
BENCHMARK(BM_SumAndIntersect)->Arg(4)->Arg(16);

static void BM_PointVerdict(benchmark::State& state) {
  const DifferentiableMap f = hirsch_base().as_map();
  const Stratum circle = unit_circle();
  const Vec x = v1(0.0);  // image on the circle: a genuine rank decision
  for (auto _ : state) {
    benchmark::DoNotOptimize(is_transverse_at(f, x, circle));
  }
}
BENCHMARK(BM_PointVerdict);

static void BM_MarginAtPoint(benchmark::State& state) {
  const DifferentiableMap f = hirsch_base().as_map();
  const Stratum circle = unit_circle();
  const Vec x = v1(0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(margin_eta(f, x, circle));
  }
}
BENCHMARK(BM_MarginAtPoint);

static void BM_CompactSweep(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  const DifferentiableMap f = hirsch_base().as_map();
  const Stratification sigma{"circle", 2, Field::Real, {unit_circle()}, true, std::nullopt};
  const Box k(v1(0.5), v1(2.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(transverse_on_compact(f, k, sigma, points));
  }
  state.SetItemsProcessed(state.iterations() * points);
}
BENCHMARK(BM_CompactSweep)->Arg(101)->Arg(401);

static void BM_WitnessPipeline(benchmark::State& state) {
  const Stratum wall = y_axis();
  const Stratum ray = positive_x_axis();
  const Vec origin = Vec::Zero(2);
  const TangentSequence seq =
      sequence_from_curve(ray, horizontal_curve(), origin, Schedule::harmonic(1.0, 40));
  for (auto _ : state) {
    const FaultInstance fault = make_fault(wall, ray, origin, seq, 1, 1);
    benchmark::DoNotOptimize(build_witness(fault));
  }
}
BENCHMARK(BM_WitnessPipeline);

static void BM_ConditionA(benchmark::State& state) {
  const Vec origin = Vec::Zero(2);
  const TangentSequence seq = sequence_from_curve(
      positive_x_axis(), horizontal_curve(), origin, Schedule::harmonic(1.0, 40));
  const Stratum wall = y_axis();
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_condition_a(wall, origin, seq));
  }
}
BENCHMARK(BM_ConditionA);

static void BM_ExactRank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(14u);
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(rng.uniform_int(-9, 9));
  }
  const exact::RMat e = exact::RMat::from_real(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact::rank(e));
  }
}
BENCHMARK(BM_ExactRank)->Arg(4)->Arg(8)->Arg(12);

BENCHMARK_MAIN();
