// Acceptance gate: every shipped claim, one line per criterion, exit 0 only
// when all hold. Tolerances and runtime budgets are pinned here, not tuned
// per run.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "stratlab/exact.hpp"
#include "stratlab/gallery.hpp"
#include "stratlab/neighborhoods.hpp"
#include "stratlab/regularity.hpp"
#include "stratlab/subspace.hpp"
#include "stratlab/transversality.hpp"
#include "stratlab/witness.hpp"

using namespace stratlab;

namespace {

// Pinned gate tolerances.
constexpr double kHLineTol = 1e-12;          // floating direction plane vs the axis line
constexpr double kMemberMarginCap = 1e-10;   // per-member tangency margin
constexpr double kC1Slack = 1e-9;            // |c1_distance - 1/k|
constexpr double kSlideParamCap = 0.025;     // directed slide parameter bound
constexpr double kSlideMarginCap = 1e-9;     // margin at the escaped tangency
constexpr double kEpsilonHirsch = 0.1;       // neighborhood radius, slide hunt
constexpr double kResidualPairTol = 1e-6;    // refuted containment residual vs 1
constexpr double kResidualOscTol = 1e-3;     // oscillation residual vs 1/sqrt(2)
constexpr double kResidualTopCap = 1e-10;    // within-top-stratum residual
constexpr double kInvarianceCap = 1e-10;     // basis-change distance drift
constexpr double kMetricSlack = 1e-8;        // metric axiom slack
constexpr double kDimExcessBand = 1e-6;      // containment residual band treated unsettled
constexpr int kOpennessSamples = 20;         // per seed
constexpr int kOpennessSeeds = 10;           // 10 x 20 = 200 draws
constexpr int kOpennessGrid = 161;           // per-axis resolution of both grid checks
constexpr double kBudgetWitness = 1.0;       // seconds
constexpr double kBudgetComplex = 1.0;
constexpr double kBudgetSlide = 1.0;
constexpr double kBudgetOpenness = 10.0;
constexpr double kBudgetGallery = 30.0;

struct Gate {
  std::string name;
  bool ok = false;
  double seconds = 0.0;
  std::string detail;
};

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

Stratum y_axis() {
  PolynomialMap g(2, 1, Field::Real, {{{{1, 0}, 1.0}}});
  return Stratum("y-axis", 2, 1, Field::Real, ImplicitRepr{std::move(g), {}});
}

Stratum x_axis() {
  PolynomialMap g(2, 1, Field::Real, {{{{0, 1}, 1.0}}});
  return Stratum("x-axis", 2, 1, Field::Real, ImplicitRepr{std::move(g), {}});
}

DifferentiableMap horizontal_curve() {
  PolynomialMap c(1, 2, Field::Real, {{{{1}, 1.0}}, {}});
  return c.as_map();
}

PolynomialMap hirsch_base() {
  return PolynomialMap(1, 2, Field::Real, {{{{1}, 1.0}}, {{{2}, 1.0}, {{0}, 1.0}}});
}

DifferentiableMap slide_member(double c) {
  return DifferentiableMap(
      1, 2,
      [c](const Vec& z) {
        Vec y(2);
        y << z(0) - c, (z(0) - c) * (z(0) - c) + 1.0;
        return y;
      },
      [c](const Vec& z) {
        Mat j(2, 1);
        j << 1.0, 2.0 * (z(0) - c);
        return j;
      },
      "slide");
}

WeakNeighborhoodSpec hirsch_spec(double epsilon) {
  const Chart src{"half-line", 1,
                  Box(v1(1e-8), v1(std::numeric_limits<double>::infinity()))};
  const Chart tgt{"plane", 2, Box::unbounded(2)};
  return WeakNeighborhoodSpec(hirsch_base().as_map(), src, tgt, Box(v1(0.5), v1(2.0)), epsilon);
}

exact::RMat rcol(std::initializer_list<double> entries) {
  Vec v(static_cast<int>(entries.size()));
  int i = 0;
  for (double e : entries) v(i++) = e;
  return exact::RMat::from_real(v);
}

template <typename F>
Gate timed(std::string name, double budget, F&& body) {
  Gate g;
  g.name = std::move(name);
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << " threw: " << e.what();
  }
  g.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (g.seconds > budget) {
    ok = false;
    detail << " over budget " << budget << "s";
  }
  g.ok = ok;
  g.detail = detail.str();
  return g;
}

// 1: the perturbation family on the two-axes fixture. The direction plane is
// the horizontal line (exactly, under the rational oracle), every member
// hits (1/k, 0) exactly, is tangent there, and sits at C1 distance 1/k from
// the base map.
Gate criterion_witness() {
  return timed("witness soundness", kBudgetWitness, [](std::ostringstream& d) {
    const Stratum wall = y_axis();
    const Stratum ray = positive_x_axis();
    const Vec origin = v2(0.0, 0.0);
    const TangentSequence seq =
        sequence_from_curve(ray, horizontal_curve(), origin, Schedule::harmonic(1.0, 40));
    const FaultInstance fault = make_fault(wall, ray, origin, seq, 1, 1);
    const WitnessFamily family = build_witness(fault);

    const auto facts =
        exact::h_construction_facts(rcol({0, 1}), rcol({1, 0}), rcol({0, 1}), 1);
    bool ok = facts.feasible && facts.dim_h == 1 && exact::spans_equal(facts.h, rcol({1, 0}));
    ok = ok && subspace_distance(family.h, Subspace::from_span_real(v2(1.0, 0.0))) <= kHLineTol;

    ok = ok && family.members.size() == 40;
    const TransversalityVerdict base_at_wall =
        is_transverse_at(*family.base, v1(0.0), wall);
    ok = ok && base_at_wall.transverse && base_at_wall.conclusive;
    double worst_margin = 0.0, worst_gap = 0.0;
    for (const WitnessMember& m : family.members) {
      ok = ok && m.y(0).real() == 1.0 / m.k && m.y(1) == Complex(0.0);
      const double margin = margin_eta(*m.map, v1(0.0), ray);
      worst_margin = std::max(worst_margin, margin);
      const double gap =
          std::abs(c1_distance(*m.map, *family.base, family.plateau, 101) - 1.0 / m.k);
      worst_gap = std::max(worst_gap, gap);
      ok = ok && !m.verdict.transverse && m.verdict.conclusive;
    }
    ok = ok && worst_margin <= kMemberMarginCap && worst_gap <= kC1Slack;
    d << "H=(1,0) exact, 40 members, max margin " << worst_margin << ", max |c1-1/k| "
      << worst_gap;
    return ok;
  });
}

// 2: the same construction over the complex coordinate lines.
Gate criterion_complex_witness() {
  return timed("complex witness", kBudgetComplex, [](std::ostringstream& d) {
    PolynomialMap first(2, 1, Field::Complex, {{{{1, 0}, 1.0}}});
    PolynomialMap second(2, 1, Field::Complex, {{{{0, 1}, 1.0}}});
    const Stratum wall("wall", 2, 1, Field::Complex, ImplicitRepr{std::move(first), {}});
    const Stratum line("line", 2, 1, Field::Complex, ImplicitRepr{std::move(second), {}});
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
        TangentSequence::from_data(Field::Complex, points, tangents, origin, "axis steps");
    const FaultInstance fault =
        make_complex_fault(wall, line, origin, seq, 1, Subspace::full(Field::Complex, 1));
    const WitnessFamily family = complex_witness(fault);

    bool ok = subspace_distance(family.h, Subspace::line(Field::Complex, CVec::Unit(2, 0))) <=
              kHLineTol;
    ok = ok && family.members.size() == 40;
    ok = ok && family.base_verdict.transverse && family.base_verdict.conclusive;
    double worst_margin = 0.0;
    for (const WitnessMember& m : family.members) {
      ok = ok && m.y(0) == Complex(1.0 / m.k, 0.0) && m.y(1) == Complex(0.0);
      worst_margin = std::max(worst_margin, m.margin);
      ok = ok && !m.verdict.transverse && m.verdict.conclusive;
    }
    ok = ok && worst_margin <= kMemberMarginCap;
    d << "H=(1,0) over C, 40 members, max margin " << worst_margin;
    return ok;
  });
}

// 3: the directed slide defeats transversality from inside the epsilon
// neighborhood, and the failure point sits outside the control box.
Gate criterion_slide() {
  return timed("escaping slide counterexample", kBudgetSlide, [](std::ostringstream& d) {
    const WeakNeighborhoodSpec spec = hirsch_spec(kEpsilonHirsch);
    const Stratum circle = unit_circle();
    const Stratification sigma{"circle", 2, Field::Real, {circle}, true, std::nullopt};
    DirectedFamily fam;
    fam.name = "slide";
    fam.c_max = 0.1;
    fam.member = [](double c) { return slide_member(c); };
    fam.failure_hint = [](double c) { return v1(c); };

    const ProbeReport report = probe_openness(spec, sigma, 0, 7u, &fam);
    if (!report.counterexample || !report.counterexample->parameter) {
      d << "no counterexample found";
      return false;
    }
    const double c = *report.counterexample->parameter;
    const double dist = c1_distance(hirsch_base().as_map(), slide_member(c), spec.k);
    const double margin = margin_eta(slide_member(c), v1(c), circle);
    const bool escapes =
        report.counterexample->escapes_compact && !spec.k.contains(report.counterexample->failure_point);
    bool ok = c > 0.0 && c <= kSlideParamCap;
    ok = ok && nbhd_contains(spec, slide_member(c));
    ok = ok && dist < kEpsilonHirsch;
    ok = ok && margin <= kSlideMarginCap;
    ok = ok && escapes;
    d << "c " << c << ", c1 distance " << dist << ", margin " << margin
      << ", failure escapes K";
    return ok;
  });
}

// 4: every sampled perturbation in the epsilon neighborhood stays transverse
// over the control box, across seeds.
Gate criterion_openness() {
  return timed("empirical openness", kBudgetOpenness, [](std::ostringstream& d) {
    const Stratification sigma{"circle", 2, Field::Real, {unit_circle()}, true, std::nullopt};
    const Box k(v1(0.5), v1(2.0));
    const CompactReport base_report =
        transverse_on_compact(hirsch_base().as_map(), k, sigma);
    if (!base_report.transverse || !base_report.conclusive) {
      d << "base map not certified transverse on the box";
      return false;
    }
    const double epsilon = std::min(0.05, base_report.min_clearance / 2.0);
    const WeakNeighborhoodSpec spec = hirsch_spec(epsilon);
    int total = 0, transverse = 0;
    for (int s = 0; s < kOpennessSeeds; ++s) {
      const auto draws = sample_perturbations(
          spec, kOpennessSamples, 1000u + static_cast<std::uint64_t>(s), kOpennessGrid);
      for (const DifferentiableMap& g : draws) {
        ++total;
        const CompactReport r = transverse_on_compact(g, k, sigma, kOpennessGrid);
        if (r.transverse && r.conclusive) ++transverse;
      }
    }
    const double fraction = total == 0 ? 0.0 : static_cast<double>(transverse) / total;
    d << "epsilon " << epsilon << ", " << transverse << "/" << total
      << " transverse, fraction " << fraction;
    return total == kOpennessSamples * kOpennessSeeds && fraction == 1.0;
  });
}

// 5: limit-tangent containment across the fixture pairs: refuted at the
// two-axes corner, schedule-dependent on the oscillating curve, immediate
// within a top-dimensional stratum.
Gate criterion_condition_a() {
  return timed("condition-(a) verdicts", 30.0, [](std::ostringstream& d) {
    const Vec origin = v2(0.0, 0.0);

    const TangentSequence axes_seq = sequence_from_curve(
        positive_x_axis(), horizontal_curve(), origin, Schedule::harmonic(1.0, 40));
    const ConditionAReport axes = check_condition_a(y_axis(), origin, axes_seq);
    bool ok = axes.outcome == ConditionAOutcome::Refuted &&
              std::abs(axes.containment_residual - 1.0) <= kResidualPairTol;

    const DifferentiableMap curve(
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
        "oscillating curve");
    std::vector<double> refuting;
    for (int k = 1; k <= 40; ++k) refuting.push_back(1.0 / (2.0 * M_PI * k));
    const ConditionAReport osc_refuted = check_condition_a(
        x_axis(), origin,
        sequence_from_velocities(curve, origin, Schedule::explicit_times(refuting)));
    ok = ok && osc_refuted.outcome == ConditionAOutcome::Refuted &&
         std::abs(osc_refuted.containment_residual - std::sqrt(0.5)) <= kResidualOscTol;

    std::vector<double> certifying;
    for (int i = 0; i < 64; ++i) {
      const double k = 3.0e5 + std::floor((1.0e5 * i) / 63.0);
      certifying.push_back(1.0 / ((2.0 * k + 0.5) * M_PI));
    }
    std::sort(certifying.begin(), certifying.end(), std::greater<double>());
    const ConditionAReport osc_certified = check_condition_a(
        x_axis(), origin,
        sequence_from_velocities(curve, origin, Schedule::explicit_times(certifying)));
    ok = ok && osc_certified.outcome == ConditionAOutcome::Certified;

    const TangentSequence top_seq = sequence_from_curve(
        x_axis(), horizontal_curve(), origin, Schedule::harmonic(1.0, 20));
    const ConditionAReport top = check_condition_a(x_axis(), origin, top_seq);
    ok = ok && top.outcome == ConditionAOutcome::Certified &&
         top.containment_residual <= kResidualTopCap;

    d << "corner residual " << axes.containment_residual << ", oscillation "
      << osc_refuted.containment_residual << " refuted / "
      << osc_certified.containment_residual << " certified, top residual "
      << top.containment_residual;
    return ok;
  });
}

// 6: floating verdicts against exact rational reruns on random linear data.
Gate criterion_oracle() {
  return timed("oracle equivalence", 60.0, [](std::ostringstream& d) {
    Rng rng(606060u);
    int compared = 0, agreed = 0, inconclusive = 0, opportunities = 0;

    const auto int_mat = [&rng](int rows, int cols) {
      Mat m(rows, cols);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = static_cast<double>(rng.uniform_int(-3, 3));
      }
      return m;
    };
    const auto int_span = [&](int n, int dim) {  // integer basis with exact rank dim
      for (;;) {
        Mat m = int_mat(n, dim);
        if (exact::rank(exact::RMat::from_real(m)) == dim) return m;
      }
    };

    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + static_cast<int>(rng.uniform_int(0, 3));  // ambient 2..5

      // (i) pointwise transversality of an affine map against an affine stratum.
      ++opportunities;
      {
        const int m = 1 + static_cast<int>(rng.uniform_int(0, n - 1));
        const Mat a = int_mat(n, m);
        const Vec b = int_mat(n, 1).col(0);
        const Vec x = int_mat(m, 1).col(0);
        const Vec y = a * x + b;
        const int q = 1 + static_cast<int>(rng.uniform_int(0, n - 2));
        const Mat rows = int_span(n, q).transpose();
        Vec offset = rows * y;
        if (rng.uniform(0.0, 1.0) < 0.4) offset(0) += 1.0;  // push off the stratum

        const PolynomialMap fp =
            PolynomialMap::affine(Field::Real, a.cast<Complex>(), b.cast<Complex>());
        const PolynomialMap constraint = PolynomialMap::affine(
            Field::Real, rows.cast<Complex>(), (-offset).cast<Complex>());
        const Stratum s("affine", n, n - q, Field::Real, ImplicitRepr{constraint, {}});
        const TransversalityVerdict v = is_transverse_at(fp.as_map(), x, s);
        if (!v.conclusive) {
          ++inconclusive;
        } else {
          std::vector<exact::Scalar> xe, ye;
          for (int i = 0; i < m; ++i) xe.push_back(exact::Scalar::from_double(x(i)));
          for (int i = 0; i < n; ++i) ye.push_back(exact::Scalar::from_double(y(i)));
          bool on = true;
          for (const exact::Scalar& value : exact::eval_polynomial(constraint, ye)) {
            if (value.re != 0 || value.im != 0) on = false;
          }
          bool exact_transverse = true;
          if (on) {
            const exact::RMat dj = exact::polynomial_jacobian(fp, xe);
            const exact::RMat tangent =
                exact::nullspace(exact::polynomial_jacobian(constraint, ye));
            exact_transverse = exact::surjective_with(dj, tangent, n);
          }
          ++compared;
          if (v.transverse == exact_transverse) ++agreed;
        }
      }

      // (ii) five-way splitting rank facts on random subspace data.
      ++opportunities;
      {
        const int dx = 1 + static_cast<int>(rng.uniform_int(0, n - 1));
        const int dt = 1 + static_cast<int>(rng.uniform_int(0, n - 1));
        const Mat xb = int_span(n, dx);
        const Mat tb = int_span(n, dt);
        const int r = 1 + static_cast<int>(rng.uniform_int(0, std::min(dx, dt) - 1));
        const exact::RMat xe = exact::RMat::from_real(xb);
        const exact::RMat te = exact::RMat::from_real(tb);

        const Stratum lower = Stratum::linear("lower", CVec::Zero(n),
                                              Subspace::from_span_real(xb));
        const Stratum upper = Stratum::linear("upper", CVec::Zero(n),
                                              Subspace::from_span_real(tb));
        std::vector<CVec> pts;
        std::vector<Subspace> tans;
        const Vec dir = tb.col(0);
        for (int k = 1; k <= 8; ++k) {
          pts.push_back((dir / static_cast<double>(k)).cast<Complex>());
          tans.push_back(Subspace::from_span_real(tb));
        }
        const TangentSequence seq = TangentSequence::from_data(Field::Real, pts, tans,
                                                               CVec::Zero(n), "synthetic");
        bool float_nofault = false, float_feasible = false, contradiction = false;
        std::optional<Decomposition> dec;
        std::optional<Subspace> h;
        try {
          const FaultInstance fault =
              make_fault(lower, upper, Vec::Zero(n), seq, r, n);
          dec = decompose(fault);
          h = construct_H(*dec, r);
          float_feasible = true;
        } catch (const NotAFault&) {
          float_nofault = true;
        } catch (const InfeasibleH&) {
          float_feasible = false;
        } catch (const ConstructionContradiction&) {
          contradiction = true;
        }

        if (contradiction) {
          ++inconclusive;
        } else if (float_nofault) {
          ++compared;
          if (exact::span_contains(te, xe)) ++agreed;
        } else {
          // Exact fault direction: any source column outside the limit plane.
          // The splitting dimensions do not depend on which one is picked.
          int vidx = -1;
          for (int col = 0; col < dx && vidx < 0; ++col) {
            if (!exact::span_contains(te, exact::RMat::from_real(Vec(xb.col(col))))) vidx = col;
          }
          ++compared;
          if (vidx >= 0) {
            const auto facts = exact::h_construction_facts(
                xe, te, exact::RMat::from_real(Vec(xb.col(vidx))), r);
            bool match = facts.v_in_source && facts.v_outside_limit &&
                         float_feasible == facts.feasible;
            if (match && float_feasible) {
              match = facts.dim_t1 == dec->t1.dim() && facts.dim_t2 == dec->t2.dim() &&
                      facts.dim_w1 == dec->w1.dim() && facts.dim_w2 == dec->w2.dim() &&
                      facts.dim_h == h->dim();
              match = match && facts.sum_with_source_full ==
                                   (sum(*h, Subspace::from_span_real(xb)).dim() == n);
              match = match && facts.sum_with_limit_proper ==
                                   (sum(*h, Subspace::from_span_real(tb)).dim() < n);
            }
            if (match) ++agreed;
          }
        }
      }

      // (iii) containment of one random span in another.
      ++opportunities;
      {
        const int db = 1 + static_cast<int>(rng.uniform_int(0, n - 1));
        const Mat bb = int_span(n, db);
        Mat ab;
        if (rng.uniform(0.0, 1.0) < 0.5) {
          for (;;) {  // exact integer combinations of bb's columns
            const int da = 1 + static_cast<int>(rng.uniform_int(0, db - 1));
            const Mat mix = int_mat(db, da);
            ab = bb * mix;
            if (exact::rank(exact::RMat::from_real(ab)) >= 1) break;
          }
        } else {
          ab = int_span(n, 1 + static_cast<int>(rng.uniform_int(0, n - 1)));
        }
        const double residual = containment_residual(Subspace::from_span_real(bb),
                                                     Subspace::from_span_real(ab));
        const bool settled = residual <= tol::grass || residual > kDimExcessBand;
        if (!settled) {
          ++inconclusive;
        } else {
          const bool float_contained = residual <= tol::grass;
          const bool exact_contained = exact::span_contains(
              exact::RMat::from_real(bb), exact::RMat::from_real(ab));
          ++compared;
          if (float_contained == exact_contained) ++agreed;
        }
      }
    }

    const double rate = static_cast<double>(inconclusive) / opportunities;
    d << agreed << "/" << compared << " conclusive comparisons agree, inconclusive rate "
      << rate;
    return compared > 0 && agreed == compared && rate < 0.05;
  });
}

// 7: dimension arithmetic and metric axioms on random subspace pairs, both
// fields, plus basis-change invariance of the distance.
Gate criterion_kernel() {
  return timed("kernel identities", 120.0, [](std::ostringstream& d) {
    double worst_drift = 0.0, worst_axiom = 0.0;
    long dim_failures = 0;
    for (const Field field : {Field::Real, Field::Complex}) {
      Rng rng(field == Field::Real ? 70707u : 80808u);
      const auto gaussian_span = [&](int n, int dim) {
        CMat m(n, dim);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < dim; ++j) {
            m(i, j) = field == Field::Real ? Complex(rng.normal(), 0.0)
                                           : Complex(rng.normal(), rng.normal());
          }
        }
        return Subspace::from_span(field, m);
      };
      for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(0, 4));  // ambient 2..6
        const int dim = 1 + static_cast<int>(rng.uniform_int(0, n - 1));
        const Subspace a = gaussian_span(n, dim);

        // Dimension arithmetic tolerates mixed dimensions; the metric does not.
        const Subspace mixed = gaussian_span(n, 1 + static_cast<int>(rng.uniform_int(0, n - 1)));
        if (sum(a, mixed).dim() + intersect(a, mixed).dim() != a.dim() + mixed.dim())
          ++dim_failures;

        const Subspace b = gaussian_span(n, dim);
        const Subspace c = gaussian_span(n, dim);
        const double dab = subspace_distance(a, b);
        const double dba = subspace_distance(b, a);
        const double dac = subspace_distance(a, c);
        const double dcb = subspace_distance(c, b);
        worst_axiom = std::max(worst_axiom, subspace_distance(a, a));
        worst_axiom = std::max(worst_axiom, std::abs(dab - dba));
        worst_axiom = std::max(worst_axiom, dab - (dac + dcb));

        // Re-span from a randomly mixed basis: the subspace, and so every
        // distance, must not move.
        CMat mix(dim, dim);
        do {
          for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
              mix(i, j) = field == Field::Real ? Complex(rng.normal(), 0.0)
                                               : Complex(rng.normal(), rng.normal());
            }
          }
        } while (numeric_rank(mix).rank < dim);
        const Subspace remixed = Subspace::from_span(field, CMat(a.basis() * mix));
        worst_drift = std::max(worst_drift, subspace_distance(a, remixed));
        worst_drift =
            std::max(worst_drift, std::abs(subspace_distance(remixed, b) - dab));
      }
    }
    d << "2000 pairs, dim identity failures " << dim_failures << ", metric slack "
      << worst_axiom << ", basis drift " << worst_drift;
    return dim_failures == 0 && worst_axiom <= kMetricSlack && worst_drift <= kInvarianceCap;
  });
}

// 8: the full fixture gallery, through the shipped binary when the build
// provides its path, through the library otherwise.
Gate criterion_gallery() {
  return timed("gallery sweep", kBudgetGallery, [](std::ostringstream& d) {
#ifdef STRATLAB_CLI_PATH
    const std::string cmd = std::string(STRATLAB_CLI_PATH) + " gallery --all > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    d << "gallery --all exit " << code;
    return code == 0;
#else
    const std::vector<FixtureResult> results = run_gallery();
    bool ok = results.size() == 5;
    for (const FixtureResult& r : results) ok = ok && r.passed;
    d << results.size() << " fixtures, all expected values reproduced";
    return ok;
#endif
  });
}

}  // namespace

int main() {
  const std::array<Gate, 8> gates = {
      criterion_witness(),     criterion_complex_witness(), criterion_slide(),
      criterion_openness(),    criterion_condition_a(),     criterion_oracle(),
      criterion_kernel(),      criterion_gallery(),
  };
  bool all = true;
  int index = 0;
  for (const Gate& g : gates) {
    ++index;
    all = all && g.ok;
    std::printf("[%s] %d %s (%.2fs) %s\n", g.ok ? "PASS" : "FAIL", index, g.name.c_str(),
                g.seconds, g.detail.c_str());
  }
  return all ? 0 : 1;
}
