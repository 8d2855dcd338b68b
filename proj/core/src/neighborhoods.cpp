#include "stratlab/neighborhoods.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace stratlab {

namespace {

void require_box_inside(const Box& outer, const Box& inner, const char* what) {
  for (int i = 0; i < inner.dim(); ++i) {
    if (inner.lo(i) < outer.lo(i) || inner.hi(i) > outer.hi(i)) throw NotContained(what);
  }
}

DifferentiableMap bumped_perturbation(const DifferentiableMap& base, const BumpFunction& bump,
                                      const DifferentiableMap& p, double scale,
                                      std::string description) {
  auto eval = [base, bump, p, scale](const Vec& z) {
    return Vec(base(z) + (scale * bump.eval(z)) * p(z));
  };
  auto jac = [base, bump, p, scale](const Vec& z) {
    return Mat(base.jacobian(z) +
               scale * (bump.eval(z) * p.jacobian(z) + p(z) * bump.grad(z).transpose()));
  };
  return DifferentiableMap(base.source_dim(), base.target_dim(), eval, jac,
                           std::move(description));
}

}  // namespace

WeakNeighborhoodSpec::WeakNeighborhoodSpec(DifferentiableMap base_map, Chart src, Chart tgt,
                                           Box control, double eps, int order)
    : base(std::move(base_map)),
      src_chart(std::move(src)),
      tgt_chart(std::move(tgt)),
      k(std::move(control)),
      epsilon(eps),
      jet_order(order) {
  if (base.source_dim() != src_chart.dim || base.target_dim() != tgt_chart.dim)
    throw DimensionMismatch("base map does not fit the chart pair");
  if (k.dim() != src_chart.dim)
    throw DimensionMismatch("control box dimension does not match the source chart");
  if (!k.bounded()) throw NoncompactDomain("the control box must be compact");
  require_box_inside(src_chart.domain, k, "the control box must sit inside the source chart");
  if (!(epsilon > 0.0)) throw InvalidOperands("the neighborhood radius must be positive");
  if (jet_order != 1) throw InvalidOperands("only first-order neighborhoods are supported");
}

bool nbhd_contains(const WeakNeighborhoodSpec& spec, const DifferentiableMap& g,
                   int points_per_axis) {
  if (g.source_dim() != spec.base.source_dim() || g.target_dim() != spec.base.target_dim())
    throw DimensionMismatch("candidate map does not match the base map's signature");
  bool inside = true;
  GridSpec grid{spec.k, points_per_axis};
  grid.for_each([&](const Vec& x, long) {
    if (inside && !spec.tgt_chart.domain.contains(g(x))) inside = false;
  });
  if (!inside) return false;
  return c1_distance(spec.base, g, spec.k, points_per_axis) < spec.epsilon;
}

std::vector<DifferentiableMap> sample_perturbations(const WeakNeighborhoodSpec& spec, int count,
                                                    std::uint64_t seed, int points_per_axis) {
  if (count < 0) throw InvalidOperands("sample count must be nonnegative");
  Rng rng(seed);
  const BumpFunction bump(spec.k, spec.k.scaled(2.0));
  std::vector<DifferentiableMap> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const PolynomialMap poly = PolynomialMap::random(rng, spec.base.source_dim(),
                                                     spec.base.target_dim(), 3, 1.0);
    const DifferentiableMap p = poly.as_map();
    std::optional<DifferentiableMap> accepted;
    double scale = 1.0;
    for (int halving = 0; halving <= 20; ++halving) {
      DifferentiableMap candidate = bumped_perturbation(
          spec.base, bump, p, scale, "perturbation sample " + std::to_string(i));
      if (nbhd_contains(spec, candidate, points_per_axis)) {
        accepted = std::move(candidate);
        break;
      }
      scale *= 0.5;
    }
    if (!accepted)
      throw SamplingFailure("a perturbation draw missed the neighborhood after twenty halvings");
    out.push_back(std::move(*accepted));
  }
  return out;
}

double directed_parameter(const WeakNeighborhoodSpec& spec, const DirectedFamily& family,
                          int points_per_axis) {
  if (!family.member) throw InvalidOperands("directed family has no member function");
  if (!(family.c_max > 0.0)) throw InvalidOperands("directed family needs a positive bound");
  if (nbhd_contains(spec, family.member(family.c_max), points_per_axis)) return family.c_max;
  double lo = 0.0;
  double hi = family.c_max;
  for (int it = 0; it < 60 && hi - lo > 1e-15 * family.c_max; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (nbhd_contains(spec, family.member(mid), points_per_axis)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (lo == 0.0) throw SamplingFailure("no member of the directed family fits the neighborhood");
  const double backed = 0.99 * lo;
  return nbhd_contains(spec, family.member(backed), points_per_axis) ? backed : lo;
}

ProbeReport probe_openness(const WeakNeighborhoodSpec& spec, const Stratification& sigma,
                           int count, std::uint64_t seed, const DirectedFamily* directed,
                           int points_per_axis) {
  const CompactReport base_report =
      transverse_on_compact(spec.base, spec.k, sigma, points_per_axis);
  if (!base_report.transverse || !base_report.conclusive)
    throw InvalidOperands("openness probe needs a base map transverse over the box");

  ProbeReport report;
  for (const DifferentiableMap& g : sample_perturbations(spec, count, seed, points_per_axis)) {
    const CompactReport r = transverse_on_compact(g, spec.k, sigma, points_per_axis);
    ++report.samples;
    report.min_margin_seen = std::min(report.min_margin_seen, r.min_margin);
    if (r.transverse && r.conclusive) {
      ++report.transverse_count;
    } else if (!report.counterexample) {
      const CompactCheckRecord& rec =
          r.failures.empty() ? r.inconclusive_points.front() : r.failures.front();
      report.counterexample =
          ProbeCounterexample{g.description(), std::nullopt, rec.x, rec.verdict, false};
    }
  }

  if (directed != nullptr) {
    const double c = directed_parameter(spec, *directed, points_per_axis);
    const DifferentiableMap g = directed->member(c);
    ++report.samples;
    const CompactReport on_k = transverse_on_compact(g, spec.k, sigma, points_per_axis);
    report.min_margin_seen = std::min(report.min_margin_seen, on_k.min_margin);

    std::optional<ProbeCounterexample> found;
    if (!on_k.transverse && !on_k.failures.empty()) {
      const CompactCheckRecord& rec = on_k.failures.front();
      found = ProbeCounterexample{directed->name, c, rec.x, rec.verdict, false};
    } else if (directed->failure_hint) {
      const Vec hint = directed->failure_hint(c);
      const StratificationVerdict at_hint = is_transverse_to_stratification(g, hint, sigma);
      if (!at_hint.transverse) {
        TransversalityVerdict failing;
        for (const auto& [name, verdict] : at_hint.per_stratum) {
          if (!verdict.transverse) {
            failing = verdict;
            break;
          }
        }
        found = ProbeCounterexample{directed->name, c, hint, failing, !spec.k.contains(hint)};
      }
    }
    if (found) {
      if (!report.counterexample) report.counterexample = std::move(*found);
    } else if (on_k.transverse && on_k.conclusive) {
      ++report.transverse_count;
    }
  }
  return report;
}

}  // namespace stratlab
