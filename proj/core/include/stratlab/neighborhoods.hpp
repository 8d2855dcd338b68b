#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stratlab/common.hpp"
#include "stratlab/geometry.hpp"
#include "stratlab/strata.hpp"
#include "stratlab/transversality.hpp"

namespace stratlab {

/// First-order neighborhood of a base map, expressed in chart coordinates:
/// it holds the maps g whose values over the control box stay inside the
/// target chart and whose C1 distance to the base over that box is below
/// epsilon. The control box must be compact and sit inside the source chart.
struct WeakNeighborhoodSpec {
  WeakNeighborhoodSpec(DifferentiableMap base_map, Chart src, Chart tgt, Box control,
                       double eps, int order = 1);

  DifferentiableMap base;
  Chart src_chart;
  Chart tgt_chart;
  Box k;
  double epsilon = 0.0;
  int jet_order = 1;  // only first-order control is supported
};

/// Grid test of membership: g's values over the k-grid stay inside the target
/// chart box and the sampled C1 distance from the base is below epsilon.
/// The base map itself always passes.
bool nbhd_contains(const WeakNeighborhoodSpec& spec, const DifferentiableMap& g,
                   int points_per_axis = 401);

/// Draws `count` maps g = base + bump * (scale * p), where p is a seeded
/// random cubic polynomial map and the bump is 1 on k and 0 outside k scaled
/// by two. Each draw's scale is halved until the draw fits the neighborhood;
/// twenty halvings without success raise SamplingFailure. The same seed
/// reproduces the same draws.
std::vector<DifferentiableMap> sample_perturbations(const WeakNeighborhoodSpec& spec, int count,
                                                    std::uint64_t seed, int points_per_axis = 401);

/// One-parameter displacement family, together with an analytic guess for
/// where a member loses transversality. Random draws have no realistic chance
/// of landing on a tangency, so a family carries its own candidate point.
struct DirectedFamily {
  std::string name;
  double c_max = 1.0;
  std::function<DifferentiableMap(double)> member;
  std::function<Vec(double)> failure_hint;  // optional
};

/// Largest verified parameter in (0, c_max] whose member the neighborhood
/// contains, found by bisection on containment. The result is backed off by
/// one percent when the backed-off member still fits, so callers land safely
/// inside the neighborhood rather than on its frontier. Raises
/// SamplingFailure when no member fits at all.
double directed_parameter(const WeakNeighborhoodSpec& spec, const DirectedFamily& family,
                          int points_per_axis = 401);

struct ProbeCounterexample {
  std::string description;
  std::optional<double> parameter;  // directed-family parameter when applicable
  Vec failure_point;
  TransversalityVerdict verdict;
  bool escapes_compact = false;  // failure point lies outside the probed box
};

/// Outcome of an openness probe: how many members stayed transverse over the
/// box, and the first failure found. A counterexample implies
/// transverse_count < samples.
struct ProbeReport {
  int samples = 0;
  int transverse_count = 0;
  double min_margin_seen = std::numeric_limits<double>::infinity();
  std::optional<ProbeCounterexample> counterexample;
};

/// Checks `count` seeded perturbations from the neighborhood for
/// transversality to sigma over spec.k. A directed family, when given,
/// contributes one extra member at its largest contained parameter; if that
/// member is transverse over the box but fails at the family's hint point,
/// the failure is reported with escapes_compact set whenever the hint lies
/// outside the box. Requires the base map to pass the compact check, else
/// InvalidOperands. Reports are deterministic per seed.
ProbeReport probe_openness(const WeakNeighborhoodSpec& spec, const Stratification& sigma,
                           int count, std::uint64_t seed,
                           const DirectedFamily* directed = nullptr, int points_per_axis = 401);

}  // namespace stratlab
