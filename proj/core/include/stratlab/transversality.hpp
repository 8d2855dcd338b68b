#pragma once

#include "stratlab/strata.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stratlab {

enum class VerdictReason { MissesStratum, RankFull, RankDeficient, MembershipInconclusive };
const char* verdict_reason_name(VerdictReason r);

/// Outcome of a pointwise meet-or-span test against one stratum.
/// `margin` is present iff the image point lies on the stratum; `conclusive`
/// is false when the membership query, the rank decision, or the margin band
/// (inside (tol, 10 tol]) leaves the answer numerically unsettled, in which
/// case `transverse` must not be trusted.
struct TransversalityVerdict {
  bool transverse = false;
  VerdictReason reason = VerdictReason::MembershipInconclusive;
  std::optional<double> margin;
  RankDecision rank_decision;
  bool conclusive = false;
};

/// Meet-or-span at one point: either f(x) misses s, or the differential's
/// image plus the tangent space fills the target. The rank test runs on the
/// stacked block [Df(x) | tangent basis].
TransversalityVerdict is_transverse_at(const DifferentiableMap& f, const Vec& x,
                                       const Stratum& s);
/// Complex-affine counterpart on a linear source subspace.
TransversalityVerdict is_transverse_at(const ComplexAffineMap& g, const CVec& z,
                                       const Stratum& s);

/// Smallest singular value of Q* Df(x), Q an orthonormal basis of the
/// orthogonal complement of the tangent space at f(x): the distance of the
/// quotient-composed differential from the nonsurjective maps. +infinity for
/// full-dimensional strata (nothing to quotient), exactly 0 when the source
/// dimension cannot cover the codimension. Requires f(x) on the stratum.
double margin_eta(const DifferentiableMap& f, const Vec& x, const Stratum& s);
double margin_eta(const ComplexAffineMap& g, const CVec& z, const Stratum& s);

/// Conjunction over the strata with per-stratum detail.
struct StratificationVerdict {
  bool transverse = true;
  bool conclusive = true;
  std::vector<std::pair<std::string, TransversalityVerdict>> per_stratum;
};

StratificationVerdict is_transverse_to_stratification(const DifferentiableMap& f, const Vec& x,
                                                      const Stratification& sigma);
StratificationVerdict is_transverse_to_stratification(const ComplexAffineMap& g, const CVec& z,
                                                      const Stratification& sigma);

/// True when every stratum's codimension exceeds the source dimension, so
/// span is impossible and transversality degenerates to disjointness.
bool codim_shortcut_applies(const Stratum& s, int source_dim);
bool codim_shortcut_applies(const Stratification& sigma, int source_dim);

/// One grid point whose verdict against a named stratum needs reporting.
struct CompactCheckRecord {
  long grid_index = -1;
  Vec x;
  std::string stratum;
  TransversalityVerdict verdict;
};

/// Sampling certificate over a compact box: per-grid-point verdicts plus the
/// two quantities an openness argument consumes, the smallest on-stratum
/// margin and the smallest off-stratum clearance (distance of the image to
/// the nearest stratum closure, aggregated only over grid points lying on no
/// stratum). Ties resolve to the lowest grid index.
struct CompactReport {
  bool transverse = true;
  bool conclusive = true;
  long points = 0;

  double min_margin = std::numeric_limits<double>::infinity();
  std::optional<long> margin_argmin_index;
  std::string margin_argmin_stratum;

  double min_clearance = std::numeric_limits<double>::infinity();
  std::optional<long> clearance_argmin_index;

  std::vector<CompactCheckRecord> failures;
  std::vector<CompactCheckRecord> inconclusive_points;
};

/// Grid check of transversality to sigma over the compact box k. This is a
/// sampling certificate, not a proof: it certifies the sampled points only.
CompactReport transverse_on_compact(const DifferentiableMap& f, const Box& k,
                                    const Stratification& sigma, int points_per_axis = 401);

}  // namespace stratlab
