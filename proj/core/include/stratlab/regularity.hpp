#pragma once

#include "stratlab/strata.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stratlab {

/// Parameter schedule t_1 > t_2 > ... > 0 along an approach curve.
struct Schedule {
  enum class Kind { Geometric, Harmonic, Explicit };
  Kind kind = Kind::Geometric;
  double t0 = 0.5;
  double rho = 0.7;
  int count = 40;
  std::vector<double> values;  // Explicit only

  /// Geometric: t0 * rho^k, Harmonic: t0 / k, both for k = 1..count.
  std::vector<double> times() const;

  static Schedule geometric(double t0 = 0.5, double rho = 0.7, int count = 40);
  static Schedule harmonic(double t0, int count);
  static Schedule explicit_times(std::vector<double> values);
};

/// Sequence of points on a stratum approaching a limit, with the stratum's
/// tangent plane at every point. Complex sequences are built from explicit
/// data; real ones usually come from the curve generators below.
class TangentSequence {
 public:
  static TangentSequence from_data(Field field, std::vector<CVec> points,
                                   std::vector<Subspace> tangents, CVec limit,
                                   std::string provenance = "");

  Field field() const { return field_; }
  int size() const { return static_cast<int>(points_.size()); }
  int ambient_dim() const { return static_cast<int>(limit_.size()); }
  const CVec& point(int k) const { return points_.at(static_cast<std::size_t>(k)); }
  Vec real_point(int k) const;
  const Subspace& tangent(int k) const { return tangents_.at(static_cast<std::size_t>(k)); }
  const CVec& limit() const { return limit_; }
  Vec real_limit() const;
  const std::string& provenance() const { return provenance_; }

 private:
  TangentSequence() = default;
  Field field_ = Field::Real;
  std::vector<CVec> points_;
  std::vector<Subspace> tangents_;
  CVec limit_;
  std::string provenance_;
};

/// Points y_k = curve(t_k) must lie on y; tangents are y's tangent planes
/// there. Throws NotOnStratum when the curve leaves the stratum.
TangentSequence sequence_from_curve(const Stratum& y, const DifferentiableMap& curve,
                                    const Vec& x, const Schedule& schedule);

/// Tangents taken as the curve's own velocity spans: the tangent planes of
/// any one-dimensional piece traced by the curve. Admits strata outside the
/// polynomial representations (membership is checked only when `check` is
/// supplied).
TangentSequence sequence_from_velocities(const DifferentiableMap& curve, const Vec& x,
                                         const Schedule& schedule,
                                         const Stratum* check = nullptr);

/// Grassmannian limit estimate: Cauchy test over the trailing quarter of the
/// sequence (pairwise distances, subsampled to at most 64 representatives).
struct TauLimitEstimate {
  bool converged = false;
  std::optional<Subspace> tau;  // final tangent when converged
  double max_tail_distance = 0.0;
  std::vector<double> tail_distances;  // diagnostics, subsample order
};

TauLimitEstimate estimate_tau_limit(const TangentSequence& seq,
                                    double tol_conv = tol::convergence);

enum class ConditionAOutcome { Certified, Refuted, NoLimit };
const char* condition_a_outcome_name(ConditionAOutcome o);

/// Verdict for one approach sequence: does the limit tangent plane contain
/// the lower stratum's tangent space at the limit point? `holds` is claimed
/// only for the supplied approach, never universally. Non-convergent
/// sequences are reported NoLimit, not Refuted: only sequences with a limit
/// constrain regularity.
struct ConditionAReport {
  bool converged = false;
  std::optional<Subspace> tau_limit;
  double containment_residual = std::numeric_limits<double>::infinity();
  bool holds = false;
  ConditionAOutcome outcome = ConditionAOutcome::NoLimit;
  double max_tail_distance = 0.0;
  double approach_first = 0.0, approach_last = 0.0;  // |y_1 - x|, |y_N - x|
  std::vector<double> tail_distances;      // Cauchy-test diagnostics, subsample order
  std::vector<double> per_step_residuals;  // lower tangent's residual in each tau_k
};

ConditionAReport check_condition_a(const Stratum& x_stratum, const Vec& x,
                                   const TangentSequence& seq,
                                   double tol_a = tol::condition_a);
ConditionAReport check_condition_a(const Stratum& x_stratum, const CVec& x,
                                   const TangentSequence& seq,
                                   double tol_a = tol::condition_a);

/// One supplied approach: the curve runs inside `upper` toward a frontier
/// point on `lower`.
struct ApproachSpec {
  std::string lower, upper;
  Vec frontier_point;
  DifferentiableMap curve;
  Schedule schedule;
};

struct PairResult {
  std::string lower, upper;
  ConditionAReport report;
};

/// Aggregated per-pair verdicts over the supplied approaches; one refuted or
/// non-convergent approach marks the stratification uncertified.
struct PairScan {
  bool all_certified = true;
  std::vector<PairResult> results;
};

PairScan scan_pairs(const Stratification& sigma, const std::vector<ApproachSpec>& approaches,
                    double tol_a = tol::condition_a);

}  // namespace stratlab
