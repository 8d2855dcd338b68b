#include "stratlab/regularity.hpp"

#include <algorithm>
#include <cmath>

namespace stratlab {
namespace {

constexpr int kTailCap = 64;

std::vector<int> tail_indices(int n) {
  const int start = std::max(0, n - std::max(2, n / 4));
  std::vector<int> idx;
  const int len = n - start;
  if (len <= kTailCap) {
    for (int i = start; i < n; ++i) idx.push_back(i);
    return idx;
  }
  for (int i = 0; i < kTailCap; ++i) {
    idx.push_back(start + static_cast<int>((static_cast<long>(i) * (len - 1)) / (kTailCap - 1)));
  }
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

ConditionAReport report_against(const Subspace& lower_tangent, const TangentSequence& seq,
                                double tol_a) {
  ConditionAReport report;
  const auto est = estimate_tau_limit(seq);
  report.converged = est.converged;
  report.max_tail_distance = est.max_tail_distance;
  report.tail_distances = est.tail_distances;
  report.approach_first = (seq.point(0) - seq.limit()).norm();
  report.approach_last = (seq.point(seq.size() - 1) - seq.limit()).norm();
  report.per_step_residuals.reserve(static_cast<std::size_t>(seq.size()));
  for (int k = 0; k < seq.size(); ++k) {
    report.per_step_residuals.push_back(containment_residual(seq.tangent(k), lower_tangent));
  }
  if (!est.converged) {
    report.outcome = ConditionAOutcome::NoLimit;
    return report;
  }
  report.tau_limit = est.tau;
  report.containment_residual = containment_residual(*est.tau, lower_tangent);
  report.holds = report.containment_residual <= tol_a;
  report.outcome = report.holds ? ConditionAOutcome::Certified : ConditionAOutcome::Refuted;
  return report;
}

}  // namespace

std::vector<double> Schedule::times() const {
  if (kind == Kind::Explicit) {
    if (values.empty()) throw InvalidOperands("explicit schedule without values");
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      if (values[i + 1] >= values[i]) throw InvalidOperands("schedule times must decrease");
    }
    if (values.back() <= 0.0) throw InvalidOperands("schedule times must stay positive");
    return values;
  }
  if (count < 1 || t0 <= 0.0) throw InvalidOperands("schedule needs count >= 1 and t0 > 0");
  if (kind == Kind::Geometric && (rho <= 0.0 || rho >= 1.0)) {
    throw InvalidOperands("geometric ratio must sit in (0, 1)");
  }
  std::vector<double> t(static_cast<std::size_t>(count));
  double g = t0;
  for (int k = 1; k <= count; ++k) {
    if (kind == Kind::Geometric) {
      g *= rho;
      t[static_cast<std::size_t>(k - 1)] = g;
    } else {
      t[static_cast<std::size_t>(k - 1)] = t0 / k;
    }
  }
  return t;
}

Schedule Schedule::geometric(double t0, double rho, int count) {
  Schedule s;
  s.kind = Kind::Geometric;
  s.t0 = t0;
  s.rho = rho;
  s.count = count;
  return s;
}

Schedule Schedule::harmonic(double t0, int count) {
  Schedule s;
  s.kind = Kind::Harmonic;
  s.t0 = t0;
  s.count = count;
  return s;
}

Schedule Schedule::explicit_times(std::vector<double> values) {
  Schedule s;
  s.kind = Kind::Explicit;
  s.values = std::move(values);
  s.count = static_cast<int>(s.values.size());
  return s;
}

TangentSequence TangentSequence::from_data(Field field, std::vector<CVec> points,
                                           std::vector<Subspace> tangents, CVec limit,
                                           std::string provenance) {
  if (points.empty() || points.size() != tangents.size()) {
    throw InvalidOperands("sequence needs matching nonempty points and tangents");
  }
  const int n = static_cast<int>(limit.size());
  const int d = tangents.front().dim();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != n) throw DimensionMismatch("sequence point dimension");
    if (tangents[i].field() != field || tangents[i].ambient_dim() != n) {
      throw InvalidOperands("sequence tangent field or ambient mismatch");
    }
    if (tangents[i].dim() != d) throw DimensionMismatch("sequence tangent dimensions vary");
    if (field == Field::Real && points[i].imag().cwiseAbs().maxCoeff() != 0.0) {
      throw InvalidOperands("real sequence with complex points");
    }
  }
  if ((points.back() - limit).norm() >= (points.front() - limit).norm()) {
    throw InvalidOperands("sequence does not approach its limit point");
  }
  TangentSequence seq;
  seq.field_ = field;
  seq.points_ = std::move(points);
  seq.tangents_ = std::move(tangents);
  seq.limit_ = std::move(limit);
  seq.provenance_ = std::move(provenance);
  return seq;
}

Vec TangentSequence::real_point(int k) const {
  if (field_ != Field::Real) throw InvalidOperands("real view of a complex sequence");
  return point(k).real();
}

Vec TangentSequence::real_limit() const {
  if (field_ != Field::Real) throw InvalidOperands("real view of a complex sequence");
  return limit_.real();
}

TangentSequence sequence_from_curve(const Stratum& y, const DifferentiableMap& curve,
                                    const Vec& x, const Schedule& schedule) {
  if (curve.source_dim() != 1 || curve.target_dim() != y.ambient_dim()) {
    throw DimensionMismatch("approach curve must map a parameter into the ambient space");
  }
  std::vector<CVec> points;
  std::vector<Subspace> tangents;
  for (double t : schedule.times()) {
    const Vec p = curve(Vec::Constant(1, t));
    if (membership(y, p) != Membership::Yes) {
      throw NotOnStratum("approach curve leaves the stratum at t = " + std::to_string(t));
    }
    points.push_back(p.cast<Complex>());
    tangents.push_back(tangent_at(y, p));
  }
  return TangentSequence::from_data(Field::Real, std::move(points), std::move(tangents),
                                    x.cast<Complex>(), "curve on " + y.name());
}

TangentSequence sequence_from_velocities(const DifferentiableMap& curve, const Vec& x,
                                         const Schedule& schedule, const Stratum* check) {
  if (curve.source_dim() != 1) throw DimensionMismatch("velocity curve needs one parameter");
  std::vector<CVec> points;
  std::vector<Subspace> tangents;
  for (double t : schedule.times()) {
    const Vec p = curve(Vec::Constant(1, t));
    if (check && membership(*check, p) != Membership::Yes) {
      throw NotOnStratum("approach curve leaves the stratum at t = " + std::to_string(t));
    }
    const Vec velocity = curve.jacobian(Vec::Constant(1, t)).col(0);
    if (velocity.norm() <= 1e-14) throw SingularPoint("vanishing curve velocity");
    points.push_back(p.cast<Complex>());
    tangents.push_back(Subspace::from_span_real(velocity));
  }
  return TangentSequence::from_data(Field::Real, std::move(points), std::move(tangents),
                                    x.cast<Complex>(), "curve velocities");
}

TauLimitEstimate estimate_tau_limit(const TangentSequence& seq, double tol_conv) {
  if (seq.size() < 5) throw InvalidOperands("limit estimation needs at least 5 terms");
  TauLimitEstimate est;
  const auto idx = tail_indices(seq.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const double d = subspace_distance(seq.tangent(idx[a]), seq.tangent(idx[b]));
      est.tail_distances.push_back(d);
      est.max_tail_distance = std::max(est.max_tail_distance, d);
    }
  }
  est.converged = est.max_tail_distance <= tol_conv;
  if (est.converged) est.tau = seq.tangent(seq.size() - 1);
  return est;
}

const char* condition_a_outcome_name(ConditionAOutcome o) {
  switch (o) {
    case ConditionAOutcome::Certified: return "certified";
    case ConditionAOutcome::Refuted: return "refuted";
    default: return "no-limit";
  }
}

ConditionAReport check_condition_a(const Stratum& x_stratum, const Vec& x,
                                   const TangentSequence& seq, double tol_a) {
  if (seq.field() != Field::Real) throw InvalidOperands("real check on a complex sequence");
  if ((x.cast<Complex>() - seq.limit()).norm() > tol::membership * (1.0 + x.norm())) {
    throw InvalidOperands("check point differs from the sequence limit");
  }
  if (membership(x_stratum, x) != Membership::Yes) {
    throw NotOnStratum("limit point off the lower stratum");
  }
  return report_against(tangent_at(x_stratum, x), seq, tol_a);
}

ConditionAReport check_condition_a(const Stratum& x_stratum, const CVec& x,
                                   const TangentSequence& seq, double tol_a) {
  if (seq.field() != Field::Complex) throw InvalidOperands("complex check on a real sequence");
  if ((x - seq.limit()).norm() > tol::membership * (1.0 + x.norm())) {
    throw InvalidOperands("check point differs from the sequence limit");
  }
  if (membership(x_stratum, x) != Membership::Yes) {
    throw NotOnStratum("limit point off the lower stratum");
  }
  return report_against(tangent_at(x_stratum, x), seq, tol_a);
}

PairScan scan_pairs(const Stratification& sigma, const std::vector<ApproachSpec>& approaches,
                    double tol_a) {
  PairScan scan;
  auto find = [&](const std::string& name) -> const Stratum& {
    for (const Stratum& s : sigma.strata) {
      if (s.name() == name) return s;
    }
    throw MalformedInput("approach names unknown stratum '" + name + "'");
  };
  for (const ApproachSpec& a : approaches) {
    const Stratum& lower = find(a.lower);
    const Stratum& upper = find(a.upper);
    const auto seq = sequence_from_curve(upper, a.curve, a.frontier_point, a.schedule);
    PairResult result{a.lower, a.upper,
                      check_condition_a(lower, a.frontier_point, seq, tol_a)};
    scan.all_certified = scan.all_certified && result.report.holds;
    scan.results.push_back(std::move(result));
  }
  return scan;
}

}  // namespace stratlab
