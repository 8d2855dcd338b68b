#include "stratlab/transversality.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace stratlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Margin from an effective differential and the tangent space at the image
/// point, shared by the real and complex paths. The complement basis comes
/// from the deterministic basis extension.
double margin_from(const CMat& dg, const Subspace& tangent) {
  const int n = tangent.ambient_dim();
  const int q = n - tangent.dim();
  if (q == 0) return kInf;
  if (dg.cols() < q) return 0.0;
  const CMat full = extend_to_basis(tangent);
  const CMat quotient = full.rightCols(q).adjoint() * dg;  // q x m
  Eigen::JacobiSVD<CMat> svd(quotient);
  return svd.singularValues()(q - 1);
}

/// Rank verdict on the stacked block [dg | tangent basis] with the margin
/// band folded into the conclusiveness flag.
TransversalityVerdict span_verdict(const CMat& dg, const Subspace& tangent) {
  const int n = tangent.ambient_dim();
  CMat stacked(n, dg.cols() + tangent.dim());
  stacked << dg, tangent.basis();
  Eigen::JacobiSVD<CMat> svd(stacked);
  const auto rd = rank_decide(svd.singularValues());

  TransversalityVerdict v;
  v.rank_decision = rd;
  v.margin = margin_from(dg, tangent);
  v.transverse = rd.rank == n;
  v.reason = v.transverse ? VerdictReason::RankFull : VerdictReason::RankDeficient;
  const double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  const double band = tol::rank_rel * sigma_max;
  const bool margin_settled = *v.margin <= band || *v.margin > 10.0 * band || band == 0.0;
  v.conclusive = rd.conclusive && margin_settled;
  return v;
}

TransversalityVerdict miss_verdict() {
  TransversalityVerdict v;
  v.transverse = true;
  v.reason = VerdictReason::MissesStratum;
  v.conclusive = true;
  return v;
}

TransversalityVerdict inconclusive_verdict() {
  TransversalityVerdict v;
  v.transverse = false;
  v.reason = VerdictReason::MembershipInconclusive;
  v.conclusive = false;
  return v;
}

template <typename MapT, typename PointT>
StratificationVerdict stratification_verdict(const MapT& f, const PointT& x,
                                             const Stratification& sigma) {
  StratificationVerdict out;
  for (const Stratum& s : sigma.strata) {
    const TransversalityVerdict v = is_transverse_at(f, x, s);
    out.transverse = out.transverse && v.transverse;
    out.conclusive = out.conclusive && v.conclusive;
    out.per_stratum.emplace_back(s.name(), v);
  }
  return out;
}

}  // namespace

const char* verdict_reason_name(VerdictReason r) {
  switch (r) {
    case VerdictReason::MissesStratum: return "misses-stratum";
    case VerdictReason::RankFull: return "rank-full";
    case VerdictReason::RankDeficient: return "rank-deficient";
    default: return "membership-inconclusive";
  }
}

TransversalityVerdict is_transverse_at(const DifferentiableMap& f, const Vec& x,
                                       const Stratum& s) {
  if (s.field() != Field::Real) throw InvalidOperands("real map against a complex stratum");
  if (f.target_dim() != s.ambient_dim()) {
    throw DimensionMismatch("map target and stratum ambient disagree");
  }
  const Vec y = f(x);
  switch (membership(s, y)) {
    case Membership::No: return miss_verdict();
    case Membership::Inconclusive: return inconclusive_verdict();
    case Membership::Yes: break;
  }
  return span_verdict(f.jacobian(x).cast<Complex>(), tangent_at(s, y));
}

TransversalityVerdict is_transverse_at(const ComplexAffineMap& g, const CVec& z,
                                       const Stratum& s) {
  if (s.field() != Field::Complex) throw InvalidOperands("complex map against a real stratum");
  if (g.target_dim() != s.ambient_dim()) {
    throw DimensionMismatch("map target and stratum ambient disagree");
  }
  const CVec y = g(z);
  switch (membership(s, y)) {
    case Membership::No: return miss_verdict();
    case Membership::Inconclusive: return inconclusive_verdict();
    case Membership::Yes: break;
  }
  return span_verdict(g.effective_jacobian(), tangent_at(s, y));
}

double margin_eta(const DifferentiableMap& f, const Vec& x, const Stratum& s) {
  const Vec y = f(x);
  if (membership(s, y) != Membership::Yes) {
    throw NotOnStratum("margin requested with the image off the stratum");
  }
  return margin_from(f.jacobian(x).cast<Complex>(), tangent_at(s, y));
}

double margin_eta(const ComplexAffineMap& g, const CVec& z, const Stratum& s) {
  const CVec y = g(z);
  if (membership(s, y) != Membership::Yes) {
    throw NotOnStratum("margin requested with the image off the stratum");
  }
  return margin_from(g.effective_jacobian(), tangent_at(s, y));
}

StratificationVerdict is_transverse_to_stratification(const DifferentiableMap& f, const Vec& x,
                                                      const Stratification& sigma) {
  return stratification_verdict(f, x, sigma);
}

StratificationVerdict is_transverse_to_stratification(const ComplexAffineMap& g, const CVec& z,
                                                      const Stratification& sigma) {
  return stratification_verdict(g, z, sigma);
}

bool codim_shortcut_applies(const Stratum& s, int source_dim) {
  return s.codim() > source_dim;
}

bool codim_shortcut_applies(const Stratification& sigma, int source_dim) {
  return sigma.ambient_dim - sigma.min_dim() > source_dim;
}

CompactReport transverse_on_compact(const DifferentiableMap& f, const Box& k,
                                    const Stratification& sigma, int points_per_axis) {
  if (!k.bounded()) throw NoncompactDomain("compact check needs a bounded box");
  if (k.dim() != f.source_dim()) throw DimensionMismatch("box and map source disagree");
  if (sigma.field != Field::Real) throw InvalidOperands("compact check is a real-field query");

  CompactReport report;
  const GridSpec grid{k, points_per_axis};
  grid.for_each([&](const Vec& x, long index) {
    ++report.points;
    const Vec y = f(x);
    bool on_any = false;
    for (const Stratum& s : sigma.strata) {
      const Membership m = membership(s, y);
      if (m == Membership::Inconclusive) {
        report.conclusive = false;
        report.inconclusive_points.push_back({index, x, s.name(), inconclusive_verdict()});
        continue;
      }
      if (m == Membership::No) continue;
      on_any = true;
      const TransversalityVerdict v = span_verdict(f.jacobian(x).cast<Complex>(),
                                                   tangent_at(s, y));
      report.conclusive = report.conclusive && v.conclusive;
      if (!v.transverse) {
        report.transverse = false;
        report.failures.push_back({index, x, s.name(), v});
      }
      if (*v.margin < report.min_margin) {
        report.min_margin = *v.margin;
        report.margin_argmin_index = index;
        report.margin_argmin_stratum = s.name();
      }
    }
    if (!on_any && !sigma.strata.empty()) {
      double clearance = kInf;
      for (const Stratum& s : sigma.strata) {
        const auto np = nearest_point(s, y);
        if (!np.converged) {
          report.conclusive = false;
          report.inconclusive_points.push_back({index, x, s.name(), inconclusive_verdict()});
          continue;
        }
        clearance = std::min(clearance, np.distance);
      }
      if (clearance < report.min_clearance) {
        report.min_clearance = clearance;
        report.clearance_argmin_index = index;
      }
    }
  });
  return report;
}

}  // namespace stratlab
