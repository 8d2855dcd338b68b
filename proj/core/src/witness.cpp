#include "stratlab/witness.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <utility>

namespace stratlab {

namespace {

constexpr double kOffLimit = 1e-8;    // least principal-angle sine for a usable v
constexpr double kSpanSlack = 1e-8;   // containment slack on constructed spans
constexpr double kMarginCap = 1e-10;  // required member margin against the upper stratum

Subspace lower_tangent(const FaultInstance& fault) {
  if (fault.field == Field::Real) return tangent_at(fault.lower, Vec(fault.x.real()));
  return tangent_at(fault.lower, fault.x);
}

/// Phase-fix: rotate so the largest-modulus entry is positive real.
CVec fix_phase(CVec v) {
  int lead = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(lead)) + 1e-12) lead = i;
  }
  const Complex pivot = v(lead);
  if (std::abs(pivot) > 0) v *= std::abs(pivot) / pivot;
  return v;
}

FaultInstance assemble_fault(Field field, const Stratum& lower, const Stratum& upper,
                             const CVec& x, const TangentSequence& seq, int min_dim,
                             const Subspace& source) {
  const int n = lower.ambient_dim();
  if (upper.ambient_dim() != n || seq.ambient_dim() != n || x.size() != n) {
    throw DimensionMismatch("fault pieces must share one ambient space");
  }
  if (lower.field() != field || upper.field() != field || seq.field() != field) {
    throw InvalidOperands("fault pieces must share one scalar field");
  }
  if (min_dim < 1 || lower.dim() < 1 || upper.dim() < 1) {
    throw NotAFault("strata of dimension zero cannot carry a fault");
  }
  if (min_dim > std::min(lower.dim(), upper.dim())) {
    throw InvalidOperands("least dimension exceeds a participating stratum");
  }
  const Membership on = field == Field::Real ? membership(lower, Vec(x.real()))
                                             : membership(lower, x);
  if (on != Membership::Yes) throw NotOnStratum("fault point must lie on the lower stratum");
  if ((seq.limit() - x).norm() > tol::membership * (1.0 + x.norm())) {
    throw InvalidOperands("sequence limit point differs from the fault point");
  }

  const TauLimitEstimate est = estimate_tau_limit(seq);
  if (!est.converged || !est.tau.has_value()) {
    throw NotAFault("tangent sequence has no limit plane");
  }

  FaultInstance fault{field, n, lower, upper, x, seq, *est.tau, CVec(), min_dim, source};

  // v: top principal-angle direction of T_x(lower) against the limit plane.
  const Subspace tx = lower_tangent(fault);
  const CMat rejected = (CMat::Identity(n, n) - fault.tau.projector()) * tx.basis();
  Eigen::JacobiSVD<CMat> svd(rejected, Eigen::ComputeThinV);
  if (svd.singularValues().size() == 0 || svd.singularValues()(0) <= kOffLimit) {
    throw NotAFault("tangent space is swallowed by the limit plane");
  }
  CVec v = tx.basis() * svd.matrixV().col(0);
  v /= v.norm();
  fault.v = fix_phase(std::move(v));
  if (contains(fault.tau, Subspace::line(field, fault.v))) {
    throw NotAFault("fault direction lies in the limit plane");
  }

  if (source.dim() < n - min_dim) {
    throw DimensionHypothesisViolated("source dimension must reach ambient - least dimension");
  }
  return fault;
}

double frame_gap(const CMat& a, const CMat& b) {
  double gap = 0.0;
  for (int j = 0; j < a.cols(); ++j) gap = std::max(gap, (a.col(j) - b.col(j)).norm());
  return gap;
}

int default_audit_axis(int source_dim) {
  if (source_dim <= 1) return 201;
  if (source_dim == 2) return 33;
  return 9;
}

/// Max gradient norm of the bump over its support, sampled on a coarse grid.
double bump_slope_bound(const BumpFunction& bump) {
  const int axis = bump.outer().dim() <= 1 ? 257 : (bump.outer().dim() == 2 ? 33 : 9);
  GridSpec grid{bump.outer(), axis};
  double bound = 1.0;
  grid.for_each([&](const Vec& z, long) {
    bound = std::max(bound, bump.grad(z).lpNorm<Eigen::Infinity>());
  });
  return bound;
}

}  // namespace

FaultInstance make_fault(const Stratum& lower, const Stratum& upper, const Vec& x,
                         const TangentSequence& seq, int min_dim, int source_dim) {
  if (lower.field() != Field::Real) throw InvalidOperands("real fault on a complex stratum");
  if (source_dim < 1) throw DimensionHypothesisViolated("source must be at least a line");
  return assemble_fault(Field::Real, lower, upper, x.cast<Complex>(), seq, min_dim,
                        Subspace::full(Field::Real, source_dim));
}

FaultInstance make_complex_fault(const Stratum& lower, const Stratum& upper, const CVec& x,
                                 const TangentSequence& seq, int min_dim,
                                 const Subspace& source) {
  if (lower.field() != Field::Complex) throw InvalidOperands("complex fault on a real stratum");
  if (source.field() != Field::Complex) {
    throw NonComplexSubspace("complex fault needs a complex source model");
  }
  if (source.dim() < 1) throw DimensionHypothesisViolated("source must be at least a line");
  return assemble_fault(Field::Complex, lower, upper, x, seq, min_dim, source);
}

Decomposition decompose(const FaultInstance& fault) {
  const int n = fault.ambient;
  const Subspace tx = lower_tangent(fault);
  const Subspace t1 = intersect(tx, fault.tau);
  const Subspace e = Subspace::line(fault.field, fault.v);
  const Subspace w1 = complement_within(sum(e, t1), tx);
  const Subspace t2 = complement_within(t1, fault.tau);
  const Subspace w2 = complement_within(sum(tx, fault.tau), Subspace::full(fault.field, n));
  Decomposition d{e, w1, w2, t1, t2};

  const Subspace* parts[] = {&d.e, &d.w1, &d.w2, &d.t1, &d.t2};
  int total = 0;
  for (const Subspace* p : parts) total += p->dim();
  Subspace all = Subspace::zero(fault.field, n);
  for (const Subspace* p : parts) all = sum(all, *p);
  bool ok = total == n && all.dim() == n;
  for (int i = 0; ok && i < 5; ++i) {
    for (int j = i + 1; ok && j < 5; ++j) {
      ok = intersect(*parts[i], *parts[j]).dim() == 0;
    }
  }
  if (!ok) throw ConstructionContradiction("ambient splitting fails its rank checks");
  return d;
}

Subspace construct_H(const Decomposition& d, int min_dim) {
  const int n = d.e.ambient_dim();
  const Field field = d.e.field();
  const int target = n - min_dim;
  if (d.e.dim() != 1) throw NotAFault("splitting carries no fault direction");

  Subspace h = sum(d.t2, d.w2);
  const Subspace bound = sum(sum(d.t1, d.t2), sum(d.w1, d.w2));
  if (h.dim() > target || target > bound.dim()) {
    throw InfeasibleH("no subspace of the required dimension fits the sandwich");
  }
  for (const Subspace* block : {&d.t1, &d.w1}) {
    for (int j = 0; j < block->dim() && h.dim() < target; ++j) {
      const Subspace grown = sum(h, Subspace::line(field, block->basis().col(j)));
      if (grown.dim() > h.dim()) h = grown;
    }
  }
  if (h.dim() != target) throw InfeasibleH("sandwich cannot be filled to the target dimension");

  const Subspace tx = sum(sum(d.e, d.w1), d.t1);
  const Subspace tau = sum(d.t1, d.t2);
  if (containment_residual(bound, h) > kSpanSlack) {
    throw ConstructionContradiction("H escapes its upper sandwich bound");
  }
  if (sum(h, tx).dim() != n || sum(h, tau).dim() > n - 1) {
    throw ConstructionContradiction("H fails the span-and-miss facts");
  }
  return h;
}

CMat reference_frame(const FaultInstance& fault, const Decomposition& d, const Subspace& h) {
  const int n = fault.ambient;
  const Subspace h_tau = sum(h, fault.tau);
  const Subspace beyond = complement_within(h, h_tau);
  const Subspace rest = complement_within(sum(h_tau, d.e), Subspace::full(fault.field, n));

  CMat frame(n, n);
  int col = 0;
  for (const Subspace* block : {&h, &beyond, &rest}) {
    for (int j = 0; j < block->dim(); ++j) frame.col(col++) = block->basis().col(j);
  }
  frame.col(col++) = fault.v;
  if (col != n || numeric_rank(frame).rank != n) {
    throw ConstructionContradiction("reference frame fails to span the ambient space");
  }
  return frame;
}

DifferentiableMap build_L(const Mat& h_basis, int source_dim) {
  if (source_dim < h_basis.cols()) {
    throw DimensionHypothesisViolated("source dimension must reach the subspace dimension");
  }
  Mat a = Mat::Zero(h_basis.rows(), source_dim);
  a.leftCols(h_basis.cols()) = h_basis;
  return DifferentiableMap::linear(a, "coordinates onto the sandwich subspace");
}

DifferentiableMap localize(const DifferentiableMap& ell, const BumpFunction& bump) {
  if (bump.inner().dim() != ell.source_dim()) {
    throw DimensionMismatch("bump and map live on different source spaces");
  }
  if (!bump.inner().contains(Vec::Zero(ell.source_dim()))) {
    throw InvalidOperands("bump plateau must contain the origin");
  }
  auto eval = [ell, bump](const Vec& z) { return Vec(bump.eval(z) * ell(z)); };
  auto jac = [ell, bump](const Vec& z) {
    return Mat(bump.eval(z) * ell.jacobian(z) + ell(z) * bump.grad(z).transpose());
  };
  return DifferentiableMap(ell.source_dim(), ell.target_dim(), eval, jac,
                           "bump-localized " + ell.description())
      .with_test_box(bump.outer());
}

AlignedFrames align_bases(const TangentSequence& seq, const Subspace& tau,
                          const CMat& reference, const Subspace& h) {
  const int n = tau.ambient_dim();
  if (reference.rows() != n || reference.cols() != n) {
    throw AlignmentFailure("reference frame must be square of ambient size");
  }
  if (h.ambient_dim() != n || seq.ambient_dim() != n) {
    throw AlignmentFailure("alignment pieces must share one ambient space");
  }
  const int lead = sum(h, tau).dim();

  AlignedFrames out;
  for (int k = 0; k < seq.size(); ++k) {
    const Subspace& tau_k = seq.tangent(k);
    if (tau_k.dim() != tau.dim()) {
      throw AlignmentFailure("tangent rank drifts along the approach");
    }
    const CMat frame = direct_rotation(tau, tau_k) * reference;
    if (lead < n &&
        containment_residual(Subspace::from_span(tau.field(), frame.leftCols(lead)), tau_k) >
            1e-6) {
      throw AlignmentFailure("tangent escapes the aligned leading block");
    }
    out.residuals.push_back(frame_gap(frame, reference));
    out.frames.push_back(frame);
  }

  const double first = out.residuals.front();
  if (out.residuals.back() > 1.1 * first + 1e-10) {
    throw AlignmentFailure("alignment residual fails to shrink along the approach");
  }
  for (double r : out.residuals) {
    if (r > 10.0 * first + 1e-10) {
      throw AlignmentFailure("alignment residual spikes along the approach");
    }
  }
  return out;
}

std::vector<WitnessMember> build_family(const DifferentiableMap& base,
                                        const FaultInstance& fault,
                                        const AlignedFrames& aligned, const CMat& reference,
                                        int h_dim, const BumpFunction& bump,
                                        int audit_points_per_axis) {
  if (fault.field != Field::Real) throw InvalidOperands("bump-localized families are real");
  const int n = fault.ambient;
  const int m = fault.source_dim();
  if (static_cast<int>(aligned.frames.size()) != fault.seq.size()) {
    throw InvalidOperands("aligned frames must cover the whole sequence");
  }
  const Vec x = Vec(fault.x.real());
  const int audit = audit_points_per_axis > 0 ? audit_points_per_axis : default_audit_axis(m);

  std::vector<WitnessMember> members;
  for (int k = 0; k < fault.seq.size(); ++k) {
    const Vec y = fault.seq.real_point(k);
    const Vec shift = y - x;
    Mat delta = Mat::Zero(n, m);
    delta.leftCols(h_dim) =
        (aligned.frames[k].leftCols(h_dim) - reference.leftCols(h_dim)).real();

    auto eval = [base, bump, shift, delta](const Vec& z) {
      return Vec(base(z) + bump.eval(z) * (shift + delta * z));
    };
    auto jac = [base, bump, shift, delta](const Vec& z) {
      return Mat(base.jacobian(z) + (shift + delta * z) * bump.grad(z).transpose() +
                 bump.eval(z) * delta);
    };
    DifferentiableMap map(m, n, eval, jac,
                          "family member " + std::to_string(k + 1) + " of " + base.description());
    map = map.with_test_box(bump.outer());

    const Vec w = Vec::Zero(m);
    const TransversalityVerdict verdict = is_transverse_at(map, w, fault.upper);
    if (verdict.reason == VerdictReason::MissesStratum) {
      throw ConstructionContradiction("family member leaves the upper stratum");
    }
    if (verdict.transverse && verdict.conclusive) {
      throw ConstructionContradiction("family member is transverse against its design");
    }
    const double margin = verdict.margin.value_or(margin_eta(map, w, fault.upper));
    if (margin > kMarginCap) {
      throw ConstructionContradiction("family member margin escapes its cap");
    }
    if ((map(w) - y).norm() > 1e-14 * (1.0 + y.norm())) {
      throw ConstructionContradiction("family member misses its target point");
    }

    members.push_back(WitnessMember{
        k + 1, y.cast<Complex>(), aligned.frames[k],
        Subspace::from_span(Field::Real, aligned.frames[k].leftCols(h_dim)),
        aligned.residuals[k], margin, c1_distance(map, base, bump.outer(), audit), verdict,
        std::move(map), std::nullopt});
  }
  return members;
}

namespace {

int settled_from(const std::vector<WitnessMember>& members) {
  int from = static_cast<int>(members.size()) + 1;
  for (int i = static_cast<int>(members.size()) - 1; i >= 0; --i) {
    const auto& v = members[static_cast<std::size_t>(i)].verdict;
    if (v.conclusive && !v.transverse) {
      from = i + 1;
    } else {
      break;
    }
  }
  if (from > static_cast<int>(members.size())) {
    throw ConstructionContradiction("no settled non-transverse tail in the family");
  }
  return from;
}

}  // namespace

WitnessFamily build_witness(const FaultInstance& fault, int audit_points_per_axis) {
  if (fault.field != Field::Real) throw InvalidOperands("real pipeline fed a complex fault");
  const int m = fault.source_dim();

  const Decomposition d = decompose(fault);
  const Subspace h = construct_H(d, fault.min_dim);
  const CMat frame = reference_frame(fault, d, h);
  const DifferentiableMap ell = build_L(h.real_basis(), m);
  const BumpFunction bump(Box::cube(m, 1.0), Box::cube(m, 2.0));
  const DifferentiableMap chart = localize(ell, bump);

  const Vec x = Vec(fault.x.real());
  DifferentiableMap base(
      m, fault.ambient, [chart, x](const Vec& z) { return Vec(x + chart(z)); },
      [chart](const Vec& z) { return chart.jacobian(z); }, "localized base map");
  base = base.with_test_box(bump.outer());

  const TransversalityVerdict base_verdict =
      is_transverse_at(base, Vec::Zero(m), fault.lower);
  if (!base_verdict.transverse || !base_verdict.conclusive) {
    throw ConstructionContradiction("base map is not transverse to the lower stratum");
  }

  const AlignedFrames aligned = align_bases(fault.seq, fault.tau, frame, h);
  std::vector<WitnessMember> members =
      build_family(base, fault, aligned, frame, h.dim(), bump, audit_points_per_axis);

  WitnessFamily family{Field::Real,
                       fault,
                       d,
                       h,
                       frame,
                       bump.inner(),
                       bump.outer(),
                       ell,
                       base,
                       std::nullopt,
                       base_verdict,
                       (1.0 + bump_slope_bound(bump)) * (1.0 + 2.0 * h.dim()),
                       settled_from(members),
                       std::move(members)};
  return family;
}

WitnessFamily complex_witness(const FaultInstance& fault) {
  if (fault.field != Field::Complex) throw InvalidOperands("complex pipeline fed a real fault");
  const int n = fault.ambient;
  if (n - fault.min_dim == 0) {
    throw DimensionHypothesisViolated("degenerate family: no coordinates left to map");
  }
  if (fault.source.field() != Field::Complex) {
    throw NonComplexSubspace("complex pipeline needs a complex source model");
  }

  const Decomposition d = decompose(fault);
  const Subspace h = construct_H(d, fault.min_dim);
  const CMat frame = reference_frame(fault, d, h);
  const int h_dim = h.dim();
  const CMat u_sel = fault.source.basis().leftCols(h_dim);

  const CMat a = frame.leftCols(h_dim) * u_sel.adjoint();
  const ComplexAffineMap g(a, fault.x, fault.source);
  const CVec w = CVec::Zero(fault.source.basis().rows());
  const TransversalityVerdict base_verdict = is_transverse_at(g, w, fault.lower);
  if (!base_verdict.transverse || !base_verdict.conclusive) {
    throw ConstructionContradiction("base map is not transverse to the lower stratum");
  }

  const AlignedFrames aligned = align_bases(fault.seq, fault.tau, frame, h);
  std::vector<WitnessMember> members;
  for (int k = 0; k < fault.seq.size(); ++k) {
    const CVec y = fault.seq.point(k);
    const CMat a_k = aligned.frames[k].leftCols(h_dim) * u_sel.adjoint();
    ComplexAffineMap g_k(a_k, y, fault.source);

    const TransversalityVerdict verdict = is_transverse_at(g_k, w, fault.upper);
    if (verdict.reason == VerdictReason::MissesStratum) {
      throw ConstructionContradiction("family member leaves the upper stratum");
    }
    if (verdict.transverse && verdict.conclusive) {
      throw ConstructionContradiction("family member is transverse against its design");
    }
    const double margin = verdict.margin.value_or(margin_eta(g_k, w, fault.upper));
    if (margin > kMarginCap) {
      throw ConstructionContradiction("family member margin escapes its cap");
    }
    if ((g_k(w) - y).norm() > 1e-14 * (1.0 + y.norm())) {
      throw ConstructionContradiction("family member misses its target point");
    }

    members.push_back(WitnessMember{
        k + 1, y, aligned.frames[k],
        Subspace::from_span(Field::Complex, aligned.frames[k].leftCols(h_dim)),
        aligned.residuals[k], margin, (a_k - a).norm() + (y - fault.x).norm(), verdict,
        std::nullopt, std::move(g_k)});
  }

  WitnessFamily family{Field::Complex,
                       fault,
                       d,
                       h,
                       frame,
                       Box{},
                       Box{},
                       std::nullopt,
                       std::nullopt,
                       g,
                       base_verdict,
                       1.0,
                       settled_from(members),
                       std::move(members)};
  return family;
}

}  // namespace stratlab
