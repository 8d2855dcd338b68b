#pragma once

#include "stratlab/regularity.hpp"
#include "stratlab/transversality.hpp"

#include <optional>
#include <vector>

namespace stratlab {

/// Certified input for the perturbation-family construction: a frontier point
/// x of the lower stratum, a convergent tangent sequence along the upper
/// stratum whose limit plane misses the direction v inside T_x(lower), the
/// least stratum dimension r of the ambient family, and the source model the
/// built maps are defined on (full R^m in the real case, a linear subspace of
/// C^p through the origin in the complex case). The source origin plays the
/// role of the probe point w.
struct FaultInstance {
  Field field = Field::Real;
  int ambient = 0;
  Stratum lower;
  Stratum upper;
  CVec x;
  TangentSequence seq;
  Subspace tau;
  CVec v;
  int min_dim = 1;
  Subspace source;

  int source_dim() const { return source.dim(); }
};

/// Validates the fault data and picks v deterministically: the unit vector of
/// T_x(lower) farthest from the limit plane (top principal-angle direction),
/// phase-fixed so its largest-modulus entry is positive real. Throws
/// NotAFault when the sequence has no limit plane or the tangent space is
/// contained in it, NotOnStratum when x is off the lower stratum, and
/// DimensionHypothesisViolated when source_dim < ambient - min_dim.
FaultInstance make_fault(const Stratum& lower, const Stratum& upper, const Vec& x,
                         const TangentSequence& seq, int min_dim, int source_dim);

/// Complex counterpart; the source is the tangent model of the linear source
/// manifold inside C^p and must be a complex subspace.
FaultInstance make_complex_fault(const Stratum& lower, const Stratum& upper, const CVec& x,
                                 const TangentSequence& seq, int min_dim,
                                 const Subspace& source);

/// Five-way direct splitting of the ambient space induced by a fault:
/// t1 = T_x(lower) ∩ tau, e = span{v}, e + w1 + t1 = T_x(lower),
/// t1 + t2 = tau, and w2 completes the sum to the whole space.
struct Decomposition {
  Subspace e, w1, w2, t1, t2;
};

/// Builds the splitting and rank-checks it: every pairwise intersection is
/// zero and the dimensions add up to the ambient dimension. A failed check
/// raises ConstructionContradiction.
Decomposition decompose(const FaultInstance& fault);

/// The sandwich subspace: t2 + w2 <= H <= t1 + t2 + w1 + w2 with
/// dim H = ambient - min_dim, grown greedily from t2 + w2 by appending basis
/// columns of t1 then w1. The result spans the ambient space together with
/// T_x(lower) but stays short of it together with tau; both facts are
/// verified after construction. Raises InfeasibleH when no subspace of the
/// required dimension fits the sandwich and NotAFault when the splitting
/// carries no fault direction.
Subspace construct_H(const Decomposition& d, int min_dim);

/// Ordered ambient frame [H basis | rest of H + tau | completion | v]: the
/// leading dim H columns span H, the leading dim(H + tau) columns contain
/// tau, and the fault direction sits last.
CMat reference_frame(const FaultInstance& fault, const Decomposition& d, const Subspace& h);

/// Linear map sending source coordinate i to the i-th column of h_basis for
/// i < dim H and to zero beyond, so its image is exactly H. Requires
/// source_dim >= number of columns (DimensionHypothesisViolated otherwise).
DifferentiableMap build_L(const Mat& h_basis, int source_dim);

/// Bump-localized base map z -> bump(z) * L(z): agrees with L on the bump's
/// plateau, vanishes outside its support, and keeps L's Jacobian at the
/// origin. The plateau must contain the origin.
DifferentiableMap localize(const DifferentiableMap& ell, const BumpFunction& bump);

/// Per-step copies of the reference frame, rotated by the direct rotation
/// taking the limit plane onto the step tangent.
struct AlignedFrames {
  std::vector<CMat> frames;
  std::vector<double> residuals;  // max column gap against the reference
};

/// Aligns the frame along the sequence. Each step keeps its tangent inside
/// the span of the leading dim(H + tau) columns, keeps the rotated H at
/// subspace distance O(residual) from H, and the residuals must shrink along
/// the sequence; violations raise AlignmentFailure.
AlignedFrames align_bases(const TangentSequence& seq, const Subspace& tau,
                          const CMat& reference, const Subspace& h);

/// One member of the perturbation family, indexed 1-based along the approach.
struct WitnessMember {
  int k = 1;
  CVec y;
  CMat frame;
  Subspace h;
  double frame_residual = 0.0;
  double margin = 0.0;
  double c1_gap = 0.0;
  TransversalityVerdict verdict;
  std::optional<DifferentiableMap> map;
  std::optional<ComplexAffineMap> affine;
};

/// The full construction output: the splitting, H, the reference frame, the
/// base maps, and the per-step members. Real families are bump-localized on
/// the stored plateau/support boxes; complex families are globally affine and
/// leave the bump fields empty. All maps emit ambient target points (the
/// target chart is centered at the frontier point).
struct WitnessFamily {
  Field field = Field::Real;
  FaultInstance fault;
  Decomposition decomposition;
  Subspace h;
  CMat frame;
  Box plateau;
  Box support;
  std::optional<DifferentiableMap> linear_part;
  std::optional<DifferentiableMap> base;
  std::optional<ComplexAffineMap> affine_base;
  TransversalityVerdict base_verdict;
  double c1_constant = 0.0;   // factor in the order-1 shrink bound
  int nontransverse_from = 1; // first k from which every verdict is settled non-transverse
  std::vector<WitnessMember> members;
};

/// Builds the real family members f_k(z) = f(z) + bump(z) * ((y_k - x) +
/// sum_i z_i * (frame_k - frame) column i) over the leading dim H columns.
/// Each member hits y_k at the origin exactly, has the rotated frame columns
/// as its leading Jacobian columns there, agrees with the base map outside
/// the bump support, and must fail transversality to the upper stratum at the
/// origin (a settled transverse verdict raises ConstructionContradiction).
std::vector<WitnessMember> build_family(const DifferentiableMap& base,
                                        const FaultInstance& fault,
                                        const AlignedFrames& aligned, const CMat& reference,
                                        int h_dim, const BumpFunction& bump,
                                        int audit_points_per_axis = 0);

/// End-to-end real pipeline: splitting, H, frame, L, bump localization,
/// alignment, family. Asserts the construction facts (H spans the ambient
/// space with T_x(lower) and misses it with tau, the base map is transverse
/// to the lower stratum at the origin, every member hits its target point and
/// has margin at most 1e-10 against the upper stratum).
WitnessFamily build_witness(const FaultInstance& fault, int audit_points_per_axis = 0);

/// Complex pipeline: the same construction with globally affine maps
/// g_k(z) = y_k + A_k z on the linear source model, no bump. Requires a
/// complex fault with ambient > min_dim (DimensionHypothesisViolated
/// otherwise; InvalidOperands on a real fault).
WitnessFamily complex_witness(const FaultInstance& fault);

}  // namespace stratlab
