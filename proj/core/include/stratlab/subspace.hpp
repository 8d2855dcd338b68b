#pragma once

#include "stratlab/common.hpp"

namespace stratlab {

/// Outcome of a relative-threshold rank cut on a singular spectrum.
///
/// `rank` counts singular values strictly above `tol_rel * sigma_max`.
/// `smallest_kept` / `largest_dropped` are 0 when that side is empty. The
/// decision is conclusive when one side is empty or the kept and dropped
/// values are separated by a ratio above tol::rank_gap; anything closer is
/// reported inconclusive rather than silently resolved.
struct RankDecision {
  int rank = 0;
  double smallest_kept = 0.0;
  double largest_dropped = 0.0;
  bool conclusive = true;
};

/// Rank cut on an explicit (descending) singular spectrum.
RankDecision rank_decide(const Vec& singular_values, double tol_rel = tol::rank_rel);

RankDecision numeric_rank(const CMat& m, double tol_rel = tol::rank_rel);
RankDecision numeric_rank(const Mat& m, double tol_rel = tol::rank_rel);

/// Linear subspace of R^n or C^n held as a column-orthonormal basis.
///
/// Real-field subspaces use the same complex container with vanishing
/// imaginary parts; operations on them stay in real arithmetic internally, so
/// no complex phases leak into real data. Instances are immutable values.
class Subspace {
 public:
  /// Wraps an already-orthonormal basis. Columns must be orthonormal within
  /// tol::ortho, and real-field data must have imaginary parts below it.
  Subspace(Field field, CMat orthonormal_basis);

  static Subspace zero(Field field, int ambient_dim);
  static Subspace full(Field field, int ambient_dim);
  /// Single line through `v` (must be nonzero).
  static Subspace line(Field field, const CVec& v);
  /// Orthonormalizes an arbitrary spanning set, trimming numeric rank.
  static Subspace from_span(Field field, const CMat& spanning, double tol_rel = tol::rank_rel);
  static Subspace from_span_real(const Mat& spanning, double tol_rel = tol::rank_rel);

  Field field() const { return field_; }
  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const CMat& basis() const { return basis_; }
  /// Basis as a real matrix; requires a real-field subspace.
  Mat real_basis() const;
  /// Orthogonal projector onto the subspace (B B^H).
  CMat projector() const;

 private:
  Field field_;
  CMat basis_;  // ambient_dim x dim, column-orthonormal
};

// Binary operations require matching field and ambient dimension and raise
// InvalidOperands otherwise.

/// Span of the union A + B.
Subspace sum(const Subspace& a, const Subspace& b);

/// Intersection, computed from the joint kernel of the two projector
/// complements; the dimension decision uses the standard rank cut.
Subspace intersect(const Subspace& a, const Subspace& b);

/// Sine of the largest principal angle. Defined for equal dimensions only
/// (DimensionMismatch otherwise); symmetric by construction.
double subspace_distance(const Subspace& a, const Subspace& b);

/// Spectral-norm residual ||(I - P_outer) B_inner||_2 of inner against outer.
double containment_residual(const Subspace& outer, const Subspace& inner);

/// True when the residual is within `slack`.
bool contains(const Subspace& outer, const Subspace& inner, double slack = tol::grass);

/// Orthogonal complement of `inner` inside `outer`; requires containment and
/// raises NotContained otherwise. Result is orthogonal to `inner` and sums
/// with it to `outer`.
Subspace complement_within(const Subspace& inner, const Subspace& outer);

/// Completes the basis of `partial` to a full orthonormal basis of the
/// ambient space, returned as [basis | completion]. The completion comes from
/// a full orthogonal decomposition; its columns are phase-normalized so their
/// first significant coordinate is real positive, then ordered by descending
/// magnitude of that coordinate (stable for ties). Extending the zero
/// subspace yields the identity.
CMat extend_to_basis(const Subspace& partial);

/// Unitary (orthogonal, in the real field) map closest to the identity that
/// carries `from` onto `to`; rotates each principal-vector plane by its
/// principal angle and fixes the joint complement. Requires equal dimensions.
CMat direct_rotation(const Subspace& from, const Subspace& to);

/// Orthonormal basis of span(B) closest to the reference frame R in the
/// Frobenius sense: B * polar(B^H R). B and R must have matching shapes.
CMat procrustes_align(const CMat& basis, const CMat& reference);

}  // namespace stratlab
