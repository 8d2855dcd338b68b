#pragma once

#include "stratlab/geometry.hpp"
#include "stratlab/subspace.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace stratlab {

/// Three-valued membership: numerical non-convergence is reported as
/// Inconclusive, never conflated with a definite No.
enum class Membership { Yes, No, Inconclusive };
const char* membership_name(Membership m);

enum class RegionKind { Positive, Nonzero };

/// Open-region side condition p(y) > 0 or p(y) != 0 attached to an implicit
/// stratum. Evaluated exactly at the query point: boundary points fail.
struct RegionInequality {
  PolynomialMap poly;  // scalar-valued, real field
  RegionKind kind = RegionKind::Positive;
};

/// Zero set of a constraint map with 0 as a regular value, cut down by open
/// region inequalities. The only representation allowed over the complex
/// field (no region inequalities there).
struct ImplicitRepr {
  PolynomialMap constraint;  // ambient -> ambient - dim
  std::vector<RegionInequality> region;
};

/// Image of a polynomial immersion over a parameter box whose faces may be
/// individually open; points whose only preimages sit on open faces are not
/// on the stratum. Real field only.
struct ParametricRepr {
  PolynomialMap immersion;  // dim -> ambient
  Box param_box;
  std::vector<bool> lo_open, hi_open;  // per parameter axis
};

/// One smooth piece of a stratified set, in the identity chart of the
/// target. Immutable after construction.
class Stratum {
 public:
  Stratum(std::string name, int ambient_dim, int dim, Field field, ImplicitRepr repr,
          std::optional<Box> sample_box = std::nullopt);
  Stratum(std::string name, int ambient_dim, int dim, ParametricRepr repr,
          std::optional<Box> sample_box = std::nullopt);

  /// Affine stratum through `base` spanning `directions`, stored implicitly
  /// with the orthogonal complement rows as constraints.
  static Stratum linear(std::string name, const CVec& base, const Subspace& directions);

  const std::string& name() const { return name_; }
  int ambient_dim() const { return n_; }
  int dim() const { return d_; }
  int codim() const { return n_ - d_; }
  Field field() const { return field_; }
  bool is_implicit() const { return std::holds_alternative<ImplicitRepr>(repr_); }
  const ImplicitRepr& implicit_repr() const;
  const ParametricRepr& parametric_repr() const;
  /// Ambient box used for seeding projections and validation samples.
  const Box& sample_box() const { return sample_box_; }

 private:
  std::string name_;
  int n_, d_;
  Field field_;
  std::variant<ImplicitRepr, ParametricRepr> repr_;
  Box sample_box_;
};

/// Finite stratified set. Disjointness and union-closedness are contracts
/// checked by sampling (see validate), not enforced algebraically.
struct Stratification {
  std::string name;
  int ambient_dim = 0;
  Field field = Field::Real;
  std::vector<Stratum> strata;
  bool union_closed = false;
  std::optional<bool> declared_a_regular;

  /// Smallest stratum dimension; the codimension bound n - min_dim drives
  /// the dimension hypothesis of the witness construction.
  int min_dim() const;
};

/// Nearest point on the closure of a stratum (open region inequalities
/// relaxed to their closed forms, Nonzero dropped).
struct ProjectionResult {
  Vec point;
  double distance = std::numeric_limits<double>::infinity();
  bool converged = false;
};

Membership membership(const Stratum& s, const Vec& y, double tol = tol::membership);
Membership membership(const Stratum& s, const CVec& y, double tol = tol::membership);
/// Convenience: membership == Yes.
bool on_stratum(const Stratum& s, const Vec& y, double tol = tol::membership);

/// Tangent space at an on-stratum point: kernel of the constraint Jacobian
/// (implicit) or column span of the immersion Jacobian at the preimage
/// (parametric). Throws NotOnStratum off the stratum and SingularPoint when
/// the defining rank is not met conclusively.
Subspace tangent_at(const Stratum& s, const Vec& y);
Subspace tangent_at(const Stratum& s, const CVec& y);

ProjectionResult nearest_point(const Stratum& s, const Vec& y);
/// Distance from y to the closure of s; infinity when no projection seed
/// converges (the caller sees the non-certificate through converged=false
/// of nearest_point).
double nearest_distance(const Stratum& s, const Vec& y);

/// On-stratum sample points, used for validation and cross-stratum
/// disjointness checks. Parametric: immersion images over a parameter grid
/// (open faces excluded). Implicit: projected ambient grid seeds, deduped.
std::vector<Vec> sample_points(const Stratum& s, int points_per_axis = 0);

struct OverlapViolation {
  Vec point;
  std::string stratum_a, stratum_b;
};
struct RankViolation {
  std::string stratum;
  Vec where;  // ambient point (implicit) or parameter (parametric)
};

struct StratificationReport {
  int min_dim = 0;
  bool valid = true;
  std::vector<OverlapViolation> overlaps;
  std::vector<RankViolation> rank_failures;
  /// Sampled limit points escaping the union while union_closed is declared.
  std::vector<Vec> escaped_limits;
};

/// Sampling-based contract check: pairwise disjointness on stratum samples,
/// regular-value / immersion rank at samples, and a closure spot check for
/// declared union-closed stratifications.
StratificationReport validate(const Stratification& sigma, int points_per_axis = 0);

}  // namespace stratlab
