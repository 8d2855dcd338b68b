#pragma once

#include "stratlab/common.hpp"
#include "stratlab/subspace.hpp"

#include <functional>

namespace stratlab {

/// Coordinate chart in the identity-chart model: the chart map is the
/// identity on `domain`, so points and their coordinates coincide.
struct Chart {
  std::string name;
  int dim = 0;
  Box domain;
};

/// Smooth map given by an evaluator and (optionally) an analytic Jacobian;
/// when no Jacobian is supplied, a central finite difference stands in.
/// Immutable value type.
class DifferentiableMap {
 public:
  using Evaluator = std::function<Vec(const Vec&)>;
  using Jacobian = std::function<Mat(const Vec&)>;

  DifferentiableMap() = default;
  DifferentiableMap(int source_dim, int target_dim, Evaluator eval, Jacobian jac,
                    std::string description = "", std::optional<Box> domain = std::nullopt,
                    std::optional<Box> test_box = std::nullopt);

  int source_dim() const { return m_; }
  int target_dim() const { return n_; }
  const std::string& description() const { return description_; }
  const std::optional<Box>& domain() const { return domain_; }
  /// Box used by consistency checks and default sampling.
  const std::optional<Box>& test_box() const { return test_box_; }

  /// Evaluates; raises DomainEscape outside the declared domain.
  Vec operator()(const Vec& z) const;
  Mat jacobian(const Vec& z) const;
  bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }

  DifferentiableMap with_domain(Box domain) const;
  DifferentiableMap with_test_box(Box box) const;
  DifferentiableMap with_description(std::string d) const;

  static DifferentiableMap linear(const Mat& a, std::string description = "");
  static DifferentiableMap affine(const Mat& a, const Vec& b, std::string description = "");

 private:
  int m_ = 0, n_ = 0;
  Evaluator eval_;
  Jacobian jac_;
  std::string description_;
  std::optional<Box> domain_;
  std::optional<Box> test_box_;
};

/// Pointwise sum f + g of two maps with identical signatures.
DifferentiableMap sum_map(const DifferentiableMap& f, const DifferentiableMap& g);

/// One term of a polynomial coordinate: coeff * prod_i z_i^powers[i].
struct Monomial {
  std::vector<int> powers;
  Complex coeff;
};

/// Polynomial map stored as explicit coefficient tables, one per target
/// coordinate. Evaluates over R or C; real-field maps must carry real
/// coefficients. The tables are exact data: the rational-arithmetic route
/// consumes them directly.
class PolynomialMap {
 public:
  PolynomialMap(int source_dim, int target_dim, Field field,
                std::vector<std::vector<Monomial>> coords);

  int source_dim() const { return m_; }
  int target_dim() const { return n_; }
  Field field() const { return field_; }
  const std::vector<std::vector<Monomial>>& terms() const { return coords_; }
  int degree() const;

  Vec eval(const Vec& z) const;
  CVec eval(const CVec& z) const;
  Mat jacobian(const Vec& z) const;
  CMat jacobian(const CVec& z) const;

  /// Real-field view as a DifferentiableMap with the exact Jacobian.
  DifferentiableMap as_map(std::optional<Box> domain = std::nullopt,
                           std::string description = "") const;

  /// z |-> a z + b as a polynomial table.
  static PolynomialMap affine(Field field, const CMat& a, const CVec& b);
  /// Dense random polynomial of total degree <= degree with coefficients
  /// uniform in [-scale, scale]; deterministic in the generator state.
  static PolynomialMap random(Rng& rng, int source_dim, int target_dim, int degree, double scale);

 private:
  int m_, n_;
  Field field_;
  std::vector<std::vector<Monomial>> coords_;
};

/// Smooth cutoff that is exactly 1 on the inner box, exactly 0 outside the
/// outer box, with all derivatives vanishing at both boundaries. Built as a
/// product of per-axis shoulders of the standard exp(-1/t) profile.
class BumpFunction {
 public:
  BumpFunction(Box inner, Box outer);

  const Box& inner() const { return inner_; }
  const Box& outer() const { return outer_; }

  double eval(const Vec& z) const;
  Vec grad(const Vec& z) const;

 private:
  Box inner_, outer_;
};

/// Central-difference Jacobian with step h = eps^(1/3) * (1 + |z|). Raises
/// DomainEscape when a stencil point leaves the declared domain.
Mat fd_jacobian(const DifferentiableMap& f, const Vec& z);
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, int target_dim, const Vec& z,
                const std::optional<Box>& domain = std::nullopt);

/// Max over the grid of max(value gap in the sup norm, Jacobian gap in the
/// entrywise max norm): the order-1 distance used by neighborhood checks.
double c1_distance(const DifferentiableMap& f, const DifferentiableMap& g, const Box& k,
                   int points_per_axis = 401);

/// Checks f's analytic Jacobian against finite differences over its test box
/// (17 points per axis); the mismatch is relative to the Jacobian scale.
bool jacobian_consistent(const DifferentiableMap& f, double slack = tol::fd);

/// Identity-chart local representative: validates dimensions and spot-checks
/// on the sample grid that the image stays inside the target chart,
/// raising ChartMismatch otherwise. The result carries the source chart's
/// domain.
DifferentiableMap local_representative(const DifferentiableMap& f, const Chart& source,
                                       const Chart& target, const GridSpec& samples);

/// Globally affine map z |-> a z + b over the complex field, restricted to a
/// linear subspace of its source. The differential at every point is the
/// matrix composed with the inclusion of the source subspace.
struct ComplexAffineMap {
  CMat a;
  CVec b;
  Subspace source;  // complex subspace of C^p through the origin

  ComplexAffineMap(CMat a_, CVec b_, Subspace source_);
  static ComplexAffineMap on_full_source(CMat a_, CVec b_);

  int ambient_source_dim() const { return static_cast<int>(a.cols()); }
  int source_dim() const { return source.dim(); }
  int target_dim() const { return static_cast<int>(a.rows()); }

  /// Evaluates; raises DomainEscape when z is not in the source subspace.
  CVec operator()(const CVec& z) const;
  /// a composed with an orthonormal inclusion of the source subspace.
  CMat effective_jacobian() const { return a * source.basis(); }
};

}  // namespace stratlab
