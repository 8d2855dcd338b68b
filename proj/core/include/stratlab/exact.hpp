#pragma once

#include "stratlab/common.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace stratlab {
class PolynomialMap;
}

namespace stratlab::exact {

// Exact-arithmetic route for small instances. Everything here is plain
// fraction Gaussian elimination over Q or Q(i); it shares no code with the
// floating-point path it is used to double-check.

using Rational = boost::multiprecision::cpp_rational;

/// Element of Q(i). Real-field data keeps im == 0.
struct Scalar {
  Rational re{0}, im{0};

  Scalar() = default;
  Scalar(int v) : re(v) {}  // NOLINT: implicit by design for literals
  Scalar(Rational r) : re(std::move(r)) {}
  Scalar(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  /// Exact conversion; finite doubles are dyadic rationals.
  static Scalar from_double(double re, double im = 0.0);

  bool is_zero() const { return re == 0 && im == 0; }
  Scalar conj() const { return Scalar(re, -im); }

  Scalar operator+(const Scalar& o) const { return Scalar(re + o.re, im + o.im); }
  Scalar operator-(const Scalar& o) const { return Scalar(re - o.re, im - o.im); }
  Scalar operator-() const { return Scalar(-re, -im); }
  Scalar operator*(const Scalar& o) const {
    return Scalar(re * o.re - im * o.im, re * o.im + im * o.re);
  }
  Scalar operator/(const Scalar& o) const;
  bool operator==(const Scalar& o) const { return re == o.re && im == o.im; }
};

/// Dense matrix over Q(i); value semantics, desk scale only.
class RMat {
 public:
  RMat() = default;
  RMat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

  static RMat identity(int n);
  static RMat from_real(const Mat& m);
  static RMat from_complex(const CMat& m);
  static RMat column(const std::vector<Scalar>& entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Scalar& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const Scalar& at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  RMat multiplied(const RMat& o) const;
  RMat hcat(const RMat& o) const;
  RMat col_range(int begin, int end) const;

  /// Lossy conversion for cross-checking against the floating route.
  CMat to_complex() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Scalar> data_;
};

/// Reduced row echelon form; optionally reports pivot column indices.
RMat rref(const RMat& m, std::vector<int>* pivot_cols = nullptr);
int rank(const RMat& m);
/// Columns spanning the kernel.
RMat nullspace(const RMat& m);

int span_dim(const RMat& cols);
int sum_dim(const RMat& a, const RMat& b);
int intersect_dim(const RMat& a, const RMat& b);
bool span_contains(const RMat& outer, const RMat& inner);
bool spans_equal(const RMat& a, const RMat& b);

/// Column-subset of `m` forming a basis of its span (pivot order).
RMat independent_columns(const RMat& m);
/// Columns of `outer` (taken in order) extending span(inner) to
/// span(inner) + span(outer): a linear, not orthogonal, complement.
RMat pivot_complement(const RMat& inner, const RMat& outer);
/// Basis of span(a) intersect span(b).
RMat intersection_basis(const RMat& a, const RMat& b);

/// Exact polynomial evaluation and Jacobian at a rational point. Coefficients
/// are converted exactly from their double representation.
std::vector<Scalar> eval_polynomial(const PolynomialMap& p, const std::vector<Scalar>& z);
RMat polynomial_jacobian(const PolynomialMap& p, const std::vector<Scalar>& z);

/// Rank fact behind a pointwise transversality verdict:
/// rank [image_cols | tangent_cols] == ambient.
bool surjective_with(const RMat& image_cols, const RMat& tangent_cols, int ambient);

/// Exact mirror of the greedy auxiliary-subspace construction: start from
/// T2 + W2 and append T1 then W1 columns until the target dimension n - r is
/// reached. Only rank facts are meaningful for comparison with the floating
/// route; the basis itself is a pivot (non-orthogonal) choice.
struct HFacts {
  bool v_in_source = false;
  bool v_outside_limit = false;
  bool feasible = false;
  int dim_t1 = 0, dim_t2 = 0, dim_w1 = 0, dim_w2 = 0, dim_h = 0;
  bool sum_with_source_full = false;   // span(H) + span(X) = ambient
  bool sum_with_limit_proper = false;  // span(H) + span(tau) != ambient
  RMat h;
};
HFacts h_construction_facts(const RMat& x_cols, const RMat& tau_cols, const RMat& v_col, int r);

}  // namespace stratlab::exact
