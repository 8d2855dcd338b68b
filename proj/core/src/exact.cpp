#include "stratlab/exact.hpp"

#include "stratlab/geometry.hpp"

#include <cmath>

namespace stratlab::exact {

Scalar Scalar::from_double(double re, double im) {
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw InvalidOperands("exact conversion of a non-finite value");
  }
  return Scalar(Rational(re), Rational(im));
}

Scalar Scalar::operator/(const Scalar& o) const {
  const Rational den = o.re * o.re + o.im * o.im;
  if (den == 0) throw InvalidOperands("exact division by zero");
  return Scalar((re * o.re + im * o.im) / den, (im * o.re - re * o.im) / den);
}

RMat RMat::identity(int n) {
  RMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
  return m;
}

RMat RMat::from_real(const Mat& src) {
  RMat m(static_cast<int>(src.rows()), static_cast<int>(src.cols()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m.at(r, c) = Scalar::from_double(src(r, c));
  }
  return m;
}

RMat RMat::from_complex(const CMat& src) {
  RMat m(static_cast<int>(src.rows()), static_cast<int>(src.cols()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      m.at(r, c) = Scalar::from_double(src(r, c).real(), src(r, c).imag());
    }
  }
  return m;
}

RMat RMat::column(const std::vector<Scalar>& entries) {
  RMat m(static_cast<int>(entries.size()), 1);
  for (int r = 0; r < m.rows(); ++r) m.at(r, 0) = entries[static_cast<std::size_t>(r)];
  return m;
}

RMat RMat::multiplied(const RMat& o) const {
  if (cols_ != o.rows_) throw DimensionMismatch("exact matrix product shape mismatch");
  RMat out(rows_, o.cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < o.cols_; ++c) {
      Scalar acc;
      for (int k = 0; k < cols_; ++k) acc = acc + at(r, k) * o.at(k, c);
      out.at(r, c) = acc;
    }
  }
  return out;
}

RMat RMat::hcat(const RMat& o) const {
  if (rows_ != o.rows_ && cols_ != 0 && o.cols_ != 0) {
    throw DimensionMismatch("exact hcat row mismatch");
  }
  const int rows = cols_ == 0 ? o.rows_ : rows_;
  RMat out(rows, cols_ + o.cols_);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols_; ++c) out.at(r, c) = at(r, c);
    for (int c = 0; c < o.cols_; ++c) out.at(r, cols_ + c) = o.at(r, c);
  }
  return out;
}

RMat RMat::col_range(int begin, int end) const {
  RMat out(rows_, end - begin);
  for (int r = 0; r < rows_; ++r) {
    for (int c = begin; c < end; ++c) out.at(r, c - begin) = at(r, c);
  }
  return out;
}

CMat RMat::to_complex() const {
  CMat out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      out(r, c) = Complex(static_cast<double>(at(r, c).re), static_cast<double>(at(r, c).im));
    }
  }
  return out;
}

RMat rref(const RMat& m, std::vector<int>* pivot_cols) {
  RMat a = m;
  if (pivot_cols) pivot_cols->clear();
  int row = 0;
  for (int col = 0; col < a.cols() && row < a.rows(); ++col) {
    int pivot = -1;
    for (int r = row; r < a.rows(); ++r) {
      if (!a.at(r, col).is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != row) {
      for (int c = 0; c < a.cols(); ++c) std::swap(a.at(pivot, c), a.at(row, c));
    }
    const Scalar inv = Scalar(1) / a.at(row, col);
    for (int c = col; c < a.cols(); ++c) a.at(row, c) = a.at(row, c) * inv;
    for (int r = 0; r < a.rows(); ++r) {
      if (r == row || a.at(r, col).is_zero()) continue;
      const Scalar factor = a.at(r, col);
      for (int c = col; c < a.cols(); ++c) {
        a.at(r, c) = a.at(r, c) - factor * a.at(row, c);
      }
    }
    if (pivot_cols) pivot_cols->push_back(col);
    ++row;
  }
  return a;
}

int rank(const RMat& m) {
  std::vector<int> pivots;
  rref(m, &pivots);
  return static_cast<int>(pivots.size());
}

RMat nullspace(const RMat& m) {
  std::vector<int> pivots;
  const RMat r = rref(m, &pivots);
  std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
  for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;

  std::vector<int> free_cols;
  for (int c = 0; c < m.cols(); ++c) {
    if (!is_pivot[static_cast<std::size_t>(c)]) free_cols.push_back(c);
  }
  RMat basis(m.cols(), static_cast<int>(free_cols.size()));
  for (std::size_t j = 0; j < free_cols.size(); ++j) {
    const int f = free_cols[j];
    basis.at(f, static_cast<int>(j)) = Scalar(1);
    for (std::size_t pi = 0; pi < pivots.size(); ++pi) {
      basis.at(pivots[pi], static_cast<int>(j)) = -r.at(static_cast<int>(pi), f);
    }
  }
  return basis;
}

int span_dim(const RMat& cols) { return rank(cols); }

int sum_dim(const RMat& a, const RMat& b) { return rank(a.hcat(b)); }

int intersect_dim(const RMat& a, const RMat& b) {
  return span_dim(a) + span_dim(b) - sum_dim(a, b);
}

bool span_contains(const RMat& outer, const RMat& inner) {
  return rank(outer) == sum_dim(outer, inner);
}

bool spans_equal(const RMat& a, const RMat& b) {
  return span_contains(a, b) && span_contains(b, a);
}

RMat independent_columns(const RMat& m) {
  std::vector<int> pivots;
  rref(m, &pivots);
  RMat out(m.rows(), static_cast<int>(pivots.size()));
  for (std::size_t j = 0; j < pivots.size(); ++j) {
    for (int r = 0; r < m.rows(); ++r) out.at(r, static_cast<int>(j)) = m.at(r, pivots[j]);
  }
  return out;
}

RMat pivot_complement(const RMat& inner, const RMat& outer) {
  const RMat joined = inner.hcat(outer);
  std::vector<int> pivots;
  rref(joined, &pivots);
  std::vector<int> chosen;
  for (int p : pivots) {
    if (p >= inner.cols()) chosen.push_back(p - inner.cols());
  }
  RMat out(outer.rows(), static_cast<int>(chosen.size()));
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    for (int r = 0; r < outer.rows(); ++r) out.at(r, static_cast<int>(j)) = outer.at(r, chosen[j]);
  }
  return out;
}

RMat intersection_basis(const RMat& a, const RMat& b) {
  const RMat ai = independent_columns(a);
  const RMat bi = independent_columns(b);
  if (ai.cols() == 0 || bi.cols() == 0) return RMat(a.rows(), 0);
  const RMat null = nullspace(ai.hcat(bi));
  // Each kernel vector (u; w) of [A | B] encodes A u = -B w, an intersection
  // member A u; with independent columns per side these members are a basis.
  RMat u_part(ai.cols(), null.cols());
  for (int r = 0; r < ai.cols(); ++r) {
    for (int c = 0; c < null.cols(); ++c) u_part.at(r, c) = null.at(r, c);
  }
  return ai.multiplied(u_part);
}

std::vector<Scalar> eval_polynomial(const PolynomialMap& p, const std::vector<Scalar>& z) {
  if (static_cast<int>(z.size()) != p.source_dim()) {
    throw DimensionMismatch("exact polynomial evaluation: wrong point dimension");
  }
  std::vector<Scalar> out(static_cast<std::size_t>(p.target_dim()));
  for (int coord = 0; coord < p.target_dim(); ++coord) {
    Scalar acc;
    for (const Monomial& t : p.terms()[static_cast<std::size_t>(coord)]) {
      Scalar term = Scalar::from_double(t.coeff.real(), t.coeff.imag());
      for (int axis = 0; axis < p.source_dim(); ++axis) {
        for (int e = 0; e < t.powers[static_cast<std::size_t>(axis)]; ++e) {
          term = term * z[static_cast<std::size_t>(axis)];
        }
      }
      acc = acc + term;
    }
    out[static_cast<std::size_t>(coord)] = acc;
  }
  return out;
}

RMat polynomial_jacobian(const PolynomialMap& p, const std::vector<Scalar>& z) {
  if (static_cast<int>(z.size()) != p.source_dim()) {
    throw DimensionMismatch("exact polynomial Jacobian: wrong point dimension");
  }
  RMat jac(p.target_dim(), p.source_dim());
  for (int coord = 0; coord < p.target_dim(); ++coord) {
    for (const Monomial& t : p.terms()[static_cast<std::size_t>(coord)]) {
      for (int axis = 0; axis < p.source_dim(); ++axis) {
        const int e = t.powers[static_cast<std::size_t>(axis)];
        if (e == 0) continue;
        Scalar term = Scalar::from_double(t.coeff.real(), t.coeff.imag()) * Scalar(e);
        for (int other = 0; other < p.source_dim(); ++other) {
          const int pw = t.powers[static_cast<std::size_t>(other)] - (other == axis ? 1 : 0);
          for (int k = 0; k < pw; ++k) term = term * z[static_cast<std::size_t>(other)];
        }
        jac.at(coord, axis) = jac.at(coord, axis) + term;
      }
    }
  }
  return jac;
}

bool surjective_with(const RMat& image_cols, const RMat& tangent_cols, int ambient) {
  return sum_dim(image_cols, tangent_cols) == ambient;
}

HFacts h_construction_facts(const RMat& x_cols, const RMat& tau_cols, const RMat& v_col, int r) {
  HFacts facts;
  const int n = x_cols.rows();
  facts.v_in_source = span_contains(x_cols, v_col);
  facts.v_outside_limit = !span_contains(tau_cols, v_col);
  if (!facts.v_in_source || !facts.v_outside_limit) return facts;

  const RMat t1 = intersection_basis(x_cols, tau_cols);
  const RMat e_t1 = v_col.hcat(t1);
  const RMat w1 = pivot_complement(e_t1, x_cols);
  const RMat t2 = pivot_complement(t1, tau_cols);
  const RMat x_plus_tau = x_cols.hcat(tau_cols);
  const RMat w2 = pivot_complement(x_plus_tau, RMat::identity(n));

  facts.dim_t1 = span_dim(t1);
  facts.dim_t2 = t2.cols();
  facts.dim_w1 = w1.cols();
  facts.dim_w2 = w2.cols();

  const int target = n - r;
  RMat h = independent_columns(t2.hcat(w2));
  if (h.cols() > target) return facts;  // infeasible request
  auto append_until = [&](const RMat& pool) {
    for (int c = 0; c < pool.cols() && h.cols() < target; ++c) {
      const RMat cand = pool.col_range(c, c + 1);
      if (!span_contains(h, cand)) h = h.hcat(cand);
    }
  };
  append_until(t1);
  append_until(w1);
  if (h.cols() != target) return facts;

  facts.feasible = true;
  facts.dim_h = h.cols();
  facts.sum_with_source_full = sum_dim(h, x_cols) == n;
  facts.sum_with_limit_proper = sum_dim(h, tau_cols) < n;
  facts.h = h;
  return facts;
}

}  // namespace stratlab::exact
