#include "stratlab/subspace.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stratlab {
namespace {

// Containment slack demanded before a complement is formed.
constexpr double kComplementPreTol = 1e-6;
// Threshold for "first significant coordinate" on unit-norm columns.
constexpr double kSignificant = 1e-8;

bool entries_real(const CMat& m, double slack) {
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j).imag()) > slack) return false;
    }
  }
  return true;
}

template <typename Scalar>
using MatT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
double spectral_norm(const MatT<Scalar>& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<MatT<Scalar>> svd(m);
  return svd.singularValues()(0);
}

template <typename Scalar>
MatT<Scalar> orthonormal_span(const MatT<Scalar>& spanning, double tol_rel) {
  if (spanning.cols() == 0) return MatT<Scalar>(spanning.rows(), 0);
  Eigen::JacobiSVD<MatT<Scalar>> svd(spanning, Eigen::ComputeThinU);
  const RankDecision d = rank_decide(svd.singularValues(), tol_rel);
  return svd.matrixU().leftCols(d.rank);
}

template <typename Scalar>
MatT<Scalar> intersect_bases(const MatT<Scalar>& ba, const MatT<Scalar>& bb, double tol_rel) {
  const int n = static_cast<int>(ba.rows());
  const MatT<Scalar> id = MatT<Scalar>::Identity(n, n);
  if (n == 0) return id;
  // x lies in A cap B iff both projector complements annihilate it; the joint
  // kernel is read off the smallest right singular vectors.
  MatT<Scalar> stacked(2 * n, n);
  stacked.topRows(n) = id - ba * ba.adjoint();
  stacked.bottomRows(n) = id - bb * bb.adjoint();
  Eigen::JacobiSVD<MatT<Scalar>> svd(stacked, Eigen::ComputeFullV);
  // Two full subspaces leave only roundoff in the stack; a relative cut would
  // keep that noise as rank. Projector complements have unit natural scale,
  // so spectra at orthonormality-slack level mean both complements vanish.
  if (svd.singularValues()(0) <= tol::ortho) return id;
  const RankDecision d = rank_decide(svd.singularValues(), tol_rel);
  const int dim_int = n - d.rank;
  return svd.matrixV().rightCols(dim_int);
}

template <typename Scalar>
MatT<Scalar> complement_basis(const MatT<Scalar>& inner, const MatT<Scalar>& outer) {
  const int n = static_cast<int>(inner.rows());
  const int expected = static_cast<int>(outer.cols() - inner.cols());
  if (expected == 0) return MatT<Scalar>(n, 0);
  const MatT<Scalar> id = MatT<Scalar>::Identity(n, n);
  const MatT<Scalar> residual = (id - inner * inner.adjoint()) * outer;
  Eigen::JacobiSVD<MatT<Scalar>> svd(residual, Eigen::ComputeThinU);
  if (svd.singularValues()(expected - 1) < 1e-6) {
    throw NotContained("complement is ill-conditioned; containment margin too small");
  }
  return svd.matrixU().leftCols(expected);
}

template <typename Scalar>
MatT<Scalar> extend_basis(const MatT<Scalar>& basis) {
  const int n = static_cast<int>(basis.rows());
  const int k = static_cast<int>(basis.cols());
  MatT<Scalar> completion;
  if (k == 0) {
    completion = MatT<Scalar>::Identity(n, n);
  } else {
    Eigen::HouseholderQR<MatT<Scalar>> qr(basis);
    MatT<Scalar> q = qr.householderQ();
    completion = q.rightCols(n - k);
  }
  // Phase-normalize each column so its first significant coordinate is real
  // positive, then order by descending magnitude of that coordinate.
  struct Keyed {
    int col;
    double key;
  };
  std::vector<Keyed> order;
  order.reserve(completion.cols());
  for (int j = 0; j < completion.cols(); ++j) {
    int first = 0;
    while (first < n - 1 && std::abs(completion(first, j)) <= kSignificant) ++first;
    const Scalar pivot = completion(first, j);
    const double mag = std::abs(pivot);
    if (mag > 0) completion.col(j) *= Eigen::numext::conj(pivot) / Scalar(mag);
    order.push_back({j, mag});
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const Keyed& a, const Keyed& b) { return a.key > b.key; });
  MatT<Scalar> out(n, n);
  out.leftCols(k) = basis;
  for (std::size_t j = 0; j < order.size(); ++j) {
    out.col(k + static_cast<int>(j)) = completion.col(order[j].col);
  }
  return out;
}

template <typename Scalar>
MatT<Scalar> rotation_between(const MatT<Scalar>& bf, const MatT<Scalar>& bt) {
  const int n = static_cast<int>(bf.rows());
  MatT<Scalar> rot = MatT<Scalar>::Identity(n, n);
  if (bf.cols() == 0) return rot;
  Eigen::JacobiSVD<MatT<Scalar>> svd(bf.adjoint() * bt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const MatT<Scalar> a = bf * svd.matrixU();
  const MatT<Scalar> b = bt * svd.matrixV();
  // Principal pairs (a_i, b_i) have real inner product sigma_i; rotate each
  // plane span{a_i, c_i} by its principal angle, fix everything orthogonal.
  // The sine comes from the orthogonal rejection, not sqrt(1 - c^2), so
  // rotations by angles near machine precision survive.
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    const MatT<Scalar> ai = a.col(i);
    const Scalar inner = (ai.adjoint() * b.col(i))(0, 0);
    const MatT<Scalar> rejection = b.col(i) - ai * inner;
    const double s = rejection.norm();
    if (s < 1e-15) continue;
    const double c = std::min(1.0, std::real(inner));
    const MatT<Scalar> ci = rejection / Scalar(s);
    rot += (Scalar(c) - Scalar(1)) * (ai * ai.adjoint() + ci * ci.adjoint()) +
           Scalar(s) * (ci * ai.adjoint() - ai * ci.adjoint());
  }
  return rot;
}

template <typename Scalar>
MatT<Scalar> procrustes(const MatT<Scalar>& basis, const MatT<Scalar>& reference) {
  if (basis.cols() == 0) return basis;
  Eigen::JacobiSVD<MatT<Scalar>> svd(basis.adjoint() * reference,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
  return basis * (svd.matrixU() * svd.matrixV().adjoint());
}

void require_compatible(const Subspace& a, const Subspace& b) {
  if (a.field() != b.field()) throw InvalidOperands("mixed-field subspace operands");
  if (a.ambient_dim() != b.ambient_dim()) {
    throw InvalidOperands("subspace operands live in different ambient dimensions");
  }
}

bool real_pair(const Subspace& a, const Subspace& b) { return a.field() == Field::Real; }

}  // namespace

RankDecision rank_decide(const Vec& singular_values, double tol_rel) {
  RankDecision d;
  const int n = static_cast<int>(singular_values.size());
  if (n == 0 || singular_values(0) <= 0.0) return d;  // empty or zero: rank 0, conclusive
  const double thresh = tol_rel * singular_values(0);
  int rank = 0;
  while (rank < n && singular_values(rank) > thresh) ++rank;
  d.rank = rank;
  d.smallest_kept = rank > 0 ? singular_values(rank - 1) : 0.0;
  d.largest_dropped = rank < n ? singular_values(rank) : 0.0;
  if (rank == n || d.largest_dropped == 0.0) {
    d.conclusive = true;
  } else {
    d.conclusive = d.smallest_kept / d.largest_dropped > tol::rank_gap;
  }
  return d;
}

RankDecision numeric_rank(const CMat& m, double tol_rel) {
  if (m.rows() == 0 || m.cols() == 0) return RankDecision{};
  if (entries_real(m, 0.0)) return numeric_rank(Mat(m.real()), tol_rel);
  Eigen::JacobiSVD<CMat> svd(m);
  return rank_decide(svd.singularValues(), tol_rel);
}

RankDecision numeric_rank(const Mat& m, double tol_rel) {
  if (m.rows() == 0 || m.cols() == 0) return RankDecision{};
  Eigen::JacobiSVD<Mat> svd(m);
  return rank_decide(svd.singularValues(), tol_rel);
}

Subspace::Subspace(Field field, CMat orthonormal_basis)
    : field_(field), basis_(std::move(orthonormal_basis)) {
  const int n = ambient_dim();
  const int k = dim();
  if (k > n) throw InvalidOperands("basis has more columns than the ambient dimension");
  if (field_ == Field::Real) {
    if (!entries_real(basis_, tol::ortho)) {
      throw InvalidOperands("real-field subspace carries complex entries");
    }
    basis_.imag().setZero();
  }
  if (k > 0) {
    const CMat gram = basis_.adjoint() * basis_;
    const double err = (gram - CMat::Identity(k, k)).cwiseAbs().maxCoeff();
    if (err > tol::ortho) {
      throw InvalidOperands("basis columns are not orthonormal within tolerance");
    }
  }
}

Subspace Subspace::zero(Field field, int ambient_dim) {
  return Subspace(field, CMat(ambient_dim, 0));
}

Subspace Subspace::full(Field field, int ambient_dim) {
  return Subspace(field, CMat::Identity(ambient_dim, ambient_dim));
}

Subspace Subspace::line(Field field, const CVec& v) {
  const double norm = v.norm();
  if (norm == 0.0) throw InvalidOperands("line through the zero vector");
  CMat b(v.size(), 1);
  b.col(0) = v / norm;
  return Subspace(field, b);
}

Subspace Subspace::from_span(Field field, const CMat& spanning, double tol_rel) {
  if (field == Field::Real) {
    if (!entries_real(spanning, tol::ortho)) {
      throw InvalidOperands("real-field span with complex entries");
    }
    return from_span_real(spanning.real(), tol_rel);
  }
  return Subspace(field, orthonormal_span<Complex>(spanning, tol_rel));
}

Subspace Subspace::from_span_real(const Mat& spanning, double tol_rel) {
  const Mat basis = orthonormal_span<double>(spanning, tol_rel);
  return Subspace(Field::Real, basis.cast<Complex>());
}

Mat Subspace::real_basis() const {
  if (field_ != Field::Real) throw InvalidOperands("real basis of a complex subspace");
  return basis_.real();
}

CMat Subspace::projector() const { return basis_ * basis_.adjoint(); }

Subspace sum(const Subspace& a, const Subspace& b) {
  require_compatible(a, b);
  if (real_pair(a, b)) {
    Mat joined(a.ambient_dim(), a.dim() + b.dim());
    joined << a.real_basis(), b.real_basis();
    return Subspace::from_span_real(joined);
  }
  CMat joined(a.ambient_dim(), a.dim() + b.dim());
  joined << a.basis(), b.basis();
  return Subspace::from_span(Field::Complex, joined);
}

Subspace intersect(const Subspace& a, const Subspace& b) {
  require_compatible(a, b);
  if (real_pair(a, b)) {
    const Mat basis = intersect_bases<double>(a.real_basis(), b.real_basis(), tol::rank_rel);
    return Subspace(Field::Real, basis.cast<Complex>());
  }
  return Subspace(Field::Complex, intersect_bases<Complex>(a.basis(), b.basis(), tol::rank_rel));
}

double subspace_distance(const Subspace& a, const Subspace& b) {
  require_compatible(a, b);
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("subspace distance requires equal dimensions");
  }
  if (a.dim() == 0) return 0.0;
  if (real_pair(a, b)) {
    const Mat pa = a.real_basis() * a.real_basis().transpose();
    const Mat pb = b.real_basis() * b.real_basis().transpose();
    const Mat id = Mat::Identity(a.ambient_dim(), a.ambient_dim());
    const double d_ab = spectral_norm<double>((id - pb) * a.real_basis());
    const double d_ba = spectral_norm<double>((id - pa) * b.real_basis());
    return std::max(d_ab, d_ba);
  }
  const CMat id = CMat::Identity(a.ambient_dim(), a.ambient_dim());
  const double d_ab = spectral_norm<Complex>((id - b.projector()) * a.basis());
  const double d_ba = spectral_norm<Complex>((id - a.projector()) * b.basis());
  return std::max(d_ab, d_ba);
}

double containment_residual(const Subspace& outer, const Subspace& inner) {
  require_compatible(outer, inner);
  if (inner.dim() == 0) return 0.0;
  if (real_pair(outer, inner)) {
    const Mat id = Mat::Identity(outer.ambient_dim(), outer.ambient_dim());
    const Mat po = outer.real_basis() * outer.real_basis().transpose();
    return spectral_norm<double>((id - po) * inner.real_basis());
  }
  const CMat id = CMat::Identity(outer.ambient_dim(), outer.ambient_dim());
  return spectral_norm<Complex>((id - outer.projector()) * inner.basis());
}

bool contains(const Subspace& outer, const Subspace& inner, double slack) {
  return containment_residual(outer, inner) <= slack;
}

Subspace complement_within(const Subspace& inner, const Subspace& outer) {
  require_compatible(inner, outer);
  if (!contains(outer, inner, kComplementPreTol)) {
    throw NotContained("complement_within requires inner to lie inside outer");
  }
  if (real_pair(inner, outer)) {
    const Mat basis = complement_basis<double>(inner.real_basis(), outer.real_basis());
    return Subspace(Field::Real, basis.cast<Complex>());
  }
  return Subspace(Field::Complex, complement_basis<Complex>(inner.basis(), outer.basis()));
}

CMat extend_to_basis(const Subspace& partial) {
  if (partial.field() == Field::Real) {
    return extend_basis<double>(partial.real_basis()).cast<Complex>();
  }
  return extend_basis<Complex>(partial.basis());
}

CMat direct_rotation(const Subspace& from, const Subspace& to) {
  require_compatible(from, to);
  if (from.dim() != to.dim()) {
    throw DimensionMismatch("direct rotation requires equal dimensions");
  }
  if (from.field() == Field::Real) {
    return rotation_between<double>(from.real_basis(), to.real_basis()).cast<Complex>();
  }
  return rotation_between<Complex>(from.basis(), to.basis());
}

CMat procrustes_align(const CMat& basis, const CMat& reference) {
  if (basis.rows() != reference.rows() || basis.cols() != reference.cols()) {
    throw DimensionMismatch("procrustes alignment requires matching shapes");
  }
  if (entries_real(basis, 0.0) && entries_real(reference, 0.0)) {
    return procrustes<double>(basis.real(), reference.real()).cast<Complex>();
  }
  return procrustes<Complex>(basis, reference);
}

}  // namespace stratlab
